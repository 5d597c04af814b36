#include "hardyflow/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "parallel.hpp"

namespace hardyflow {

using std::numbers::pi;

std::string to_string(OriginBehavior b)
{
    switch (b) {
    case OriginBehavior::regular: return "regular";
    case OriginBehavior::singular: return "singular";
    case OriginBehavior::blow_up: return "blow-up";
    case OriginBehavior::undetermined: return "undetermined";
    }
    return "?";
}

std::string to_string(EndBehavior b)
{
    switch (b) {
    case EndBehavior::fast_decay: return "fast-decay";
    case EndBehavior::slow_decay: return "slow-decay";
    case EndBehavior::blow_up: return "blow-up";
    case EndBehavior::undetermined: return "undetermined";
    }
    return "?";
}

std::string SolutionClass::label() const
{
    const char* o = "?";
    switch (origin_behavior) {
    case OriginBehavior::regular: o = "R"; break;
    case OriginBehavior::singular: o = "S"; break;
    case OriginBehavior::blow_up: o = "X"; break;
    case OriginBehavior::undetermined: o = "?"; break;
    }
    const char* e = "?";
    switch (end_behavior) {
    case EndBehavior::fast_decay: e = "f"; break;
    case EndBehavior::slow_decay: e = "s"; break;
    case EndBehavior::blow_up: e = "x"; break;
    case EndBehavior::undetermined: e = "?"; break;
    }
    return fmt::format("{}-{}-{}", o, zeros, e);
}

double expected_winding(int k, const ProblemSpec& p)
{
    return -k * pi - std::atan(p.n - 2.0 - kappa(p.n, p.beta())) + std::atan(kappa(p.n, p.eta()));
}

namespace {

// Two-phase flow from a seed: first leg without end detection up to the switch time, second leg with it.
struct TwoLeg {
    Trajectory first;
    Trajectory second;
    bool second_ran = false;
    FowlerState seed;
};

TwoLeg run_two_legs(const FowlerState& seed, double l_second, double sigma, const ProblemSpec& p,
                    const ClassifyOptions& o)
{
    TwoLeg r;
    r.seed = seed;
    Controls quiet = o.controls;
    quiet.detect_origin = false;
    quiet.detect_p = false;
    FowlerState cur = seed;
    if (sigma * (p.switch_time - seed.t) > 0.0) {
        r.first = integrate(seed, p.switch_time, p, quiet);
        if (r.first.termination != Termination::reached_t_end)
            return r;
        cur = r.first.states.back();
    } else {
        r.first.states.push_back(seed);
    }
    cur = switch_l(cur, l_second);
    Controls loud = o.controls;
    loud.detect_origin = o.stop_at_origin && o.controls.detect_origin;
    double t_end = sigma * o.horizon;
    if (sigma * (t_end - cur.t) < 10.0)
        t_end = cur.t + sigma * o.horizon;
    r.second = integrate(cur, t_end, p, loud);
    r.second_ran = true;
    return r;
}

void fill_path(SolutionClass& c, const TwoLeg& r)
{
    c.path = r.first.states;
    c.events = r.first.events;
    if (r.second_ran) {
        c.path.insert(c.path.end(), r.second.states.begin() + 1, r.second.states.end());
        c.events.insert(c.events.end(), r.second.events.begin(), r.second.events.end());
    }
}

// Index of the smallest radius inside the dwell window.
std::size_t dwell_minimum(const Trajectory& tr)
{
    const auto [a, b] = *tr.dwell;
    std::size_t best = a;
    for (std::size_t i = a; i <= b; ++i)
        if (tr.states[i].rho() < tr.states[best].rho())
            best = i;
    return best;
}

}  // namespace

SolutionClass classify(double d, const ProblemSpec& p, const ClassifyOptions& o)
{
    if (d == 0.0)
        throw DomainError("classify needs d != 0");
    SolutionClass c;
    c.d = d;
    c.origin_behavior = OriginBehavior::regular;
    const FowlerState seed = seed_unstable(d, p, p.l_u, o.eps0);
    const TwoLeg r = run_two_legs(seed, p.l_s, 1.0, p, o);
    if (o.keep_path)
        fill_path(c, r);
    c.zeros = r.first.zero_count;
    if (!r.second_ran) {
        c.termination = r.first.termination;
        c.winding = r.first.states.back().phi - seed.phi;
        if (r.first.termination == Termination::blow_up) {
            c.end_behavior = EndBehavior::blow_up;
            c.blow_up_radius = std::exp(*r.first.blow_up_time);
        }
        return c;
    }
    const Trajectory& tr = r.second;
    c.zeros += tr.zero_count;
    c.termination = tr.termination;
    c.winding = tr.states.back().phi - seed.phi;
    switch (tr.termination) {
    case Termination::converged_origin: {
        const std::size_t i = dwell_minimum(tr);
        const FowlerState& s = tr.states[i];
        const OriginModel m = origin_model(p, p.l_s, End::future);
        c.end_behavior = EndBehavior::fast_decay;
        c.L = m.stable_component(s.x, s.y) * std::exp(-m.lambda_s * s.t);
        c.winding = s.phi - seed.phi;
        break;
    }
    case Termination::converged_p_plus:
    case Termination::converged_p_minus:
        c.end_behavior = EndBehavior::slow_decay;
        c.p_side = tr.termination == Termination::converged_p_plus ? 1 : -1;
        break;
    case Termination::blow_up:
        c.end_behavior = EndBehavior::blow_up;
        c.blow_up_radius = std::exp(*tr.blow_up_time);
        break;
    default:
        c.end_behavior = EndBehavior::undetermined;
    }
    return c;
}

SolutionClass classify_from_infinity(double L, const ProblemSpec& p, const ClassifyOptions& o)
{
    if (L == 0.0)
        throw DomainError("classify_from_infinity needs L != 0");
    SolutionClass c;
    c.L = L;
    c.end_behavior = EndBehavior::fast_decay;
    c.origin_behavior = OriginBehavior::undetermined;
    const FowlerState seed = seed_stable(L, p, p.l_s, o.eps0);
    const TwoLeg r = run_two_legs(seed, p.l_u, -1.0, p, o);
    if (o.keep_path)
        fill_path(c, r);
    c.zeros = r.first.zero_count;
    if (!r.second_ran) {
        c.termination = r.first.termination;
        c.winding = r.first.states.back().phi - seed.phi;
        if (r.first.termination == Termination::blow_up) {
            c.origin_behavior = OriginBehavior::blow_up;
            c.blow_up_radius = std::exp(*r.first.blow_up_time);
        }
        return c;
    }
    const Trajectory& tr = r.second;
    c.zeros += tr.zero_count;
    c.termination = tr.termination;
    c.winding = tr.states.back().phi - seed.phi;
    switch (tr.termination) {
    case Termination::converged_origin: {
        const std::size_t i = dwell_minimum(tr);
        const FowlerState& s = tr.states[i];
        const OriginModel m = origin_model(p, p.l_u, End::past);
        c.origin_behavior = OriginBehavior::regular;
        c.d = m.unstable_component(s.x, s.y) * std::exp(-m.lambda_u * s.t);
        c.winding = s.phi - seed.phi;
        break;
    }
    case Termination::converged_p_plus:
    case Termination::converged_p_minus:
        c.origin_behavior = OriginBehavior::singular;
        c.p_side = tr.termination == Termination::converged_p_plus ? 1 : -1;
        break;
    case Termination::blow_up:
        c.origin_behavior = OriginBehavior::blow_up;
        c.blow_up_radius = std::exp(*tr.blow_up_time);
        break;
    default:
        c.origin_behavior = OriginBehavior::undetermined;
    }
    return c;
}

namespace {

std::string join(const std::vector<std::string>& v)
{
    std::string s;
    for (const auto& x : v)
        s += (s.empty() ? "" : "; ") + x;
    return s;
}

std::vector<double> log_samples(double lo, double hi, int n)
{
    std::vector<double> out;
    for (int i = 1; i <= n; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n + 1)));
    return out;
}

class Shooter {
public:
    Shooter(const ProblemSpec& p, const ShootOptions& o) : p_(p), o_(o), sign_(o.sign >= 0 ? 1 : -1) {}

    // More than k zeros before P convergence, blow-up or the horizon.
    bool beyond(double d, int k, const Controls& c) const
    {
        ClassifyOptions co = o_.classify;
        co.controls = c;
        co.stop_at_origin = false;
        return classify(sign_ * d, p_, co).zeros > k;
    }

    std::optional<std::pair<double, double>> widen(double center, double w, double floor, double ceil, int k,
                                                   const Controls& c) const
    {
        for (int i = 0; i < 8; ++i, w *= 4.0) {
            const double lo = std::max(center * (1.0 - w), floor), hi = std::min(center * (1.0 + w), ceil);
            if (!(lo < hi))
                return std::nullopt;
            if (!beyond(lo, k, c) && beyond(hi, k, c))
                return std::pair{lo, hi};
        }
        return std::nullopt;
    }

    std::optional<std::pair<double, double>> scan(double floor, double ceil, int k) const
    {
        const int n = 400;
        double prev = floor;
        for (int i = 1; i <= n; ++i) {
            const double d = floor + (ceil - floor) * i / n;
            if (beyond(d, k, o_.classify.controls)) {
                if (prev == floor && beyond(floor, k, o_.classify.controls))
                    return std::nullopt;
                return std::pair{prev, d};
            }
            prev = d;
        }
        return std::nullopt;
    }

    double bisect(std::pair<double, double> br, int k, const Controls& c) const
    {
        auto [lo, hi] = br;
        while (hi - lo > o_.bisection_rel * hi) {
            const double m = 0.5 * (lo + hi);
            (beyond(m, k, c) ? hi : lo) = m;
        }
        return 0.5 * (lo + hi);
    }

    SolutionClass full(double d) const { return classify(sign_ * d, p_, o_.classify); }

    int sign() const { return sign_; }

private:
    const ProblemSpec& p_;
    const ShootOptions& o_;
    int sign_;
};

}  // namespace

StructureReport find_A_sequence(int k_max, const ProblemSpec& p, const ShootOptions& o)
{
    if (k_max < 0)
        throw DomainError("k_max must be non-negative");
    const auto bad = failing_hypotheses(p, Theorem::existence_regular);
    if (!bad.empty())
        throw HypothesisError("hypotheses of the regular existence theorem fail: " + join(bad), bad);
    o.classify.controls.check();

    StructureReport rep;
    rep.problem = p.name;
    rep.theorem = "existence_regular";
    const Shooter sh(p, o);
    const int s = sh.sign();
    const double tau = p.switch_time;
    const double l = p.l_u;
    SeedOptions so;
    so.eps0 = o.classify.eps0;
    so.controls = transport_controls();
    so.controls.rel_tol = o.classify.controls.rel_tol;
    so.controls.abs_tol = o.classify.controls.abs_tol;

    const Bound dplus = continuability_bounds(tau, BoundKind::regular_side, p, l, s, so);
    rep.d_plus = dplus.value;
    rep.d_plus_infinite = dplus.infinite;
    if (dplus.infinite)
        rep.flags.push_back(fmt::format("no blow-up up to d = {}: d+ reported as infinite", dplus.cap));
    const double d_hi = dplus.infinite ? 1e3 : dplus.value;

    // phase 1: geometry
    std::vector<std::optional<double>> geometric(k_max + 1);
    if (s > 0) {
        try {
            TraceOptions to;
            to.seed = so;
            to.cluster_upper = !dplus.infinite;
            const ManifoldCurve wu =
                trace(Side::unstable_plus, tau, {o.trace_lo * d_hi, d_hi}, o.trace_samples, p, l, to);
            if (wu.under_resolved)
                rep.flags.push_back("unstable curve under-resolved");
            double L_bound = o.L_cap;
            for (int sg : {1, -1}) {
                const Bound b = continuability_bounds(tau, BoundKind::fast_decay_side, p, l, sg, so, o.L_cap);
                if (!b.infinite)
                    L_bound = std::min(L_bound, b.value);
            }
            to.cluster_upper = false;
            // grow the stable range until the last needed shifted branch leaves the stripe at pi/2
            const auto reaches = [&](const ManifoldCurve& c, int j) {
                const double shift = 2.0 * pi * (j / 2);
                return !c.samples.empty() && c.samples.back().theta - shift > pi / 2;
            };
            ManifoldCurve sp, sm;
            for (double L_max = 16.0;; L_max *= 4.0) {
                const double top = std::min(L_max, L_bound * (1.0 - 1e-6));
                sp = trace(Side::stable_plus, tau, {o.trace_lo, top}, o.trace_samples, p, l, to);
                sm = trace(Side::stable_minus, tau, {o.trace_lo, top}, o.trace_samples, p, l, to);
                const int j_plus = k_max % 2 == 0 ? k_max : k_max - 1;
                const int j_minus = k_max % 2 == 1 ? k_max : k_max - 1;
                const bool ok = reaches(sp, j_plus) && (j_minus < 0 || reaches(sm, j_minus));
                if (ok || top >= L_bound * (1.0 - 2e-6) || L_max >= o.L_cap) {
                    if (!ok)
                        rep.flags.push_back(fmt::format("stable branches do not reach shift {} below L = {}", k_max, top));
                    break;
                }
            }
            const IntersectionResult ir = intersections(wu, sp, sm, k_max, p, so);
            rep.intersections = ir.records;
            for (const auto& b : ir.brackets)
                if (!b.passed)
                    rep.flags.push_back(fmt::format("bracketing violated at j = {}: {}", b.j, b.detail));
            for (const auto& r : ir.records)
                if (r.first_in_d && r.converged && r.j <= k_max)
                    geometric[r.j] = r.d_star;
            for (int j = 1; j <= k_max; ++j)
                if (geometric[j] && geometric[j - 1] && !(*geometric[j] > *geometric[j - 1]))
                    rep.flags.push_back(fmt::format("intersections not increasing at j = {}", j));
        } catch (const DomainError& e) {
            rep.flags.push_back(std::string("geometry unavailable: ") + e.what());
        }
    } else {
        rep.flags.push_back("negative branch bracketed by scanning");
    }

    // phase 2: bisection on classification
    double prev = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        Connection c;
        c.k = k;
        c.geometric = geometric[k];
        const double floor = prev > 0.0 ? prev * (1.0 + 1e-9) : o.trace_lo * d_hi;
        const double ceil = d_hi;
        std::optional<std::pair<double, double>> br;
        if (geometric[k] && *geometric[k] > floor && *geometric[k] < ceil) {
            br = sh.widen(*geometric[k], 1e-3, floor, ceil, k, o.classify.controls);
            if (br)
                c.bracket_source = "geometry";
            else
                rep.flags.push_back(fmt::format("intersection d*_{} = {} failed classification; demoted", k,
                                                *geometric[k]));
        }
        if (!br) {
            br = sh.scan(floor, ceil, k);
            c.bracket_source = "scan";
        }
        if (!br) {
            rep.flags.push_back(fmt::format("no bracket for A_{} in ({}, {})", k, floor, ceil));
            break;
        }
        c.value = sh.bisect(*br, k, o.classify.controls);

        const SolutionClass v = sh.full(c.value);
        c.verified_label = v.label();
        c.zeros = v.zeros;
        c.verified = v.end_behavior == EndBehavior::fast_decay && v.zeros == k;
        c.winding = v.winding;
        c.winding_expected = expected_winding(k, p);
        if (v.L)
            c.partner = *v.L;
        if (!c.verified)
            rep.flags.push_back(fmt::format("A_{} = {} classified {}", k, c.value, c.verified_label));
        if (std::fabs(c.winding - c.winding_expected) > 0.1)
            rep.flags.push_back(fmt::format("A_{} winding {} vs expected {}", k, c.winding, c.winding_expected));

        if (o.check_tolerance) {
            Controls half = o.classify.controls;
            half.rel_tol /= 2.0;
            half.abs_tol /= 2.0;
            const auto hb = sh.widen(c.value, 1e-5, floor, ceil, k, half);
            if (hb) {
                const double a2 = sh.bisect(*hb, k, half);
                c.tolerance_shift = std::fabs(a2 - c.value) / c.value;
            } else {
                rep.flags.push_back(fmt::format("A_{} not bracketed under halved tolerances", k));
            }
        }
        rep.A.push_back(c);
        if (v.L) {
            Connection b;
            b.k = k;
            b.value = std::fabs(*v.L);
            b.partner = s * c.value;
            b.zeros = v.zeros;
            b.verified = c.verified;
            b.verified_label = c.verified_label;
            rep.B.push_back(b);
        }
        prev = c.value;
    }

    // interval classes
    double lo = 0.0;
    for (const auto& c : rep.A) {
        IntervalClass ic;
        ic.name = c.k == 0 ? "(0,A_0)" : fmt::format("(A_{},A_{})", c.k - 1, c.k);
        ic.lo = lo;
        ic.hi = c.value;
        const auto ds = log_samples(lo > 0.0 ? lo : 1e-3 * c.value, c.value, o.interval_samples);
        ic.samples.resize(ds.size());
        detail::parallel_for(ds.size(), [&](std::size_t i) { ic.samples[i] = {s * ds[i], sh.full(ds[i]).label()}; });
        const std::string want = fmt::format("R-{}-s", c.k);
        if (c.k == 0) {
            for (const auto& smp : ic.samples)
                if (smp.label != want && smp.label != "R-0-?")
                    rep.flags.push_back(fmt::format("d = {} in (0,A_0) classified {}", smp.param, smp.label));
        } else {
            // a_k: start of the final run of R-k-s samples below A_k
            std::size_t first = ic.samples.size();
            while (first > 0 && ic.samples[first - 1].label == want)
                --first;
            if (first == ic.samples.size()) {
                rep.flags.push_back(fmt::format("no R-{}-s samples just below A_{}", c.k, c.k));
            } else {
                ABracket ab;
                ab.k = c.k;
                ab.lo = first == 0 ? lo : std::fabs(ic.samples[first - 1].param);
                ab.hi = std::fabs(ic.samples[first].param);
                rep.a.push_back(ab);
            }
        }
        rep.intervals.push_back(std::move(ic));
        lo = c.value;
    }
    return rep;
}

StructureReport find_B_sequence(int k_max, const ProblemSpec& p, const ShootOptions& o)
{
    const auto bad = failing_hypotheses(p, Theorem::existence_singular);
    if (!bad.empty())
        throw HypothesisError("hypotheses of the singular existence theorem fail: " + join(bad), bad);
    const ProblemSpec dual = kelvin_dual(p);
    const StructureReport dr = find_A_sequence(k_max, dual, o);

    StructureReport rep;
    rep.problem = p.name;
    rep.theorem = "existence_singular";
    rep.d_plus = dr.d_plus;
    rep.d_plus_infinite = dr.d_plus_infinite;
    rep.intersections = dr.intersections;
    for (const auto& f : dr.flags)
        rep.flags.push_back("dual: " + f);
    const int s = o.sign >= 0 ? 1 : -1;

    for (const auto& a : dr.A) {
        Connection b = a;
        // backward check on p: v(r, B_k) must be regular with k zeros and d equal to the dual's L
        const SolutionClass v = classify_from_infinity(s * a.value, p, o.classify);
        b.verified_label = v.label();
        b.zeros = v.zeros;
        b.winding = v.winding;
        b.winding_expected = -expected_winding(a.k, dual);
        b.verified = v.origin_behavior == OriginBehavior::regular && v.zeros == a.k;
        if (v.d) {
            const double rel = std::fabs(*v.d - a.partner) / std::fabs(a.partner);
            if (rel > 1e-6)
                rep.flags.push_back(fmt::format("B_{}: backward d = {} vs dual L = {}", a.k, *v.d, a.partner));
        }
        if (!b.verified)
            rep.flags.push_back(fmt::format("B_{} = {} classified {}", a.k, a.value, b.verified_label));
        rep.B.push_back(b);

        Connection d;
        d.k = a.k;
        d.value = std::fabs(a.partner);
        d.partner = s * a.value;
        d.zeros = a.zeros;
        d.verified = b.verified;
        d.verified_label = b.verified_label;
        rep.A.push_back(d);
    }
    if (!rep.B.empty()) {
        IntervalClass ic;
        ic.name = "(0,B_0)";
        ic.hi = rep.B.front().value;
        const auto Ls = log_samples(1e-3 * ic.hi, ic.hi, o.interval_samples);
        ic.samples.resize(Ls.size());
        detail::parallel_for(Ls.size(), [&](std::size_t i) {
            ic.samples[i] = {s * Ls[i], classify_from_infinity(s * Ls[i], p, o.classify).label()};
        });
        for (const auto& smp : ic.samples)
            if (smp.label != "S-0-f")
                rep.flags.push_back(fmt::format("L = {} in (0,B_0) classified {}", smp.param, smp.label));
        rep.intervals.push_back(std::move(ic));
    }
    return rep;
}

}  // namespace hardyflow
