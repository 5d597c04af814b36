#include "hardyflow/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"

namespace hardyflow {

using std::numbers::pi;

std::string to_string(Side s)
{
    switch (s) {
    case Side::unstable_plus: return "unstable-plus";
    case Side::unstable_minus: return "unstable-minus";
    case Side::stable_plus: return "stable-plus";
    case Side::stable_minus: return "stable-minus";
    }
    return "?";
}

bool is_unstable(Side s)
{
    return s == Side::unstable_plus || s == Side::unstable_minus;
}

int branch_sign(Side s)
{
    return (s == Side::unstable_plus || s == Side::stable_plus) ? 1 : -1;
}

Controls transport_controls()
{
    Controls c;
    c.detect_origin = false;
    c.detect_p = false;
    return c;
}

namespace {

// Angle of (x, y) on the eigen-line, continued from the plus branch so the minus branch sits pi below.
double seed_angle(double x, double y)
{
    const double a = std::atan(y / x);
    return x < 0.0 ? a - pi : a;
}

OriginModel checked_model(const ProblemSpec& p, double l, End end)
{
    const OriginModel m = origin_model(p, l, end);
    if (!m.saddle)
        throw DomainError(fmt::format("origin is not a saddle at the {} end for l = {}",
                                      end == End::past ? "past" : "future", l));
    return m;
}

}  // namespace

FowlerState seed_unstable(double d, const ProblemSpec& p, double l, double eps0)
{
    const OriginModel m = checked_model(p, l, End::past);
    FowlerState s;
    s.l = l;
    if (d == 0.0) {
        s.t = 0.0;
        return s;
    }
    if (!(eps0 > 0.0))
        throw DomainError("eps0 must be positive");
    s.t = std::log(eps0 / std::fabs(d)) / m.lambda_u;
    s.x = std::copysign(eps0, d);
    s.y = m.slope_u * s.x;
    s.phi = seed_angle(s.x, s.y);
    return s;
}

FowlerState seed_stable(double L, const ProblemSpec& p, double l, double eps0)
{
    const OriginModel m = checked_model(p, l, End::future);
    FowlerState s;
    s.l = l;
    if (L == 0.0) {
        s.t = 0.0;
        return s;
    }
    if (!(eps0 > 0.0))
        throw DomainError("eps0 must be positive");
    s.t = std::log(eps0 / std::fabs(L)) / m.lambda_s;
    s.x = std::copysign(eps0, L);
    s.y = m.slope_s * s.x;
    s.phi = seed_angle(s.x, s.y);
    return s;
}

namespace {

Transport finish(const Trajectory& tr, double l_out)
{
    Transport out;
    out.termination = tr.termination;
    out.blow_up_time = tr.blow_up_time;
    out.zero_count = tr.zero_count;
    if (tr.termination == Termination::reached_t_end)
        out.state = switch_l(tr.states.back(), l_out);
    return out;
}

Transport origin_transport(double tau, double l_out)
{
    Transport out;
    FowlerState s;
    s.t = tau;
    s.l = l_out;
    out.state = s;
    return out;
}

}  // namespace

Transport transport_unstable(double d, double tau, const ProblemSpec& p, double l_out, const SeedOptions& o)
{
    if (d == 0.0)
        return origin_transport(tau, l_out);
    const FowlerState seed = seed_unstable(d, p, p.l_u, o.eps0);
    return finish(integrate(seed, tau, p, o.controls), l_out);
}

Transport transport_stable(double L, double tau, const ProblemSpec& p, double l_out, const SeedOptions& o)
{
    if (L == 0.0)
        return origin_transport(tau, l_out);
    const FowlerState seed = seed_stable(L, p, p.l_s, o.eps0);
    return finish(integrate(seed, tau, p, o.controls), l_out);
}

SeedCheck richardson_check(Side side, double param, double t_c, const ProblemSpec& p, double l, const SeedOptions& o)
{
    SeedOptions half = o;
    half.eps0 = o.eps0 / 2.0;
    const auto run = [&](const SeedOptions& so) {
        return is_unstable(side) ? transport_unstable(param, t_c, p, l, so) : transport_stable(param, t_c, p, l, so);
    };
    const Transport a = run(o);
    const Transport b = run(half);
    SeedCheck r;
    r.threshold = 10.0 * o.controls.rel_tol;
    if (!a.state || !b.state) {
        r.relative_change = INFINITY;
        return r;
    }
    const double scale = std::max(a.state->rho(), b.state->rho());
    r.relative_change = std::hypot(a.state->x - b.state->x, a.state->y - b.state->y) / scale;
    r.passed = r.relative_change < r.threshold;
    return r;
}

double asymptotic_tangent(Side side, const ProblemSpec& p)
{
    const double base = is_unstable(side) ? -std::atan(kappa(p.n, p.eta()))
                                          : std::atan(kappa(p.n, p.beta()) - (p.n - 2.0));
    return branch_sign(side) > 0 ? base : base - pi;
}

namespace {

struct Eval {
    double mag = 0.0;  // |param|
    std::optional<FowlerState> state;
    Termination termination = Termination::reached_t_end;
};

class Tracer {
public:
    Tracer(Side side, double tau, const ProblemSpec& p, double l, const TraceOptions& o)
        : side_(side), tau_(tau), p_(p), l_(l), o_(o)
    {
    }

    std::vector<Eval> run(const std::vector<double>& mags) const
    {
        std::vector<Eval> out(mags.size());
        detail::parallel_for(mags.size(), [&](std::size_t i) { out[i] = one(mags[i]); });
        return out;
    }

    Eval one(double mag) const
    {
        const double param = branch_sign(side_) * mag;
        const Transport t = is_unstable(side_) ? transport_unstable(param, tau_, p_, l_, o_.seed)
                                               : transport_stable(param, tau_, p_, l_, o_.seed);
        return {mag, t.state, t.termination};
    }

private:
    Side side_;
    double tau_;
    const ProblemSpec& p_;
    double l_;
    const TraceOptions& o_;
};

double midpoint(double a, double b)
{
    return (a > 0.0 && b / a > 2.0) ? std::sqrt(a * b) : 0.5 * (a + b);
}

}  // namespace

ManifoldCurve trace(Side side, double tau, std::pair<double, double> range, int n_samples, const ProblemSpec& p,
                    double l, const TraceOptions& o)
{
    const auto [lo, hi] = range;
    if (!(lo > 0.0) || !(hi > lo) || n_samples < 2)
        throw DomainError("trace needs 0 < lo < hi and at least two samples");
    o.seed.controls.check();

    std::vector<double> mags;
    for (int i = 0; i < n_samples; ++i)
        mags.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n_samples - 1)));
    if (o.cluster_upper) {
        for (int k = 2; k <= 24; ++k) {
            const double m = hi * (1.0 - std::pow(10.0, -0.5 * k));
            if (m > lo)
                mags.push_back(m);
        }
    }
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());

    const Tracer tracer(side, tau, p, l, o);
    std::map<double, Eval> pts;
    for (auto& e : tracer.run(mags))
        pts.emplace(e.mag, std::move(e));

    ManifoldCurve curve;
    curve.side = side;
    curve.tau = tau;
    curve.l = l;

    // Keep the component connected to the origin; the first failure in order truncates.
    const auto truncate = [&] {
        auto bad = std::find_if(pts.begin(), pts.end(), [](const auto& kv) { return !kv.second.state; });
        if (bad == pts.end())
            return;
        if (bad == pts.begin())
            throw DomainError(fmt::format("section empty: {} fails at the smallest parameter {}", to_string(side),
                                          bad->first));
        double a = std::prev(bad)->first, b = bad->first;
        for (int i = 0; i < o.truncation_bisections && (b - a) > 1e-13 * b; ++i) {
            const double m = 0.5 * (a + b);
            Eval e = tracer.one(m);
            if (e.state) {
                pts.emplace(m, std::move(e));
                a = m;
            } else {
                b = m;
            }
        }
        curve.truncated_at = curve.truncated_at ? std::min(*curve.truncated_at, b) : b;
        for (auto it = pts.upper_bound(a); it != pts.end();) {
            if (it->second.state)
                curve.detached.push_back(branch_sign(side) * it->first);
            it = pts.erase(it);
        }
    };
    truncate();

    while (true) {
        std::vector<double> mids;
        for (auto it = pts.begin(); std::next(it) != pts.end(); ++it) {
            const auto nx = std::next(it);
            const FowlerState& s0 = *it->second.state;
            const FowlerState& s1 = *nx->second.state;
            const double r0 = s0.rho(), r1 = s1.rho();
            const double gap = (r0 > 0.0 && r1 > 0.0) ? std::fabs(wrap_angle(std::atan2(s1.y, s1.x) - std::atan2(s0.y, s0.x))) : 0.0;
            const double chord = std::hypot(s1.x - s0.x, s1.y - s0.y);
            const bool coarse = gap > o.max_angle_gap || chord > o.max_chord * std::max(r0, r1);
            if (coarse && nx->first - it->first > 1e-14 * nx->first)
                mids.push_back(midpoint(it->first, nx->first));
        }
        if (mids.empty())
            break;
        if (pts.size() + mids.size() > o.max_samples) {
            curve.under_resolved = true;
            break;
        }
        for (auto& e : tracer.run(mids))
            pts.emplace(e.mag, std::move(e));
        truncate();
    }

    const double base = asymptotic_tangent(side, p);
    double prev_angle = 0.0, theta = 0.0;
    bool first = true;
    for (const auto& [mag, e] : pts) {
        const FowlerState& s = *e.state;
        const double a = std::atan2(s.y, s.x);
        if (first) {
            theta = a + 2.0 * pi * std::round((base - a) / (2.0 * pi));
            first = false;
        } else {
            theta += wrap_angle(a - prev_angle);
        }
        prev_angle = a;
        curve.samples.push_back({branch_sign(side) * mag, theta, s.rho(), s});
    }
    std::sort(curve.detached.begin(), curve.detached.end(),
              [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    return curve;
}

namespace {

struct Crossing {
    std::size_t iu = 0, is = 0;  // segment indices
    double su = 0.0, ss = 0.0;   // fractions along the segments
};

// Segment intersection in the (Theta, R) plane.
std::optional<std::pair<double, double>> segment_cross(double ax, double ay, double bx, double by, double cx,
                                                       double cy, double dx, double dy)
{
    const double rx = bx - ax, ry = by - ay, sx = dx - cx, sy = dy - cy;
    const double den = rx * sy - ry * sx;
    if (den == 0.0)
        return std::nullopt;
    const double qx = cx - ax, qy = cy - ay;
    const double u = (qx * sy - qy * sx) / den;
    const double v = (qx * ry - qy * rx) / den;
    if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0)
        return std::nullopt;
    return std::pair{u, v};
}

std::vector<Crossing> polyline_crossings(const std::vector<CurveSample>& u, const std::vector<CurveSample>& s,
                                         double shift)
{
    std::vector<Crossing> out;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double ulo = std::min(u[i].theta, u[i + 1].theta), uhi = std::max(u[i].theta, u[i + 1].theta);
        const double rlo = std::min(u[i].R, u[i + 1].R), rhi = std::max(u[i].R, u[i + 1].R);
        for (std::size_t k = 0; k + 1 < s.size(); ++k) {
            const double t0 = s[k].theta - shift, t1 = s[k + 1].theta - shift;
            if (std::max(t0, t1) < ulo || std::min(t0, t1) > uhi)
                continue;
            if (std::max(s[k].R, s[k + 1].R) < rlo || std::min(s[k].R, s[k + 1].R) > rhi)
                continue;
            const auto c = segment_cross(u[i].theta, u[i].R, u[i + 1].theta, u[i + 1].R, t0, s[k].R, t1, s[k + 1].R);
            if (!c)
                continue;
            // a crossing exactly at a shared vertex is reported once
            if (c->first == 1.0 && i + 2 < u.size())
                continue;
            if (c->second == 1.0 && k + 2 < s.size())
                continue;
            out.push_back({i, k, c->first, c->second});
        }
    }
    return out;
}

// Newton on P_u(d) - P_s(L) = 0 with a finite-difference Jacobian.
IntersectionRecord refine(double d, double L, const ProblemSpec& p, double tau, double l, const SeedOptions& o,
                          double tol)
{
    IntersectionRecord rec;
    const auto pu = [&](double dd) { return transport_unstable(dd, tau, p, l, o).state; };
    const auto ps = [&](double LL) { return transport_stable(LL, tau, p, l, o).state; };
    const int sd = d > 0 ? 1 : -1, sl = L > 0 ? 1 : -1;
    double best = INFINITY;
    for (int it = 0; it < 40; ++it) {
        const auto a = pu(d), b = ps(L);
        if (!a || !b)
            break;
        const double fx = a->x - b->x, fy = a->y - b->y;
        const double res = std::hypot(fx, fy);
        if (res < best) {
            best = res;
            rec.d_star = d;
            rec.L_star = L;
            rec.R = 0.5 * (a->rho() + b->rho());
            rec.theta = std::atan2(a->y, a->x);
            rec.residual = res;
        }
        if (res <= tol * std::max(1.0, a->rho())) {
            rec.converged = true;
            break;
        }
        const double hd = 1e-7 * std::fabs(d), hl = 1e-7 * std::fabs(L);
        const auto ap = pu(d + hd), am = pu(d - hd), bp = ps(L + hl), bm = ps(L - hl);
        if (!ap || !am || !bp || !bm)
            break;
        const double j11 = (ap->x - am->x) / (2 * hd), j21 = (ap->y - am->y) / (2 * hd);
        const double j12 = -(bp->x - bm->x) / (2 * hl), j22 = -(bp->y - bm->y) / (2 * hl);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det))
            break;
        double dd = -(j22 * fx - j12 * fy) / det;
        double dl = -(-j21 * fx + j11 * fy) / det;
        // keep the parameters on their branch and the step local
        double damp = 1.0;
        while ((sd * (d + damp * dd) <= 0.0 || sl * (L + damp * dl) <= 0.0 || std::fabs(damp * dd) > 0.5 * std::fabs(d) ||
                std::fabs(damp * dl) > 0.5 * std::fabs(L)) &&
               damp > 1e-6)
            damp *= 0.5;
        d += damp * dd;
        L += damp * dl;
        if (std::fabs(damp * dd) < 1e-15 * std::fabs(d) && std::fabs(damp * dl) < 1e-15 * std::fabs(L))
            break;
    }
    return rec;
}

// First |L| at which the shifted branch angle reaches level, by linear interpolation.
std::optional<double> first_level(const std::vector<CurveSample>& s, double shift, double level)
{
    if (!s.empty() && s[0].theta - shift >= level)
        return std::fabs(s[0].param);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double a = s[k].theta - shift - level, b = s[k + 1].theta - shift - level;
        if (a < 0.0 && b >= 0.0) {
            const double f = a / (a - b);
            return std::fabs(s[k].param) + f * (std::fabs(s[k + 1].param) - std::fabs(s[k].param));
        }
    }
    return std::nullopt;
}

}  // namespace

IntersectionResult intersections(const ManifoldCurve& unstable, const ManifoldCurve& stable_plus,
                                 const ManifoldCurve& stable_minus, int k_max, const ProblemSpec& p,
                                 const SeedOptions& o, double tol)
{
    if (!is_unstable(unstable.side) || stable_plus.side != Side::stable_plus || stable_minus.side != Side::stable_minus)
        throw DomainError("intersections needs an unstable curve and the two stable branches");
    for (const ManifoldCurve* c : {&stable_plus, &stable_minus}) {
        if (std::fabs(c->tau - unstable.tau) > 1e-12)
            throw DomainError(fmt::format("curves at different tau: {} and {}", unstable.tau, c->tau));
        if (c->l != unstable.l)
            throw DomainError(fmt::format("curves in different exponents: {} and {}", unstable.l, c->l));
    }
    IntersectionResult res;
    for (int j = 0; j <= k_max; ++j) {
        const ManifoldCurve& st = j % 2 == 0 ? stable_plus : stable_minus;
        const double shift = 2.0 * pi * (j / 2);
        const auto crossings = polyline_crossings(unstable.samples, st.samples, shift);
        std::vector<IntersectionRecord> recs(crossings.size());
        detail::parallel_for(crossings.size(), [&](std::size_t i) {
            const Crossing& c = crossings[i];
            const auto& u = unstable.samples;
            const auto& s = st.samples;
            const double d0 = u[c.iu].param + c.su * (u[c.iu + 1].param - u[c.iu].param);
            const double L0 = s[c.is].param + c.ss * (s[c.is + 1].param - s[c.is].param);
            recs[i] = refine(d0, L0, p, unstable.tau, unstable.l, o, tol);
            recs[i].j = j;
            const double th_poly = u[c.iu].theta + c.su * (u[c.iu + 1].theta - u[c.iu].theta);
            recs[i].theta += 2.0 * pi * std::round((th_poly - recs[i].theta) / (2.0 * pi));
        });
        std::sort(recs.begin(), recs.end(),
                  [](const auto& a, const auto& b) { return std::fabs(a.d_star) < std::fabs(b.d_star); });
        // Newton may send neighbouring crossings to the same point
        std::vector<IntersectionRecord> uniq;
        for (const auto& r : recs) {
            if (!uniq.empty() && std::fabs(r.d_star - uniq.back().d_star) <= 1e-8 * std::fabs(r.d_star) &&
                std::fabs(r.L_star - uniq.back().L_star) <= 1e-8 * std::fabs(r.L_star))
                continue;
            uniq.push_back(r);
        }
        if (!uniq.empty())
            uniq.front().first_in_d = true;

        BracketCheck bc;
        bc.j = j;
        bc.L_down = j == 0 ? std::optional<double>(0.0) : first_level(st.samples, shift, -pi / 2);
        bc.L_up = first_level(st.samples, shift, pi / 2);
        for (const auto& r : uniq) {
            if (!r.first_in_d)
                continue;
            const double aL = std::fabs(r.L_star);
            if (bc.L_down && !(*bc.L_down < aL)) {
                bc.passed = false;
                bc.detail = fmt::format("|L*| = {} not above L_down = {}", aL, *bc.L_down);
            } else if (bc.L_up && !(aL < *bc.L_up)) {
                bc.passed = false;
                bc.detail = fmt::format("|L*| = {} not below L_up = {}", aL, *bc.L_up);
            } else if (!bc.L_up) {
                bc.detail = "stable branch too short to reach pi/2";
            }
        }
        res.brackets.push_back(bc);
        res.records.insert(res.records.end(), uniq.begin(), uniq.end());
    }
    return res;
}

Bound continuability_bounds(double tau, BoundKind kind, const ProblemSpec& p, double l, int sign,
                            const SeedOptions& o, double cap, double rel)
{
    const int s = sign >= 0 ? 1 : -1;
    const auto survives = [&](double m) {
        const Transport t = kind == BoundKind::regular_side ? transport_unstable(s * m, tau, p, l, o)
                                                            : transport_stable(s * m, tau, p, l, o);
        return t.state.has_value();
    };
    Bound b;
    b.cap = cap;
    double lo = 0.0, hi = 0.0;
    if (survives(1.0)) {
        lo = 1.0;
        for (double m = 2.0; m <= cap; m *= 2.0) {
            if (!survives(m)) {
                hi = m;
                break;
            }
            lo = m;
        }
        if (hi == 0.0) {
            if (!survives(cap)) {
                hi = cap;
            } else {
                b.infinite = true;
                b.value = INFINITY;
                return b;
            }
        }
    } else {
        hi = 1.0;
        for (double m = 0.5; m >= 1e-12; m /= 2.0) {
            if (survives(m)) {
                lo = m;
                break;
            }
            hi = m;
        }
        if (lo == 0.0) {
            b.value = hi;
            return b;
        }
    }
    while (hi - lo > rel * hi) {
        const double m = 0.5 * (lo + hi);
        (survives(m) ? lo : hi) = m;
    }
    b.value = hi;
    return b;
}

double stable_tangent_slope(double tau, const ProblemSpec& p, double l, const SeedOptions& o)
{
    const OriginModel m = origin_model(p, p.l_s, End::future);
    // parameter whose point at tau has size about 1e-6
    const double target = 1e-6;
    SeedOptions so = o;
    so.eps0 = std::min(o.eps0, 1e-2 * target);
    const double L = target * std::exp(-m.lambda_s * tau);
    const Transport t = transport_stable(L, tau, p, l, so);
    if (!t.state)
        throw DomainError("stable tangent: small-L transport failed");
    return t.state->y / t.state->x;
}

}  // namespace hardyflow
