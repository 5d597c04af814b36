#include "hardyflow/dynamics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace hardyflow {

using std::numbers::pi;

std::pair<double, double> vector_field(double t, double x, double y, const ProblemSpec& p, double l)
{
    if (!std::isfinite(t) || !std::isfinite(x) || !std::isfinite(y))
        throw DomainError("vector_field called with non-finite input");
    const FowlerParams fp = fowler_params(p.n, l);
    return {fp.alpha * x + y, -p.h(t) * x + fp.gamma * y - p.nonlinearity->g(x, t, fp.alpha)};
}

std::string to_string(EventKind k)
{
    switch (k) {
    case EventKind::zero_crossing: return "zero-crossing";
    case EventKind::entered_origin_ball: return "entered-origin-ball";
    case EventKind::entered_p_ball: return "entered-P-ball";
    case EventKind::blow_up_abort: return "blow-up-abort";
    }
    return "?";
}

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::reached_t_end: return "reached-t-end";
    case Termination::converged_origin: return "converged-origin";
    case Termination::converged_p_plus: return "converged-P-plus";
    case Termination::converged_p_minus: return "converged-P-minus";
    case Termination::blow_up: return "blow-up";
    case Termination::step_failure: return "step-failure";
    }
    return "?";
}

std::string to_string(Stability s)
{
    switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::center: return "center";
    case Stability::saddle: return "saddle";
    }
    return "?";
}

void Controls::check() const
{
    if (!(rel_tol >= 1e-13 && rel_tol <= 1e-3))
        throw std::invalid_argument(fmt::format("rel_tol = {} outside [1e-13, 1e-3]", rel_tol));
    if (!(abs_tol > 0.0) || !(initial_step > 0.0) || !(max_step > 0.0) || !(min_step > 0.0))
        throw std::invalid_argument("tolerances and step bounds must be positive");
    if (!(rho_max > 1.0) || blowup_steps < 1 || !(speed_cap > 0.0))
        throw std::invalid_argument("blow-up threshold must exceed 1 and need at least one step");
    if (!(origin_radius > 0.0) || !(origin_angle_tol > 0.0) || !(origin_dwell >= 0.0))
        throw std::invalid_argument("origin acceptance parameters must be positive");
    if (!(p_radius > 0.0) || !(p_dwell >= 0.0))
        throw std::invalid_argument("P acceptance parameters must be positive");
    if (!(max_angle_step > 0.0 && max_angle_step < pi / 2))
        throw std::invalid_argument("max_angle_step must lie in (0, pi/2)");
}

OriginModel origin_model(const ProblemSpec& p, double l, End end)
{
    const FowlerParams fp = fowler_params(p.n, l);
    OriginModel m;
    m.alpha = fp.alpha;
    m.gamma = fp.gamma;
    m.h = hardy_limit(p, end);
    m.kappa = kappa(p.n, m.h);
    m.lambda_s = fp.gamma + m.kappa;
    m.lambda_u = fp.alpha - m.kappa;
    m.slope_s = -(p.n - 2.0 - m.kappa);
    m.slope_u = -m.kappa;
    m.saddle = m.lambda_s < 0.0 && m.lambda_u > 0.0;
    return m;
}

std::optional<double> p_location(const ProblemSpec& p, double l, End end)
{
    if (!autonomous_limit_exists(p, l, end))
        return std::nullopt;
    const FowlerParams fp = fowler_params(p.n, l);
    const double target = fp.alpha * (p.n - 2.0 - fp.alpha) - hardy_limit(p, end);
    if (!(target > 0.0) || !(eval_g_limit(1.0, p, l, end) > 0.0))
        return std::nullopt;
    const auto fn = [&](double x) { return eval_g_limit(x, p, l, end) / x - target; };
    double lo = 1.0, hi = 1.0;
    while (fn(lo) > 0.0 && lo > 1e-12)
        lo /= 2.0;
    while (fn(hi) < 0.0 && hi < 1e12)
        hi *= 2.0;
    if (!(fn(lo) <= 0.0 && fn(hi) >= 0.0))
        return std::nullopt;
    if (fn(lo) == 0.0)
        return lo;
    if (fn(hi) == 0.0)
        return hi;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(fn, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

namespace {

Stability classify_linear(double tr, double det)
{
    if (det < 0.0)
        return Stability::saddle;
    if (std::fabs(tr) <= 1e-12 * (1.0 + std::fabs(det)))
        return Stability::center;
    return tr < 0.0 ? Stability::stable : Stability::unstable;
}

std::array<std::complex<double>, 2> eigen2(double tr, double det)
{
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
    return {(tr - disc) / 2.0, (tr + disc) / 2.0};
}

}  // namespace

std::vector<FixedPointInfo> fixed_points(const ProblemSpec& p, double l, End end)
{
    if (!autonomous_limit_exists(p, l, end))
        throw std::runtime_error(end == End::past ? "Gu unavailable: no autonomous limit as t -> -inf"
                                                  : "Gs unavailable: no autonomous limit as t -> +inf");
    const FowlerParams fp = fowler_params(p.n, l);
    const double h = hardy_limit(p, end);
    std::vector<FixedPointInfo> out;
    {
        FixedPointInfo o;
        o.name = "O";
        const double tr = fp.alpha + fp.gamma, det = fp.alpha * fp.gamma + h;
        o.stability = classify_linear(tr, det);
        o.eigenvalues = eigen2(tr, det);
        out.push_back(o);
    }
    if (const auto px = p_location(p, l, end)) {
        const double dx = 1e-5 * *px;
        const double gp = (eval_g_limit(*px + dx, p, l, end) - eval_g_limit(*px - dx, p, l, end)) / (2.0 * dx);
        const double tr = fp.alpha + fp.gamma, det = fp.alpha * fp.gamma + h + gp;
        for (int s : {1, -1}) {
            FixedPointInfo q;
            q.name = s > 0 ? "P+" : "P-";
            q.x = s * *px;
            q.y = -fp.alpha * q.x;
            q.stability = classify_linear(tr, det);
            q.eigenvalues = eigen2(tr, det);
            out.push_back(q);
        }
    }
    return out;
}

double critical_energy(double x, double y, double t, const ProblemSpec& p)
{
    const FowlerParams fp = fowler_params(p.n, p.l_u);
    if (std::fabs(fp.alpha + fp.gamma) > 1e-12)
        throw DomainError(fmt::format("critical energy needs l = 2n/(n-2); got l = {}", p.l_u));
    if (!p.hardy->is_constant())
        throw DomainError("critical energy needs a constant Hardy coefficient");
    const double a = fp.alpha, eta = p.eta();
    const double s = y + a * x;
    return 0.5 * s * s - 0.5 * (a * a - eta) * x * x + eval_g_primitive(x, t, p, p.l_u);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) on the augmented state (t, x, y) in a pseudo-time s.
// dt/ds = sigma * w, d(x,y)/ds = sigma * w * F with w = 1 unless |F| exceeds
// speed_cap * (1 + rho), in which case the speed is capped; in the uncapped
// regime t advances exactly with s.

namespace {

using Vec = std::array<double, 3>;

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Rhs {
    const ProblemSpec& p;
    double alpha, gamma;
    double sigma;
    double cap;

    Vec operator()(const Vec& Y) const
    {
        const double t = Y[0], x = Y[1], y = Y[2];
        const double fx = alpha * x + y;
        const double fy = -p.h(t) * x + gamma * y - p.nonlinearity->g(x, t, alpha);
        const double speed = std::hypot(fx, fy);
        const double limit = cap * (1.0 + std::hypot(x, y));
        const double w = speed > limit ? limit / speed : 1.0;
        return {sigma * w, sigma * w * fx, sigma * w * fy};
    }
};

struct Dense {
    Vec r1, r2, r3, r4, r5;
    Vec at(double th) const
    {
        const double th1 = 1.0 - th;
        Vec o;
        for (int i = 0; i < 3; ++i)
            o[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return o;
    }
};

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms)
{
    Vec o = y;
    for (const auto& [c, k] : terms)
        for (int i = 0; i < 3; ++i)
            o[i] += h * c * (*k)[i];
    return o;
}

bool finite(const Vec& v)
{
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// Root of fn(theta) on [0, hi] given a sign change between the ends.
template <class F>
double bisect_theta(F&& fn, double hi)
{
    double lo = 0.0;
    double flo = fn(lo);
    for (int i = 0; i < 80 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double angle_distance_mod_pi(double a, double b)
{
    return std::fabs(std::remainder(a - b, pi));
}

}  // namespace

Trajectory integrate(const FowlerState& start, double t_end, const ProblemSpec& p, const Controls& c)
{
    c.check();
    if (!std::isfinite(start.t) || !std::isfinite(start.x) || !std::isfinite(start.y) || !std::isfinite(t_end))
        throw DomainError("integrate needs finite start state and end time");
    const double l = start.l;
    const FowlerParams fp = fowler_params(p.n, l);
    Trajectory tr;
    tr.states.push_back(start);
    if (t_end == start.t)
        return tr;
    const double sigma = t_end > start.t ? 1.0 : -1.0;
    const End end = sigma > 0 ? End::future : End::past;

    // acceptance models
    bool origin_on = c.detect_origin;
    OriginModel om;
    double target_angle = 0.0;
    if (origin_on) {
        try {
            om = origin_model(p, l, end);
            origin_on = om.saddle;
            target_angle = std::atan(sigma > 0 ? om.slope_s : om.slope_u);
        } catch (const DomainError&) {
            origin_on = false;
        }
    }
    std::optional<std::pair<double, double>> pplus;
    if (c.detect_p && std::fabs(fp.alpha + fp.gamma) > 1e-12) {
        if (const auto px = p_location(p, l, end))
            pplus = std::pair{*px, -fp.alpha * *px};
    }

    const Rhs rhs{p, fp.alpha, fp.gamma, sigma, c.speed_cap};
    Vec Y{start.t, start.x, start.y};
    Vec k1 = rhs(Y);
    double h = c.initial_step;
    double phi = start.phi;
    double prev_angle = std::atan2(start.y, start.x);
    int last_sign = start.x > 0 ? 1 : (start.x < 0 ? -1 : 0);

    bool in_origin_ball = std::hypot(Y[1], Y[2]) < c.origin_radius;
    bool in_p_ball = false;
    double cone_since = NAN;  // time of cone entry
    std::size_t cone_first = 0;
    bool origin_accepted = false;
    double p_since = NAN;
    int p_side = 0;
    std::optional<double> rho_cross_t;
    std::size_t steps = 0;

    const auto dist_p = [&](const Vec& v, int s) {
        return std::hypot(v[1] - s * pplus->first, v[2] - s * pplus->second);
    };

    while (true) {
        if (++steps > c.max_steps) {
            tr.termination = Termination::step_failure;
            break;
        }
        const double remaining = std::fabs(t_end - Y[0]);
        bool landing = false;
        if (std::fabs(k1[0]) == 1.0 && h >= remaining) {
            h = remaining;
            landing = true;
        }

        const Vec k2 = rhs(axpy(Y, h, {{a21, &k1}}));
        const Vec k3 = rhs(axpy(Y, h, {{a31, &k1}, {a32, &k2}}));
        const Vec k4 = rhs(axpy(Y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec k5 = rhs(axpy(Y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec k6 = rhs(axpy(Y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        Vec Yn = axpy(Y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const Vec k7 = rhs(Yn);

        double err = INFINITY;
        if (finite(Yn) && finite(k7)) {
            Vec e;
            for (int i = 0; i < 3; ++i)
                e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale = c.rel_tol * std::max(std::hypot(Y[1], Y[2]), std::hypot(Yn[1], Yn[2]));
            const double ex = std::hypot(e[1], e[2]);
            const double exy = ex == 0.0 ? 0.0 : ex / std::max(scale, DBL_MIN);
            const double et = std::fabs(e[0]) / (c.rel_tol * std::max(1.0, std::fabs(Yn[0])));
            err = std::max(exy, et);
        }
        if (!(err <= 1.0)) {
            h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
            ++tr.rejected_steps;
            if (h < c.min_step) {
                tr.termination = Termination::step_failure;
                break;
            }
            continue;
        }
        const double new_angle = std::atan2(Yn[2], Yn[1]);
        const bool both_off_origin = (Y[1] != 0.0 || Y[2] != 0.0) && (Yn[1] != 0.0 || Yn[2] != 0.0);
        const double dphi = both_off_origin ? wrap_angle(new_angle - prev_angle) : 0.0;
        if (std::fabs(dphi) > c.max_angle_step) {
            h *= 0.5;
            ++tr.rejected_steps;
            if (h < c.min_step) {
                tr.termination = Termination::step_failure;
                break;
            }
            continue;
        }

        // accepted step
        Dense dense;
        dense.r1 = Y;
        for (int i = 0; i < 3; ++i) {
            dense.r2[i] = Yn[i] - Y[i];
            dense.r3[i] = h * k1[i] - dense.r2[i];
            dense.r4[i] = dense.r2[i] - h * k7[i] - dense.r3[i];
            dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        double th_max = 1.0;
        bool finished = false;
        if (landing) {
            Yn[0] = t_end;
            finished = true;
        } else if (sigma * (Yn[0] - t_end) >= 0.0) {
            th_max = bisect_theta([&](double th) { return sigma * (dense.at(th)[0] - t_end); }, 1.0);
            Yn = dense.at(th_max);
            Yn[0] = t_end;
            finished = true;
        }

        // zero crossings of x
        const int new_sign = Yn[1] > 0 ? 1 : (Yn[1] < 0 ? -1 : 0);
        if (new_sign != 0 && last_sign != 0 && new_sign != last_sign) {
            double tt = Y[0], xx = Y[1], yy = Y[2];
            if (Y[1] != 0.0) {
                const double th = bisect_theta([&](double s) { return dense.at(s)[1]; }, th_max);
                const Vec v = dense.at(th);
                tt = v[0];
                xx = v[1];
                yy = v[2];
            }
            tr.events.push_back({tt, EventKind::zero_crossing, xx, yy});
            ++tr.zero_count;
        }
        if (new_sign != 0)
            last_sign = new_sign;

        const double rho_old = std::hypot(Y[1], Y[2]);
        const double rho_new = std::hypot(Yn[1], Yn[2]);
        if (rho_old <= c.rho_max && rho_new > c.rho_max) {
            const double th = bisect_theta(
                [&](double s) {
                    const Vec v = dense.at(s);
                    return std::hypot(v[1], v[2]) - c.rho_max;
                },
                th_max);
            rho_cross_t = dense.at(th)[0];
        }
        if (!in_origin_ball && rho_new < c.origin_radius) {
            const double th = bisect_theta(
                [&](double s) {
                    const Vec v = dense.at(s);
                    return std::hypot(v[1], v[2]) - c.origin_radius;
                },
                th_max);
            const Vec v = dense.at(th);
            tr.events.push_back({v[0], EventKind::entered_origin_ball, v[1], v[2]});
        }
        in_origin_ball = rho_new < c.origin_radius;
        if (pplus) {
            for (int s : {1, -1}) {
                if (!in_p_ball && dist_p(Yn, s) < c.p_radius) {
                    const double th = bisect_theta([&](double q) { return dist_p(dense.at(q), s) - c.p_radius; }, th_max);
                    const Vec v = dense.at(th);
                    tr.events.push_back({v[0], EventKind::entered_p_ball, v[1], v[2]});
                }
            }
            in_p_ball = dist_p(Yn, 1) < c.p_radius || dist_p(Yn, -1) < c.p_radius;
        }

        phi += dphi;
        prev_angle = new_angle;
        Y = Yn;
        tr.states.push_back({Y[0], Y[1], Y[2], l, phi});
        const std::size_t idx = tr.states.size() - 1;

        // blow-up
        if (rho_new > c.rho_max && idx >= static_cast<std::size_t>(c.blowup_steps)) {
            bool growing = true;
            for (int j = 0; j < c.blowup_steps; ++j)
                growing = growing && tr.states[idx - j].rho() > tr.states[idx - j - 1].rho();
            // exponential growth of a linear flow is not an escape
            const auto [fx, fy] = vector_field(Y[0], Y[1], Y[2], p, l);
            const double rate = std::fabs(Y[1] * fx + Y[2] * fy) / (rho_new * rho_new);
            const double linear = std::fabs(fp.alpha) + std::fabs(fp.gamma) + std::fabs(p.h(Y[0])) + 1.0;
            if (growing && rate > 2.0 * linear) {
                tr.termination = Termination::blow_up;
                tr.blow_up_time = rho_cross_t.value_or(Y[0]);
                tr.events.push_back({*tr.blow_up_time, EventKind::blow_up_abort, Y[1], Y[2]});
                break;
            }
        }

        // origin dwell
        if (origin_on) {
            const bool cone = rho_new < c.origin_radius && rho_new > 0.0 &&
                              angle_distance_mod_pi(new_angle, target_angle) < c.origin_angle_tol;
            if (cone) {
                if (std::isnan(cone_since)) {
                    cone_since = Y[0];
                    cone_first = idx;
                }
                if (std::fabs(Y[0] - cone_since) >= c.origin_dwell)
                    origin_accepted = true;
            } else {
                if (origin_accepted) {
                    tr.termination = Termination::converged_origin;
                    tr.dwell = std::pair{cone_first, idx - 1};
                    break;
                }
                cone_since = NAN;
            }
            if (origin_accepted && (rho_new < 1e-200 || finished)) {
                tr.termination = Termination::converged_origin;
                tr.dwell = std::pair{cone_first, idx};
                break;
            }
        }

        // P dwell
        if (pplus) {
            int side = 0;
            if (dist_p(Y, 1) < c.p_radius)
                side = 1;
            else if (dist_p(Y, -1) < c.p_radius)
                side = -1;
            if (side != 0 && side == p_side) {
                if (std::fabs(Y[0] - p_since) >= c.p_dwell) {
                    tr.termination = side > 0 ? Termination::converged_p_plus : Termination::converged_p_minus;
                    break;
                }
            } else if (side != 0) {
                p_side = side;
                p_since = Y[0];
            } else {
                p_side = 0;
                p_since = NAN;
            }
        }

        if (finished) {
            tr.termination = Termination::reached_t_end;
            break;
        }
        k1 = k7;
        const double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        h = std::min(h * fac, c.max_step);
    }
    return tr;
}

// ---------------------------------------------------------------------------

bool RegionReport::passed() const
{
    return std::all_of(edges.begin(), edges.end(), [](const EdgeReport& e) { return e.passed; });
}

RegionReport verify_invariant_region(const Triangle& tri, std::pair<double, double> t_range,
                                     const std::array<EdgeSide, 3>& sides, const ProblemSpec& p, double l,
                                     int edge_samples, int time_samples)
{
    const auto& [O, A, B] = tri.v;
    const double area = 0.5 * std::fabs((A.first - O.first) * (B.second - O.second) -
                                        (B.first - O.first) * (A.second - O.second));
    const double span = std::max({std::hypot(A.first - O.first, A.second - O.second),
                                  std::hypot(B.first - O.first, B.second - O.second),
                                  std::hypot(A.first - B.first, A.second - B.second)});
    if (!(area > 1e-12 * span * span))
        throw DomainError("degenerate triangle");
    if (!std::isfinite(t_range.first) || !std::isfinite(t_range.second))
        throw DomainError("time range must be finite");
    struct EdgeDef {
        const char* name;
        std::pair<double, double> p, q, opposite;
    };
    const std::array<EdgeDef, 3> defs{{{"o", A, B, O}, {"a", O, B, A}, {"b", O, A, B}}};
    RegionReport rep;
    for (std::size_t e = 0; e < 3; ++e) {
        const auto& d = defs[e];
        EdgeReport& er = rep.edges[e];
        er.name = d.name;
        er.side = sides[e];
        if (sides[e] == EdgeSide::unchecked)
            continue;
        double nx = d.q.second - d.p.second, ny = -(d.q.first - d.p.first);
        if (nx * (d.opposite.first - d.p.first) + ny * (d.opposite.second - d.p.second) > 0.0) {
            nx = -nx;
            ny = -ny;
        }
        for (int it = 0; it < time_samples; ++it) {
            const double t = time_samples == 1 ? t_range.first
                                               : t_range.first + (t_range.second - t_range.first) * it / (time_samples - 1);
            for (int k = 1; k <= edge_samples; ++k) {
                const double s = static_cast<double>(k) / (edge_samples + 1);
                const double x = d.p.first + s * (d.q.first - d.p.first);
                const double y = d.p.second + s * (d.q.second - d.p.second);
                const auto [fx, fy] = vector_field(t, x, y, p, l);
                const double dot = fx * nx + fy * ny;
                ++er.samples;
                const bool ok = sides[e] == EdgeSide::outward ? dot > 0.0 : dot < 0.0;
                if (!ok && er.passed) {
                    er.passed = false;
                    er.first_violation = fmt::format("t={}, (x,y)=({}, {}), F.n={}", t, x, y, dot);
                }
            }
        }
    }
    return rep;
}

Triangle stable_side_triangle(const ProblemSpec& p, double tau, double span)
{
    const double hc = hardy_critical(p.n);
    const FowlerParams fp = fowler_params(p.n, p.l_s);
    const double half = (p.n - 2.0) / 2.0;
    const auto ok = [&](double delta) {
        for (int i = 0; i <= 200; ++i) {
            const double t = tau + span * i / 200.0;
            const double h = p.h(t);
            for (int k = 1; k <= 64; ++k) {
                for (int s : {1, -1}) {
                    const double x = s * delta * k / 64.0;
                    const double gx = eval_g(x, t, p, p.l_s) / x;
                    if (!(gx < hc - h) || !(half * std::fabs(fp.gamma) - h - gx > 0.0))
                        return false;
                }
            }
        }
        return true;
    };
    double lo = 0.0, hi = 1.0;
    if (ok(hi)) {
        lo = hi;
        while (hi < 1e3 && ok(hi * 2.0)) {
            hi *= 2.0;
            lo = hi;
        }
        hi *= 2.0;
    } else {
        while (!ok(hi) && hi > 1e-8)
            hi /= 2.0;
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    const double d = 0.9 * lo;
    return Triangle{{{{0.0, 0.0}, {d, -half * d}, {0.0, -half * d}}}};
}

Triangle unstable_side_triangle(const ProblemSpec& p, double xi, double tau, double span)
{
    double sup = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double t = tau - span * i / 400.0;
        const double h = p.h(t);
        for (int k = 1; k <= 64; ++k) {
            const double x = xi * k / 64.0;
            sup = std::max(sup, -h - eval_g(x, t, p, p.l_u) / x);
        }
    }
    const double m = std::sqrt(sup) * (1.0 + 1e-6) + 1e-9;
    const double half = (p.n - 2.0) / 2.0;
    return Triangle{{{{0.0, 0.0}, {xi, m * xi}, {xi, -half * xi}}}};
}

}  // namespace hardyflow
