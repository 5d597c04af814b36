#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hardyflow/dynamics.hpp"
#include "hardyflow/manifolds.hpp"

using namespace hardyflow;
using doctest::Approx;

namespace {

ProblemSpec power_problem(double q, double coef)
{
    auto f = make_power_nonlinearity({{1.0, q, 0.0}}, make_constant_weight(coef));
    return make_problem(4, make_constant_hardy(0.0), f, q, q, 0.0, "power");
}

Controls plain()
{
    Controls c;
    c.detect_origin = false;
    c.detect_p = false;
    return c;
}

long rotation_index(double phi)
{
    return static_cast<long>(std::floor(0.5 + phi / std::numbers::pi));
}

}  // namespace

TEST_CASE("vector field examples")
{
    const auto at = aubin_talenti_problem();
    auto [dx, dy] = vector_field(0.3, 0.0, 0.0, at, 4.0);
    CHECK(dx == 0.0);
    CHECK(dy == 0.0);
    std::tie(dx, dy) = vector_field(0.0, 1.0, -1.0, at, 4.0);
    CHECK(dx == Approx(0.0).scale(1.0));
    CHECK(dy == Approx(0.0).scale(1.0));
    const auto p = default_problem();
    for (double y : {-2.0, -0.1, 0.5, 3.0}) {
        std::tie(dx, dy) = vector_field(0.7, 0.0, y, p, 6.0);
        CHECK(dx * y > 0.0);
    }
    CHECK_THROWS(vector_field(0.0, NAN, 0.0, p, 6.0));
}

TEST_CASE("linear fast decay ray")
{
    auto p = power_problem(6.0, 0.0);
    const double l = 6.0;
    const FowlerState s{0.0, 1.0, -2.0, l, std::atan2(-2.0, 1.0)};
    const auto tr = integrate(s, 60.0, p, Controls{});
    CHECK(tr.termination == Termination::converged_origin);
    CHECK(tr.zero_count == 0);
    const auto& e = tr.states.back();
    CHECK(e.x == Approx(std::exp(fowler_params(4, l).gamma * e.t)).epsilon(1e-6));
}

TEST_CASE("origin is a fixed point of integrate")
{
    const auto p = default_problem();
    const auto tr = integrate({-3.0, 0.0, 0.0, 6.0, 0.0}, 3.0, p, plain());
    for (const auto& s : tr.states) {
        CHECK(s.x == 0.0);
        CHECK(s.y == 0.0);
    }
}

TEST_CASE("energy conservation at the critical exponent")
{
    const auto at = aubin_talenti_problem();
    CHECK(critical_energy(0.0, 0.0, 0.0, at) == 0.0);
    CHECK(critical_energy(1.0, -1.0, 0.0, at) == Approx(-0.25));
    double drift[2];
    int i = 0;
    for (double rt : {1e-11, 5e-12}) {
        Controls c = plain();
        c.rel_tol = rt;
        const FowlerState s0{-20.0, 0.5, -0.3, 4.0, std::atan2(-0.3, 0.5)};
        const auto tr = integrate(s0, 20.0, at, c);
        REQUIRE(tr.termination == Termination::reached_t_end);
        const double e0 = critical_energy(s0.x, s0.y, s0.t, at);
        double m = 0.0;
        for (const auto& s : tr.states)
            m = std::max(m, std::fabs(critical_energy(s.x, s.y, s.t, at) - e0) / std::max(1.0, std::fabs(e0)));
        drift[i++] = m;
    }
    CHECK(drift[0] < 1e-8);
    CHECK(drift[1] <= drift[0]);
    CHECK_THROWS_AS(critical_energy(0.1, 0.1, 0.0, default_problem()), DomainError);
}

TEST_CASE("fixed points")
{
    const auto p6 = power_problem(6.0, 1.0);
    const auto fp = fixed_points(p6, 6.0, End::past);
    REQUIRE(fp.size() == 3);
    CHECK(fp[0].name == "O");
    CHECK(fp[0].stability == Stability::saddle);
    const auto& P = fp[1];
    CHECK(P.x == Approx(std::pow(0.75, 0.25)));
    CHECK(P.x == Approx(0.930605).epsilon(1e-6));
    CHECK(P.y == Approx(-0.465303).epsilon(1e-6));
    CHECK(P.stability == Stability::stable);
    CHECK(fp[2].x == Approx(-P.x));

    const auto at = fixed_points(aubin_talenti_problem(), 4.0, End::past);
    REQUIRE(at.size() == 3);
    CHECK(at[1].x == Approx(1.0));
    CHECK(at[1].stability == Stability::center);
    CHECK(at[0].eigenvalues[0].real() * at[0].eigenvalues[1].real() < 0.0);

    const auto neg = fixed_points(power_problem(6.0, -1.0), 6.0, End::past);
    CHECK(neg.size() == 1);

    const auto d = default_problem();
    CHECK(fixed_points(d, 6.0, End::past).size() == 1);
    CHECK(fixed_points(d, 6.0, End::future).size() == 3);
    CHECK(p_location(d, 6.0, End::future).value() == Approx(std::pow(0.75, 0.25)));
}

TEST_CASE("origin model")
{
    auto p = make_problem(4, make_constant_hardy(0.75), default_problem().nonlinearity, 5.0, 5.0, 0.0);
    const auto m = origin_model(p, 5.0, End::past);
    CHECK(m.kappa == Approx(0.5));
    CHECK(m.lambda_u == Approx(2.0 / 3.0 - 0.5));
    CHECK(m.slope_u == Approx(-0.5));
    CHECK(m.saddle);
}

TEST_CASE("zero events and rotation monotonicity")
{
    const auto p = default_problem();
    for (double d : {1.3, 1.5, 1.6}) {
        const auto s = seed_unstable(d, p, p.l_u);
        auto c = transport_controls();
        const auto tr = integrate(s, 8.0, p, c);
        int zeros = 0;
        for (const auto& e : tr.events)
            if (e.kind == EventKind::zero_crossing) {
                ++zeros;
                CHECK(std::fabs(e.x) < 1e-9);
                CHECK(e.y != 0.0);
            }
        CHECK(zeros == tr.zero_count);
        for (std::size_t i = 1; i < tr.states.size(); ++i)
            CHECK(rotation_index(tr.states[i].phi) <= rotation_index(tr.states[i - 1].phi));
    }
}

TEST_CASE("blow-up threshold insensitivity")
{
    const auto p = default_problem();
    for (double d : {3.0, 10.0}) {
        const auto s = seed_unstable(d, p, p.l_u);
        Controls c = transport_controls();
        const auto a = integrate(s, 10.0, p, c);
        c.rho_max /= 2;
        const auto b = integrate(s, 10.0, p, c);
        REQUIRE(a.termination == Termination::blow_up);
        REQUIRE(b.termination == Termination::blow_up);
        CHECK(std::fabs(*a.blow_up_time - *b.blow_up_time) < 0.01 * std::max(1.0, std::fabs(*a.blow_up_time)));
    }
}

TEST_CASE("backward integration")
{
    const auto at = aubin_talenti_problem();
    const FowlerState s{0.0, 0.8, -0.2, 4.0, std::atan2(-0.2, 0.8)};
    const auto f = integrate(s, 3.0, at, plain());
    const auto b = integrate(f.states.back(), 0.0, at, plain());
    CHECK(b.states.back().t == Approx(0.0));
    CHECK(b.states.back().x == Approx(s.x).epsilon(1e-7));
    CHECK(b.states.back().y == Approx(s.y).epsilon(1e-7));
}

TEST_CASE("switching the exponent commutes with the flow")
{
    const auto p = default_problem();
    const FowlerState s{-1.0, 0.4, 0.1, 6.0, std::atan2(0.1, 0.4)};
    const auto a = integrate(s, 1.0, p, plain()).states.back();
    const auto b = integrate(switch_l(s, 4.0), 1.0, p, plain()).states.back();
    const auto a4 = switch_l(a, 4.0);
    CHECK(b.x == Approx(a4.x).epsilon(1e-8));
    CHECK(b.y == Approx(a4.y).epsilon(1e-8));
}

TEST_CASE("invariant regions")
{
    const auto p = default_problem();
    const auto tri = stable_side_triangle(p, 0.0);
    const std::array<EdgeSide, 3> sides{EdgeSide::inward, EdgeSide::outward, EdgeSide::outward};
    const auto ok = verify_invariant_region(tri, {0.0, 40.0}, sides, p, p.l_s);
    CHECK(ok.passed());
    const std::array<EdgeSide, 3> flipped{EdgeSide::outward, EdgeSide::inward, EdgeSide::inward};
    const auto bad = verify_invariant_region(tri, {0.0, 40.0}, flipped, p, p.l_s);
    for (const auto& e : bad.edges) {
        CHECK_FALSE(e.passed);
        CHECK(e.first_violation.rfind("t=0,", 0) == 0);
    }
    const auto wu = unstable_side_triangle(p, 1.0, 0.0);
    const auto r = verify_invariant_region(wu, {-40.0, 0.0}, {EdgeSide::unchecked, EdgeSide::inward, EdgeSide::inward},
                                           p, p.l_u);
    CHECK(r.passed());
    const Triangle flat{{{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}}};
    CHECK_THROWS_AS(verify_invariant_region(flat, {0.0, 1.0}, sides, p, 6.0), DomainError);
}

TEST_CASE("controls ranges")
{
    Controls c;
    c.rel_tol = 1e-2;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
    c.rel_tol = 1e-14;
    CHECK_THROWS_AS(c.check(), std::invalid_argument);
}
