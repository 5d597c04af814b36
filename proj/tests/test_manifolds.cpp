#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hardyflow/manifolds.hpp"

using namespace hardyflow;
using doctest::Approx;

namespace {

ProblemSpec linear_problem()
{
    auto f = make_power_nonlinearity({{1.0, 6.0, 0.0}}, make_constant_weight(0.0));
    return make_problem(4, make_constant_hardy(0.0), f, 6.0, 6.0, 0.0, "linear");
}

}  // namespace

TEST_CASE("unstable seed")
{
    auto p = make_problem(4, make_constant_hardy(0.75), default_problem().nonlinearity, 5.0, 5.0, 0.0);
    const auto s = seed_unstable(1.0, p, 5.0);
    CHECK(s.t == Approx(6.0 * std::log(1e-8)));
    CHECK(s.t == Approx(-110.52).epsilon(1e-4));
    CHECK(s.y / s.x == Approx(-0.5));
    CHECK(s.x > 0.0);

    const auto d = default_problem();
    const auto a = seed_unstable(1.3, d, 6.0);
    const auto b = seed_unstable(-1.3, d, 6.0);
    CHECK(a.y == 0.0);
    CHECK(b.t == a.t);
    CHECK(b.x == -a.x);
    CHECK(b.y == -a.y);
    const auto z = seed_unstable(0.0, d, 6.0);
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);
}

TEST_CASE("stable seed")
{
    const auto d = default_problem();
    const auto s = seed_stable(1.0, d, 6.0);
    CHECK(s.t == Approx(std::log(1e-8) / -1.5));
    CHECK(s.t == Approx(12.28).epsilon(1e-3));
    CHECK(s.y / s.x == Approx(-2.0));
    const auto m = seed_stable(-1.0, d, 6.0);
    CHECK(m.x == -s.x);
    CHECK(m.y == -s.y);
    CHECK(seed_stable(0.0, d, 6.0).x == 0.0);
}

TEST_CASE("seeding outside the saddle window throws")
{
    auto p = make_problem(4, make_constant_hardy(0.75), default_problem().nonlinearity, 3.0, 3.0, 0.0);
    CHECK_THROWS_AS(seed_unstable(1.0, p, 3.0), DomainError);
}

TEST_CASE("richardson gate")
{
    const auto d = default_problem();
    CHECK(richardson_check(Side::unstable_plus, 1.2, 0.0, d, 6.0).passed);
    CHECK(richardson_check(Side::stable_plus, 2.0, 0.0, d, 6.0).passed);
}

TEST_CASE("stable curve spirals")
{
    const auto d = default_problem();
    const auto c = trace(Side::stable_plus, 0.0, {1e-3, 1e4}, 64, d, 6.0);
    double lo = 1e9, hi = -1e9;
    for (const auto& s : c.samples) {
        lo = std::min(lo, s.theta);
        hi = std::max(hi, s.theta);
    }
    CHECK(hi - lo > 4 * std::numbers::pi);
    CHECK_FALSE(c.truncated_at);
    for (std::size_t i = 1; i < c.samples.size(); ++i)
        CHECK(c.samples[i].theta >= c.samples[i - 1].theta - 1e-9);
}

TEST_CASE("unstable curve stays in its sector")
{
    const auto d = default_problem();
    const auto c = trace(Side::unstable_plus, 0.0, {1e-3, 1.7}, 64, d, 6.0);
    for (const auto& s : c.samples) {
        CHECK(s.theta > -std::atan(1.0));
        CHECK(s.theta < std::numbers::pi / 2);
    }
    CHECK(c.samples.front().theta == Approx(asymptotic_tangent(Side::unstable_plus, d)).scale(1.0).epsilon(1e-3));
}

TEST_CASE("truncation at blow-up")
{
    const auto d = default_problem();
    const auto c = trace(Side::unstable_plus, 0.0, {1e-2, 10.0}, 48, d, 6.0);
    REQUIRE(c.truncated_at);
    const auto b = continuability_bounds(0.0, BoundKind::regular_side, d, 6.0);
    REQUIRE_FALSE(b.infinite);
    CHECK(*c.truncated_at == Approx(b.value).epsilon(1e-4));
    for (const auto& s : c.samples)
        CHECK(s.param < *c.truncated_at);
    CHECK_THROWS_AS(trace(Side::unstable_plus, 0.0, {5.0, 10.0}, 8, d, 6.0), DomainError);
}

TEST_CASE("continuability bounds")
{
    const auto d = default_problem();
    CHECK(continuability_bounds(0.0, BoundKind::fast_decay_side, d, 6.0).infinite);
    const auto lin = linear_problem();
    CHECK(continuability_bounds(0.0, BoundKind::regular_side, lin, 6.0).infinite);
    CHECK(continuability_bounds(0.0, BoundKind::fast_decay_side, lin, 6.0).infinite);
    const auto b = continuability_bounds(0.0, BoundKind::regular_side, d, 6.0);
    CHECK(b.value > 1.0);
    CHECK(b.value < 3.0);
}

TEST_CASE("stable tangent is steeper than the wu triangle edge")
{
    const auto d = default_problem();
    CHECK(stable_tangent_slope(0.0, d, 6.0) < -(d.n - 2) / 2.0);
}

TEST_CASE("angles of both families agree")
{
    // along the unstable curve the angle travelled by a trajectory equals Theta up to pi
    const auto d = default_problem();
    const auto c = trace(Side::unstable_plus, 0.0, {1e-2, 1.7}, 24, d, 6.0);
    for (const auto& s : c.samples)
        CHECK(std::fabs(s.state.phi - s.theta) < std::numbers::pi);
}

TEST_CASE("intersections")
{
    const auto d = default_problem();
    const double tau = 0.0;
    const auto u = trace(Side::unstable_plus, tau, {1e-4, 1.74}, 96, d, 6.0, {.cluster_upper = true});
    const auto sp = trace(Side::stable_plus, tau, {1e-4, 1e4}, 96, d, 6.0);
    const auto sm = trace(Side::stable_minus, tau, {1e-4, 1e4}, 96, d, 6.0);
    const auto res = intersections(u, sp, sm, 2, d);
    std::vector<double> first(3, 0.0);
    for (const auto& r : res.records)
        if (r.first_in_d) {
            CHECK(r.converged);
            first[r.j] = r.d_star;
        }
    CHECK(first[0] > 0.0);
    CHECK(first[0] < first[1]);
    CHECK(first[1] < first[2]);
    for (const auto& r : res.records)
        if (r.j == 0 && r.first_in_d)
            CHECK(r.L_star > 0.0);

    ManifoldCurve a = u, b = sp, c = sm;
    a.samples.resize(3);
    b.samples.assign(sp.samples.end() - 3, sp.samples.end());
    c.samples.assign(sm.samples.end() - 3, sm.samples.end());
    CHECK(intersections(a, b, c, 0, d).records.empty());

    ManifoldCurve moved = sp;
    moved.tau = 1.0;
    CHECK_THROWS_AS(intersections(u, moved, sm, 1, d), DomainError);
}
