#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hardyflow/exponents.hpp"
#include "hardyflow/fowler.hpp"

using namespace hardyflow;
using doctest::Approx;

TEST_CASE("to_fowler examples")
{
    auto s = to_fowler({1.0, 2.0, 0.0}, 5.0, 4);
    CHECK(s.t == 0.0);
    CHECK(s.x == 2.0);
    CHECK(s.y == 0.0);
    const double e = std::numbers::e;
    s = to_fowler({e, 1 / e, -1 / (e * e)}, 4.0, 4);
    CHECK(s.t == Approx(1.0));
    CHECK(s.x == Approx(1.0));
    CHECK(s.y == Approx(-1.0));
    CHECK_THROWS_AS(to_fowler({0.0, 1.0, 0.0}, 4.0, 4), DomainError);
}

TEST_CASE("from_fowler examples")
{
    auto p = from_fowler({0.0, 2.0, 0.0, 4.0, 0.0}, 4);
    CHECK(p.r == 1.0);
    CHECK(p.u == 2.0);
    CHECK(p.du == 0.0);
    p = from_fowler({1.0, 1.0, -1.0, 4.0, 0.0}, 4);
    const double e = std::numbers::e;
    CHECK(p.r == Approx(e));
    CHECK(p.u == Approx(1 / e));
    CHECK(p.du == Approx(-1 / (e * e)));
}

TEST_CASE("switch_l")
{
    const FowlerState s{0.0, 1.5, -0.5, 4.0, 0.1};
    const auto z = switch_l(s, 6.0);
    CHECK(z.x == s.x);
    CHECK(z.y == s.y);
    const auto w = switch_l({1.0, 1.0, -1.0, 4.0, 0.0}, 6.0);
    CHECK(w.x == Approx(std::exp(-0.5)));
    CHECK(w.y == Approx(-std::exp(-0.5)));
    CHECK(w.phi == 0.0);
}

TEST_CASE("round trips on random states")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const int n = 3 + i % 8;
        const double l = 2.2 + 8 * (U(rng) + 1);
        const double l2 = 2.2 + 8 * (U(rng) + 1);
        const PhysicalState p{std::exp(2 * U(rng)), 3 * U(rng), 3 * U(rng)};
        const auto back = from_fowler(to_fowler(p, l, n), n);
        CHECK(std::abs(back.r - p.r) <= 1e-14 * p.r);
        CHECK(std::abs(back.u - p.u) <= 1e-14 * std::max(1.0, std::abs(p.u)));
        CHECK(std::abs(back.du - p.du) <= 1e-14 * std::max(1.0, std::abs(p.du)));

        const double sx = 3 * U(rng), sy = 3 * U(rng);
        const FowlerState s{2 * U(rng), sx, sy, l, std::atan2(sy, sx) + 2 * std::numbers::pi * (i % 5 - 2)};
        const auto f = to_fowler(from_fowler(s, n), l, n);
        CHECK(std::abs(f.x - s.x) <= 1e-14 * std::max(1.0, std::abs(s.x)));
        CHECK(std::abs(f.y - s.y) <= 1e-14 * std::max(1.0, std::abs(s.y)));

        const auto sw = switch_l(switch_l(s, l2), l);
        CHECK(std::abs(sw.x - s.x) <= 1e-14 * std::max(1.0, std::abs(s.x)));
        CHECK(std::abs(sw.y - s.y) <= 1e-14 * std::max(1.0, std::abs(s.y)));
        const auto a = from_fowler(s, n);
        const auto b = from_fowler(switch_l(s, l2), n);
        CHECK(b.u == Approx(a.u).epsilon(1e-13));
        CHECK(b.du == Approx(a.du).epsilon(1e-13));

        const auto kk = kelvin(kelvin(s, n), n);
        CHECK(kk.t == s.t);
        CHECK(std::abs(kk.x - s.x) <= 1e-14 * std::max(1.0, std::abs(s.x)));
        CHECK(std::abs(kk.y - s.y) <= 1e-14 * std::max(1.0, std::abs(s.y) + std::abs(s.x)));
        CHECK(kk.phi == Approx(s.phi));
    }
}

TEST_CASE("kelvin examples")
{
    const auto k = kelvin({0.0, 1.0, 0.0, 4.0, 0.0}, 4);
    CHECK(k.t == 0.0);
    CHECK(k.x == 1.0);
    CHECK(k.y == -2.0);
    const auto b = kelvin(k, 4);
    CHECK(b.x == 1.0);
    CHECK(b.y == 0.0);
    const auto z = kelvin({0.3, 0.0, 0.7, 4.0, 0.0}, 4);
    CHECK(z.t == -0.3);
    CHECK(z.y == -0.7);
}

TEST_CASE("polar unwrap")
{
    std::vector<std::pair<double, double>> ccw, cw, still;
    for (int i = 0; i < 100; ++i) {
        const double a = 2 * std::numbers::pi * i / 99;
        ccw.emplace_back(std::cos(a), std::sin(a));
        cw.emplace_back(std::cos(a), -std::sin(a));
        still.emplace_back(0.3, -0.2);
    }
    const auto u = polar_unwrap(ccw);
    CHECK(u.front() == 0.0);
    CHECK(u.back() == Approx(2 * std::numbers::pi));
    CHECK(static_cast<int>(std::floor((u.back() - u.front()) / (2 * std::numbers::pi) + 1e-9)) == 1);
    CHECK(polar_unwrap(cw).back() == Approx(-2 * std::numbers::pi));
    for (double a : polar_unwrap(still))
        CHECK(a == Approx(std::atan2(-0.2, 0.3)));
    CHECK_THROWS(polar_unwrap({{1.0, 0.0}, {0.0, 0.0}}));
    CHECK(wrap_angle(3 * std::numbers::pi) == Approx(std::numbers::pi));
}
