#include <doctest.h>

#include <cmath>
#include <random>

#include "hardyflow/exponents.hpp"

using namespace hardyflow;
using doctest::Approx;

TEST_CASE("critical exponents, n=4 eta=0")
{
    const auto b = critical_exponents(4, 0.0, 0.0);
    CHECK(b.serrin == Approx(3.0));
    CHECK(b.sobolev == Approx(4.0));
    CHECK(b.serrin_eta == Approx(3.0));
    CHECK(b.upper_eta.is_infinite());
    CHECK(b.kappa_eta == 0.0);
}

TEST_CASE("critical exponents, n=4 eta=3/4")
{
    const auto b = critical_exponents(4, 0.75, 0.0);
    CHECK(b.serrin_eta == Approx(10.0 / 3.0));
    REQUIRE_FALSE(b.upper_eta.is_infinite());
    CHECK(b.upper_eta.value() == Approx(6.0));
    CHECK(b.kappa_eta == Approx(0.5));
}

TEST_CASE("negative eta")
{
    CHECK(kappa(4, -3.0) == Approx(-1.0));
    CHECK(upper_exponent(4, -3.0).is_infinite());
}

TEST_CASE("limit at the critical coupling")
{
    const double eta = 1.0 - 1e-6;
    CHECK(std::abs(serrin_exponent(4, eta) - 4.0) < 1e-2);
    CHECK(std::abs(upper_exponent(4, eta).value() - 4.0) < 1e-2);
}

TEST_CASE("exponent domain errors")
{
    CHECK_THROWS_AS(critical_exponents(2, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(critical_exponents(4, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(critical_exponents(4, 0.0, 1.5), DomainError);
    CHECK_THROWS_AS(fowler_params(4, 2.0), DomainError);
    CHECK_THROWS_AS(l_shift(4.0, -2.0), DomainError);
    CHECK_THROWS_AS(kelvin_exponent(4, 3.0), DomainError);
}

TEST_CASE("extended real sentinel")
{
    const auto inf = ExtendedReal::infinity();
    CHECK(inf > 1e308);
    CHECK_FALSE(inf == 1e308);
    CHECK(inf == ExtendedReal::infinity());
    CHECK_THROWS(inf.value());
    CHECK(ExtendedReal(2.0) < 3.0);
}

TEST_CASE("fowler params")
{
    auto f = fowler_params(4, 4.0);
    CHECK(f.alpha == Approx(1.0));
    CHECK(f.gamma == Approx(-1.0));
    f = fowler_params(4, 6.0);
    CHECK(f.alpha == Approx(0.5));
    CHECK(f.gamma == Approx(-1.5));
    for (int n = 3; n <= 10; ++n) {
        const auto c = fowler_params(n, sobolev_exponent(n));
        CHECK(c.gamma == Approx(-c.alpha));
    }
}

TEST_CASE("l shift")
{
    CHECK(l_shift(5.0, 0.0) == Approx(5.0));
    CHECK(l_shift(6.0, 2.0) == Approx(4.0));
    CHECK(l_shift(4.0, -1.0) == Approx(6.0));
}

TEST_CASE("saddle window examples")
{
    CHECK(saddle_window(4, 0.0, 4.0));
    CHECK_FALSE(saddle_window(4, 0.75, 10.0 / 3.0));
    CHECK(saddle_window(4, 0.75, 5.0));
}

TEST_CASE("kelvin exponent")
{
    CHECK(kelvin_exponent(4, 6.0) == Approx(10.0 / 3.0));
    CHECK(kelvin_exponent(4, 10.0 / 3.0) == Approx(6.0));
    CHECK(kelvin_exponent(4, 4.0) == Approx(4.0));
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const int n = std::uniform_int_distribution<int>(3, 10)(rng);
        const double l = serrin_exponent(n) + std::uniform_real_distribution<double>(1e-3, 20.0)(rng);
        const double lb = kelvin_exponent(n, l);
        CHECK(kelvin_exponent(n, lb) == Approx(l).epsilon(1e-12));
        CHECK(fowler_params(n, lb).alpha == Approx(-fowler_params(n, l).gamma).epsilon(1e-12));
    }
}

TEST_CASE("bundle invariants on the grid")
{
    for (int n = 3; n <= 10; ++n) {
        const double ec = hardy_critical(n);
        for (double eta = -5.0; eta < ec - 1e-3; eta += 0.25) {
            const auto b = critical_exponents(n, eta, 0.0);
            CHECK(b.serrin < b.sobolev);
            CHECK(b.serrin_eta > 2.0);
            CHECK(b.upper_eta > b.serrin_eta);
            CHECK(b.kappa_eta < (n - 2) / 2.0);
            CHECK(b.kappa_eta * b.kappa_eta - (n - 2) * b.kappa_eta + eta == Approx(0.0).epsilon(1e-9).scale(1.0));
            if (eta <= 0)
                CHECK(b.upper_eta.is_infinite());
            else
                CHECK(b.upper_eta > b.sobolev);
        }
    }
}
