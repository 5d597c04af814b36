#include <doctest.h>

#include <cmath>

#include "hardyflow/shooting.hpp"

using namespace hardyflow;
using doctest::Approx;

// Regression goldens for the default problem, produced by find_A_sequence itself.
constexpr double golden_A[] = {1.20743662154, 1.48568322537, 1.57742691888};

TEST_CASE("bubble oracle")
{
    const auto c = classify(2 * std::sqrt(2.0), aubin_talenti_problem());
    CHECK(c.label() == "R-0-f");
    CHECK(c.end_behavior == EndBehavior::fast_decay);
    CHECK(c.zeros == 0);
    REQUIRE(c.L);
    CHECK(std::fabs(*c.L - 2 * std::sqrt(2.0)) < 1e-5);
}

TEST_CASE("small d is slow decay without zeros")
{
    const auto p = default_problem();
    for (double d : {1e-3, 0.1, 0.8}) {
        const auto c = classify(d, p);
        CHECK(c.zeros == 0);
        CHECK(c.end_behavior != EndBehavior::fast_decay);
        CHECK(c.origin_behavior == OriginBehavior::regular);
    }
    CHECK(classify(0.5, p).label() == "R-0-s");
}

TEST_CASE("linear problem never decays fast")
{
    auto f = make_power_nonlinearity({{1.0, 6.0, 0.0}}, make_constant_weight(0.0));
    const auto p = make_problem(4, make_constant_hardy(0.0), f, 6.0, 6.0, 0.0, "linear");
    ClassifyOptions o;
    o.horizon = 40.0;
    const auto c = classify(1.0, p, o);
    CHECK(c.end_behavior == EndBehavior::undetermined);
    CHECK(c.zeros == 0);
}

TEST_CASE("blow-up is reported")
{
    const auto c = classify(5.0, default_problem());
    CHECK(c.end_behavior == EndBehavior::blow_up);
    REQUIRE(c.blow_up_radius);
    CHECK(*c.blow_up_radius > 0.0);
}

TEST_CASE("labels")
{
    SolutionClass c;
    c.origin_behavior = OriginBehavior::singular;
    c.end_behavior = EndBehavior::fast_decay;
    c.zeros = 2;
    CHECK(c.label() == "S-2-f");
    c.origin_behavior = OriginBehavior::undetermined;
    c.end_behavior = EndBehavior::undetermined;
    CHECK(c.label() == "?-2-?");
}

TEST_CASE("ground state only")
{
    const auto p = default_problem();
    ShootOptions o;
    o.check_tolerance = false;
    const auto r = find_A_sequence(0, p, o);
    REQUIRE(r.A.size() == 1);
    CHECK(r.A[0].value == Approx(golden_A[0]).epsilon(1e-8));
    CHECK(r.A[0].verified);
    CHECK(r.A[0].verified_label == "R-0-f");
    CHECK(r.A[0].partner > 0.0);
    CHECK(r.flags.empty());
}

TEST_CASE("odd nonlinearity gives symmetric sequences")
{
    const auto p = default_problem();
    ShootOptions o;
    o.check_tolerance = false;
    o.interval_samples = 4;
    const auto plus = find_A_sequence(1, p, o);
    o.sign = -1;
    const auto minus = find_A_sequence(1, p, o);
    REQUIRE(plus.A.size() == 2);
    REQUIRE(minus.A.size() == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(minus.A[k].value == Approx(plus.A[k].value).epsilon(1e-8));
        CHECK(minus.A[k].partner == Approx(-plus.A[k].partner).epsilon(1e-6));
    }
}

TEST_CASE("hypotheses are enforced")
{
    auto f = make_power_nonlinearity({{1.0, 6.0, 0.0}}, make_constant_weight(1.0));
    const auto p = make_problem(4, make_constant_hardy(0.0), f, 6.0, 6.0, 0.0, "no sign change");
    try {
        find_A_sequence(1, p);
        FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
        REQUIRE_FALSE(e.failing().empty());
        CHECK(e.failing().front().rfind("L1", 0) == 0);
        CHECK(std::string(e.what()).find("L1") != std::string::npos);
    }
    CHECK_THROWS_AS(find_B_sequence(1, p), HypothesisError);
}

TEST_CASE("expected winding")
{
    const auto p = default_problem();
    CHECK(expected_winding(0, p) == Approx(-std::atan(2.0)));
    CHECK(expected_winding(2, p) == Approx(-2 * std::acos(-1.0) - std::atan(2.0)));
    const auto h = hardy_problem(0.5);
    const double kb = kappa(4, 0.5);
    CHECK(expected_winding(1, h) == Approx(-std::acos(-1.0) - std::atan(2.0 - kb)));
}

TEST_CASE("backward classification on the dual ground state")
{
    // the singular side is read on the Kelvin image, where the seed at infinity is well conditioned
    const auto d = kelvin_dual(default_problem());
    const auto c = classify_from_infinity(golden_A[0], d);
    CHECK(c.label() == "R-0-f");
    REQUIRE(c.d);
    CHECK(*c.d > 0.0);
    const auto s = classify_from_infinity(0.5 * golden_A[0], d);
    CHECK(s.origin_behavior == OriginBehavior::singular);
    CHECK(s.zeros == 0);
}
