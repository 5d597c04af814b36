#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "hardyflow/config.hpp"
#include "hardyflow/portrait.hpp"
#include "hardyflow/report.hpp"

using namespace hardyflow;
using doctest::Approx;

namespace {

StructureReport sample_report()
{
    StructureReport r;
    r.problem = "default";
    r.theorem = "existence_regular";
    for (int k = 0; k < 3; ++k) {
        Connection c;
        c.k = k;
        c.value = 1.2 + 0.1 * k + 1e-13;
        c.partner = 4.8 * (k + 1) * (k % 2 ? -1 : 1);
        c.zeros = k;
        c.verified = true;
        c.verified_label = "R-" + std::to_string(k) + "-f";
        c.winding = -1.1 - 3.14159 * k;
        c.winding_expected = -1.1071487177940904 - 3.141592653589793 * k;
        c.tolerance_shift = 2e-10;
        if (k != 1)
            c.geometric = c.value * (1 + 1e-7);
        c.bracket_source = "geometry";
        r.A.push_back(c);
    }
    r.a.push_back({1, 1.2, 1.21});
    r.intervals.push_back({"(0,A_0)", 0.0, 1.2, {{1e-3, "R-0-s"}, {0.5, "R-0-s"}}});
    r.flags = {"example flag"};
    r.d_plus = 1.7412624;
    r.intersections.push_back({0, 1.2, 4.8, -0.4, 0.7, true, true, 3e-11});
    return r;
}

}  // namespace

TEST_CASE("report round trip")
{
    const auto r = sample_report();
    const auto text = canonical_dump(to_json(r));
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("schema") == 1);
    const auto back = report_from_json(j);
    CHECK(canonical_dump(to_json(back)) == text);
    REQUIRE(back.A.size() == 3);
    CHECK(back.A[0].value == r.A[0].value);
    CHECK(back.A[2].winding == r.A[2].winding);
    CHECK_FALSE(back.A[1].geometric);
    for (std::size_t k = 1; k < back.A.size(); ++k)
        CHECK(back.A[k - 1].value < back.A[k].value);
}

TEST_CASE("canonical dump")
{
    nlohmann::json j{{"b", 0.1}, {"a", {1, NAN}}};
    CHECK(canonical_dump(j, -1) == "{\"a\":[1,null],\"b\":1.0000000000000001e-01}");
    CHECK(shortest(0.1) == "0.1");
    CHECK(std::stod(shortest(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("emit_report")
{
    const auto dir = std::filesystem::temp_directory_path() / "hardyflow_test_emit";
    std::filesystem::create_directories(dir);
    const auto path = dir / "r.json";
    emit_report(sample_report(), path);
    std::ifstream in(path);
    const auto back = report_from_json(nlohmann::json::parse(in));
    CHECK(back.A.size() == 3);
    CHECK_THROWS_AS(emit_report(sample_report(), dir / "missing" / "r.json"), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("wrong schema is refused")
{
    auto j = to_json(sample_report());
    j["schema"] = 2;
    CHECK_THROWS(report_from_json(j));
}

TEST_CASE("path csv")
{
    std::ostringstream os;
    write_path_csv(os, {{0.0, 2.0, 0.0, 6.0, 0.0}}, 4);
    CHECK(os.str() == "t,x,y,phi,rho,u,du,r\n0,2,0,0,2,2,0,1\n");
}

TEST_CASE("config parsing")
{
    std::istringstream in(R"(# comment
[problem]
preset = hardy
[hardy]
c = 0.25
[numerics]
rel_tol = 1e-9
interval_samples = 8
[output]
format = json
)");
    const auto kv = parse_key_values(in);
    CHECK(kv.at("problem.preset") == "hardy");
    const auto c = config_from_map(kv);
    CHECK(c.problem.beta() == Approx(0.25));
    CHECK(c.shoot.classify.controls.rel_tol == Approx(1e-9));
    CHECK(c.shoot.interval_samples == 8);
    CHECK(c.format == "json");

    std::istringstream dup("a.b = 1\na.b = 2\n");
    CHECK_THROWS(parse_key_values(dup));
    CHECK_THROWS(config_from_map({{"numerics.bogus", "1"}}));
    CHECK_THROWS(config_from_map({{"numerics.rel_tol", "0.5"}}));
    CHECK_THROWS(config_from_map({{"numerics.rel_tol", "abc"}}));
}

TEST_CASE("custom problem from config")
{
    const auto c = config_from_map({{"problem.preset", "custom"},
                                    {"problem.n", "3"},
                                    {"weight.kind", "piecewise-sign"},
                                    {"weight.radius", "2"},
                                    {"weight.k0", "-1"},
                                    {"weight.k_inf", "1"},
                                    {"nonlinearity.kind", "power"},
                                    {"nonlinearity.q", "8"}});
    CHECK(c.problem.n == 3);
    CHECK(c.problem.nonlinearity->f(1.0, 1.0) < 0.0);
    CHECK(c.problem.nonlinearity->f(1.0, 3.0) > 0.0);
    CHECK(c.problem.l_u == Approx(8.0));
}

namespace {

ManifoldCurve spiral(Side side, double sign)
{
    ManifoldCurve c;
    c.side = side;
    for (int i = 0; i < 200; ++i) {
        const double th = 0.1 * i;
        const double R = 0.05 * i;
        c.samples.push_back({0.1 * i, th, R, {0.0, sign * R * std::cos(th), sign * R * std::sin(th), 6.0, th}});
    }
    return c;
}

std::size_t count(const std::string& s, const std::string& pat)
{
    const std::regex re(pat);
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
}

}  // namespace

TEST_CASE("portrait")
{
    std::vector<ManifoldCurve> curves{spiral(Side::stable_plus, 1), spiral(Side::stable_minus, -1),
                                      spiral(Side::unstable_plus, 0.5)};
    PortraitStyle st;
    st.title = "test";
    st.marks = {{0.0, 0.0, "O"}, {0.93, -0.47, "P+"}, {-0.93, 0.47, "P-"}};
    const auto a = render_portrait(curves, {}, st);
    CHECK(a == render_portrait(curves, {}, st));
    CHECK(a.rfind("<svg ", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(count(a, "<polyline class=\"curve stable") >= 2);
    CHECK(count(a, "<polyline class=\"curve unstable") == 1);
    CHECK(count(a, "class=\"mark\"") == 3);
    CHECK(count(a, "class=\"legend\"") == 1);
    CHECK(count(a, "<polyline") == count(a, "/>") - count(a, "<(circle|line|rect)"));

    st.mode = PortraitMode::stripe;
    const auto b = render_portrait(curves, {}, st);
    CHECK(count(b, "shift-") >= 2);
    CHECK_THROWS_AS(render_portrait({}, {}, st), DomainError);
}
