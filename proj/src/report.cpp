#include "hardyflow/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace hardyflow {

using nlohmann::json;

namespace {

void dump_into(std::string& out, const json& j, int indent, int depth)
{
    const auto newline = [&](int d) {
        if (indent >= 0) {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    switch (j.type()) {
    case json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? fmt::format("{:.16e}", v) : "null";
        break;
    }
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            break;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann objects iterate in key order
            if (!first)
                out += ',';
            first = false;
            newline(depth + 1);
            out += json(it.key()).dump();
            out += indent >= 0 ? ": " : ":";
            dump_into(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        break;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            break;
        }
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i)
                out += ',';
            newline(depth + 1);
            dump_into(out, j[i], indent, depth + 1);
        }
        newline(depth);
        out += ']';
        break;
    }
    default:
        out += j.dump();
    }
}

json opt(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> read_opt(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<double>();
}

double read_num(const json& j, const char* key)
{
    const json& v = j.at(key);
    return v.is_null() ? INFINITY : v.get<double>();
}

json to_json(const Connection& c)
{
    return {{"k", c.k},
            {"value", c.value},
            {"partner", c.partner},
            {"zeros", c.zeros},
            {"verified", c.verified},
            {"class", c.verified_label},
            {"winding", c.winding},
            {"winding_expected", c.winding_expected},
            {"tolerance_shift", opt(c.tolerance_shift)},
            {"geometric", opt(c.geometric)},
            {"bracket_source", c.bracket_source}};
}

Connection connection_from(const json& j)
{
    Connection c;
    c.k = j.at("k").get<int>();
    c.value = j.at("value").get<double>();
    c.partner = j.at("partner").get<double>();
    c.zeros = j.at("zeros").get<int>();
    c.verified = j.at("verified").get<bool>();
    c.verified_label = j.at("class").get<std::string>();
    c.winding = j.at("winding").get<double>();
    c.winding_expected = j.at("winding_expected").get<double>();
    c.tolerance_shift = read_opt(j, "tolerance_shift");
    c.geometric = read_opt(j, "geometric");
    c.bracket_source = j.at("bracket_source").get<std::string>();
    return c;
}

}  // namespace

std::string canonical_dump(const json& j, int indent)
{
    std::string out;
    dump_into(out, j, indent, 0);
    if (indent >= 0)
        out += '\n';
    return out;
}

std::string shortest(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json to_json(const IntersectionRecord& r)
{
    return {{"j", r.j},          {"d_star", r.d_star},         {"L_star", r.L_star},
            {"theta", r.theta},  {"R", r.R},                   {"first_in_d", r.first_in_d},
            {"converged", r.converged}, {"residual", r.residual}};
}

json to_json(const StructureReport& r)
{
    json j;
    j["schema"] = report_schema;
    j["problem"] = r.problem;
    j["theorem"] = r.theorem;
    j["A"] = json::array();
    for (const auto& c : r.A)
        j["A"].push_back(to_json(c));
    j["B"] = json::array();
    for (const auto& c : r.B)
        j["B"].push_back(to_json(c));
    j["a"] = json::array();
    for (const auto& a : r.a)
        j["a"].push_back({{"k", a.k}, {"lo", a.lo}, {"hi", a.hi}});
    j["intervals"] = json::array();
    for (const auto& ic : r.intervals) {
        json s = json::array();
        for (const auto& smp : ic.samples)
            s.push_back({{"param", smp.param}, {"class", smp.label}});
        j["intervals"].push_back({{"name", ic.name}, {"lo", ic.lo}, {"hi", ic.hi}, {"samples", s}});
    }
    j["flags"] = r.flags;
    j["d_plus"] = r.d_plus_infinite ? json(nullptr) : json(r.d_plus);
    j["d_plus_infinite"] = r.d_plus_infinite;
    j["intersections"] = json::array();
    for (const auto& x : r.intersections)
        j["intersections"].push_back(to_json(x));
    return j;
}

StructureReport report_from_json(const json& j)
{
    if (j.at("schema").get<int>() != report_schema)
        throw std::runtime_error(fmt::format("unsupported report schema {}", j.at("schema").dump()));
    StructureReport r;
    r.problem = j.at("problem").get<std::string>();
    r.theorem = j.at("theorem").get<std::string>();
    for (const auto& c : j.at("A"))
        r.A.push_back(connection_from(c));
    for (const auto& c : j.at("B"))
        r.B.push_back(connection_from(c));
    for (const auto& a : j.at("a"))
        r.a.push_back({a.at("k").get<int>(), a.at("lo").get<double>(), a.at("hi").get<double>()});
    for (const auto& ic : j.at("intervals")) {
        IntervalClass c;
        c.name = ic.at("name").get<std::string>();
        c.lo = ic.at("lo").get<double>();
        c.hi = ic.at("hi").get<double>();
        for (const auto& s : ic.at("samples"))
            c.samples.push_back({s.at("param").get<double>(), s.at("class").get<std::string>()});
        r.intervals.push_back(std::move(c));
    }
    r.flags = j.at("flags").get<std::vector<std::string>>();
    r.d_plus_infinite = j.at("d_plus_infinite").get<bool>();
    r.d_plus = read_num(j, "d_plus");
    for (const auto& x : j.at("intersections")) {
        IntersectionRecord rec;
        rec.j = x.at("j").get<int>();
        rec.d_star = x.at("d_star").get<double>();
        rec.L_star = x.at("L_star").get<double>();
        rec.theta = x.at("theta").get<double>();
        rec.R = x.at("R").get<double>();
        rec.first_in_d = x.at("first_in_d").get<bool>();
        rec.converged = x.at("converged").get<bool>();
        rec.residual = x.at("residual").get<double>();
        r.intersections.push_back(rec);
    }
    return r;
}

json to_json(const SolutionClass& c)
{
    return {{"schema", report_schema},
            {"class", c.label()},
            {"origin", to_string(c.origin_behavior)},
            {"end", to_string(c.end_behavior)},
            {"zeros", c.zeros},
            {"d", opt(c.d)},
            {"L", opt(c.L)},
            {"blow_up_radius", opt(c.blow_up_radius)},
            {"p_side", c.p_side},
            {"winding", c.winding},
            {"termination", to_string(c.termination)}};
}

json to_json(const ExponentBundle& b)
{
    const auto ext = [](const ExtendedReal& e) { return e.is_infinite() ? json("inf") : json(e.value()); };
    return {{"schema", report_schema},   {"n", b.n},
            {"eta", b.eta},              {"beta", b.beta},
            {"serrin", b.serrin},        {"sobolev", b.sobolev},
            {"serrin_eta", b.serrin_eta}, {"upper_eta", ext(b.upper_eta)},
            {"serrin_beta", b.serrin_beta}, {"upper_beta", ext(b.upper_beta)},
            {"kappa_eta", b.kappa_eta},  {"kappa_beta", b.kappa_beta}};
}

json to_json(const ValidationReport& v)
{
    json checks = json::array();
    for (const auto& c : v.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"samples", c.samples}});
    return {{"schema", report_schema}, {"checks", checks}};
}

json describe(const ProblemSpec& p)
{
    return {{"name", p.name},
            {"n", p.n},
            {"hardy", p.hardy->describe()},
            {"nonlinearity", p.nonlinearity->describe()},
            {"l_u", p.l_u},
            {"l_s", p.l_s},
            {"switch_time", p.switch_time}};
}

void emit_report(const StructureReport& r, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    out << canonical_dump(to_json(r));
    if (!out)
        throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

void write_curve_csv(std::ostream& os, const ManifoldCurve& c, bool with_side)
{
    if (with_side)
        os << "side,";
    os << "param,Theta,R,x,y\n";
    for (const auto& s : c.samples) {
        if (with_side)
            os << to_string(c.side) << ',';
        os << shortest(s.param) << ',' << shortest(s.theta) << ',' << shortest(s.R) << ',' << shortest(s.state.x)
           << ',' << shortest(s.state.y) << '\n';
    }
}

void write_path_csv(std::ostream& os, const std::vector<FowlerState>& path, int n)
{
    os << "t,x,y,phi,rho,u,du,r\n";
    for (const auto& s : path) {
        const PhysicalState ph = from_fowler(s, n);
        os << shortest(s.t) << ',' << shortest(s.x) << ',' << shortest(s.y) << ',' << shortest(s.phi) << ','
           << shortest(s.rho()) << ',' << shortest(ph.u) << ',' << shortest(ph.du) << ',' << shortest(ph.r) << '\n';
    }
}

json events_json(const std::vector<Event>& events)
{
    json a = json::array();
    for (const auto& e : events)
        a.push_back({{"t", e.t}, {"kind", to_string(e.kind)}, {"x", e.x}, {"y", e.y}});
    return {{"schema", report_schema}, {"events", a}};
}

}  // namespace hardyflow
