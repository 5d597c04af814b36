#include "hardyflow/config.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <fmt/format.h>

namespace hardyflow {

namespace {

std::atomic<unsigned> g_thread_limit{0};

}  // namespace

void set_thread_limit(unsigned n)
{
    g_thread_limit = n;
}

unsigned thread_limit()
{
    return g_thread_limit;
}

std::map<std::string, std::string> parse_key_values(std::istream& in)
{
    std::map<std::string, std::string> kv;
    std::string line, prefix;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        boost::algorithm::trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument(fmt::format("line {}: unterminated section header", lineno));
            prefix = boost::algorithm::trim_copy(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(fmt::format("line {}: expected key = value", lineno));
        std::string key = boost::algorithm::trim_copy(line.substr(0, eq));
        const std::string value = boost::algorithm::trim_copy(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(fmt::format("line {}: empty key", lineno));
        if (!prefix.empty())
            key = prefix + "." + key;
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument(fmt::format("line {}: duplicate key {}", lineno, key));
    }
    return kv;
}

namespace {

class Reader {
public:
    explicit Reader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

    bool has(const std::string& k) const { return kv_.count(k) > 0; }

    std::string str(const std::string& k, const std::string& def) const
    {
        used_.insert(k);
        const auto it = kv_.find(k);
        return it == kv_.end() ? def : it->second;
    }

    double num(const std::string& k, double def) const
    {
        used_.insert(k);
        const auto it = kv_.find(k);
        return it == kv_.end() ? def : to_double(k, it->second);
    }

    std::optional<double> opt(const std::string& k) const
    {
        used_.insert(k);
        const auto it = kv_.find(k);
        if (it == kv_.end())
            return std::nullopt;
        return to_double(k, it->second);
    }

    std::vector<double> list(const std::string& k, std::vector<double> def) const
    {
        used_.insert(k);
        const auto it = kv_.find(k);
        if (it == kv_.end())
            return def;
        std::vector<std::string> parts;
        boost::algorithm::split(parts, it->second, boost::algorithm::is_any_of(","));
        std::vector<double> out;
        for (auto& s : parts)
            out.push_back(to_double(k, boost::algorithm::trim_copy(s)));
        return out;
    }

    bool flag(const std::string& k, bool def) const
    {
        const std::string v = str(k, def ? "true" : "false");
        if (v == "true" || v == "1" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "no")
            return false;
        throw std::invalid_argument(fmt::format("{}: expected a boolean, got '{}'", k, v));
    }

    void reject_unused() const
    {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k))
                throw std::invalid_argument(fmt::format("unknown configuration key '{}'", k));
    }

private:
    static double to_double(const std::string& k, const std::string& v)
    {
        std::size_t pos = 0;
        double d = 0.0;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != v.size())
            throw std::invalid_argument(fmt::format("{}: expected a number, got '{}'", k, v));
        return d;
    }

    const std::map<std::string, std::string>& kv_;
    mutable std::set<std::string> used_;
};

std::shared_ptr<const HardyProfile> read_hardy(const Reader& r)
{
    const std::string kind = r.str("hardy.kind", "constant");
    if (kind == "constant")
        return make_constant_hardy(r.num("hardy.eta", 0.0));
    if (kind == "rational")
        return make_rational_hardy(r.num("hardy.c", 0.5));
    if (kind == "tabulated")
        return make_tabulated_hardy(r.list("hardy.r", {}), r.list("hardy.h", {}), r.num("hardy.eta", 0.0),
                                    r.num("hardy.beta", 0.0));
    throw std::invalid_argument(fmt::format("hardy.kind: unknown kind '{}'", kind));
}

std::shared_ptr<const Weight> read_weight(const Reader& r)
{
    const std::string kind = r.str("weight.kind", "smoothed-step");
    if (kind == "constant")
        return make_constant_weight(r.num("weight.value", 1.0));
    if (kind == "smoothed-step")
        return make_smoothed_step_weight(r.num("weight.radius", 1.0), r.num("weight.width", 1.0),
                                         r.num("weight.delta", 0.0), r.num("weight.amplitude", 1.0));
    if (kind == "power-product")
        return make_power_product_weight(r.num("weight.amplitude", 1.0), r.num("weight.radius", 1.0),
                                         r.num("weight.delta0", 0.0), r.num("weight.delta_inf", 0.0));
    if (kind == "piecewise-sign")
        return make_piecewise_sign_weight(r.num("weight.radius", 1.0), r.num("weight.k0", -1.0),
                                          r.num("weight.delta0", 0.0), r.num("weight.k_inf", 1.0),
                                          r.num("weight.delta_inf", 0.0));
    throw std::invalid_argument(fmt::format("weight.kind: unknown kind '{}'", kind));
}

std::shared_ptr<const Nonlinearity> read_nonlinearity(const Reader& r)
{
    const std::string kind = r.str("nonlinearity.kind", "power");
    const auto w = read_weight(r);
    const int sign = r.num("nonlinearity.sign", 1.0) < 0 ? -1 : 1;
    if (kind == "power") {
        const auto q = r.list("nonlinearity.q", {6.0});
        const auto coef = r.list("nonlinearity.coef", std::vector<double>(q.size(), 1.0));
        const auto delta = r.list("nonlinearity.delta", std::vector<double>(q.size(), 0.0));
        if (coef.size() != q.size() || delta.size() != q.size())
            throw std::invalid_argument("nonlinearity.q, .coef and .delta must have equal lengths");
        std::vector<PowerTerm> terms;
        for (std::size_t i = 0; i < q.size(); ++i)
            terms.push_back({coef[i], q[i], delta[i]});
        return make_power_nonlinearity(std::move(terms), w, sign);
    }
    if (kind == "rational")
        return make_rational_nonlinearity(r.num("nonlinearity.q1", 6.0), r.num("nonlinearity.q2", 1.0),
                                          r.num("nonlinearity.delta1", 0.0), r.num("nonlinearity.delta2", 0.0), w,
                                          sign);
    throw std::invalid_argument(fmt::format("nonlinearity.kind: unknown kind '{}'", kind));
}

ProblemSpec read_problem(const Reader& r)
{
    const std::string preset = r.str("problem.preset", "default");
    ProblemSpec p;
    if (preset == "default") {
        p = default_problem();
    } else if (preset == "hardy") {
        p = hardy_problem(r.num("hardy.c", 0.5));
    } else if (preset == "aubin-talenti") {
        p = aubin_talenti_problem();
    } else if (preset == "custom") {
        const double n = r.num("problem.n", 4.0);
        if (n != std::floor(n))
            throw std::invalid_argument("problem.n must be an integer");
        p = make_problem(static_cast<int>(n), read_hardy(r), read_nonlinearity(r), r.opt("problem.l_u"),
                         r.opt("problem.l_s"), r.opt("problem.switch_time"), r.str("problem.name", "custom"));
    } else {
        throw std::invalid_argument(fmt::format("problem.preset: unknown preset '{}'", preset));
    }
    if (preset != "custom") {
        if (const auto v = r.opt("problem.l_u"))
            p.l_u = *v;
        if (const auto v = r.opt("problem.l_s"))
            p.l_s = *v;
        if (const auto v = r.opt("problem.switch_time"))
            p.switch_time = *v;
        p.name = r.str("problem.name", p.name);
    }
    if (r.flag("problem.kelvin", false))
        p = kelvin_dual(p);
    return p;
}

}  // namespace

void RunConfig::check() const
{
    shoot.classify.controls.check();
    trace.seed.controls.check();
    if (!(shoot.classify.horizon > 0.0))
        throw std::invalid_argument("numerics.horizon must be positive");
    if (!(shoot.classify.eps0 > 0.0 && shoot.classify.eps0 <= 1e-3))
        throw std::invalid_argument("numerics.eps0 must lie in (0, 1e-3]");
    if (!(shoot.bisection_rel >= 1e-15 && shoot.bisection_rel <= 1e-3))
        throw std::invalid_argument("numerics.bisection_rel must lie in [1e-15, 1e-3]");
    if (shoot.interval_samples < 1 || shoot.trace_samples < 2)
        throw std::invalid_argument("sample counts must be positive");
    if (!format.empty() && format != "csv" && format != "json" && format != "svg")
        throw std::invalid_argument(fmt::format("output.format must be csv, json or svg, got '{}'", format));
}

RunConfig config_from_map(const std::map<std::string, std::string>& kv)
{
    const Reader r(kv);
    RunConfig c;
    c.problem = read_problem(r);

    Controls& ctl = c.shoot.classify.controls;
    ctl.rel_tol = r.num("numerics.rel_tol", ctl.rel_tol);
    ctl.abs_tol = r.num("numerics.abs_tol", ctl.abs_tol);
    ctl.initial_step = r.num("numerics.initial_step", ctl.initial_step);
    ctl.max_step = r.num("numerics.max_step", ctl.max_step);
    ctl.min_step = r.num("numerics.min_step", ctl.min_step);
    ctl.max_steps = static_cast<std::size_t>(r.num("numerics.max_steps", static_cast<double>(ctl.max_steps)));
    ctl.speed_cap = r.num("numerics.speed_cap", ctl.speed_cap);
    ctl.rho_max = r.num("numerics.rho_max", ctl.rho_max);
    ctl.origin_radius = r.num("numerics.origin_radius", ctl.origin_radius);
    ctl.origin_angle_tol = r.num("numerics.origin_angle_tol", ctl.origin_angle_tol);
    ctl.origin_dwell = r.num("numerics.origin_dwell", ctl.origin_dwell);
    ctl.p_radius = r.num("numerics.p_radius", ctl.p_radius);
    ctl.p_dwell = r.num("numerics.p_dwell", ctl.p_dwell);
    c.shoot.classify.horizon = r.num("numerics.horizon", c.shoot.classify.horizon);
    c.shoot.classify.eps0 = r.num("numerics.eps0", c.shoot.classify.eps0);
    c.shoot.bisection_rel = r.num("numerics.bisection_rel", c.shoot.bisection_rel);
    c.shoot.interval_samples = static_cast<int>(r.num("numerics.interval_samples", c.shoot.interval_samples));
    c.shoot.trace_samples = static_cast<int>(r.num("numerics.trace_samples", c.shoot.trace_samples));
    c.shoot.check_tolerance = r.flag("numerics.check_tolerance", c.shoot.check_tolerance);
    c.shoot.sign = r.num("numerics.sign", 1.0) < 0 ? -1 : 1;
    c.threads = static_cast<unsigned>(r.num("numerics.threads", 0.0));

    c.trace.seed.eps0 = c.shoot.classify.eps0;
    c.trace.seed.controls.rel_tol = ctl.rel_tol;
    c.trace.seed.controls.abs_tol = ctl.abs_tol;
    c.trace.seed.controls.rho_max = ctl.rho_max;
    c.trace.max_samples = static_cast<std::size_t>(r.num("numerics.max_curve_samples", 1e5));

    c.out_dir = r.str("output.dir", "");
    c.format = r.str("output.format", c.format);
    r.reject_unused();
    c.check();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open config {}", path.string()));
    return config_from_map(parse_key_values(in));
}

}  // namespace hardyflow
