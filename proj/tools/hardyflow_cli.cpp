// hardyflow: radial Hardy-type equations through the Fowler phase plane.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hardyflow/config.hpp"
#include "hardyflow/dynamics.hpp"
#include "hardyflow/exponents.hpp"
#include "hardyflow/manifolds.hpp"
#include "hardyflow/portrait.hpp"
#include "hardyflow/report.hpp"
#include "hardyflow/shooting.hpp"

using namespace hardyflow;

namespace {

struct Args {
    std::string config;
    std::string out;
    std::string format;
    int kmax = 2;
    std::optional<double> d;
    std::optional<double> tau;
    std::optional<double> l;
    std::optional<int> n;
    std::optional<double> eta;
    std::optional<double> beta;
    std::string side = "unstable-plus";
    std::optional<double> lo;
    std::optional<double> hi;
    int samples = 96;
    bool singular = false;
    bool from_infinity = false;
    std::string mode = "cartesian";
};

RunConfig load(const Args& a, const char* default_format)
{
    RunConfig c = a.config.empty() ? config_from_map({}) : load_config(a.config);
    if (!a.out.empty())
        c.out_dir = a.out;
    if (!a.format.empty())
        c.format = a.format;
    if (c.format.empty())
        c.format = default_format;
    c.check();
    set_thread_limit(c.threads);
    return c;
}

// Writes to <out>/<stem>.<format> when an output directory is set, else stdout.
void emit(const RunConfig& c, const std::string& stem, const std::string& body)
{
    if (c.out_dir.empty()) {
        std::cout << body;
        return;
    }
    std::filesystem::create_directories(c.out_dir);
    const auto path = c.out_dir / (stem + "." + c.format);
    std::ofstream f(path);
    if (!f || !(f << body))
        throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    std::cerr << "wrote " << path.string() << '\n';
}

void require(const RunConfig& c, std::initializer_list<const char*> formats)
{
    for (const char* f : formats)
        if (c.format == f)
            return;
    throw std::invalid_argument(fmt::format("format '{}' not available for this subcommand", c.format));
}

double section_time(const Args& a, const RunConfig& c)
{
    return a.tau.value_or(c.problem.switch_time);
}

std::vector<PortraitMark> fixed_marks(const ProblemSpec& p, double l)
{
    std::vector<PortraitMark> m{{0.0, 0.0, "O"}};
    for (End e : {End::future, End::past}) {
        if (const auto px = p_location(p, l, e)) {
            const double py = -fowler_params(p.n, l).alpha * *px;
            m.push_back({*px, py, "+P"});
            m.push_back({-*px, -py, "-P"});
            break;
        }
    }
    return m;
}

int cmd_exponents(const Args& a)
{
    RunConfig c = load(a, "csv");
    const int n = a.n.value_or(c.problem.n);
    const double eta = a.eta.value_or(c.problem.eta());
    const double beta = a.beta.value_or(c.problem.beta());
    const ExponentBundle b = critical_exponents(n, eta, beta);
    if (c.format == "json") {
        nlohmann::json j = to_json(b);
        if (a.l) {
            const FowlerParams fp = fowler_params(n, *a.l);
            j["l"] = fp.l;
            j["alpha"] = fp.alpha;
            j["gamma"] = fp.gamma;
            j["saddle_past"] = saddle_window(n, eta, fp.l);
            j["saddle_future"] = saddle_window(n, beta, fp.l);
            j["kelvin_l"] = kelvin_exponent(n, fp.l);
        }
        emit(c, "exponents", canonical_dump(j));
        return 0;
    }
    require(c, {"csv"});
    std::ostringstream os;
    os << "name,value\n";
    const auto row = [&](const char* k, const std::string& v) { os << k << ',' << v << '\n'; };
    row("n", std::to_string(b.n));
    row("eta", shortest(b.eta));
    row("beta", shortest(b.beta));
    row("serrin", shortest(b.serrin));
    row("sobolev", shortest(b.sobolev));
    row("serrin_eta", shortest(b.serrin_eta));
    row("upper_eta", b.upper_eta.is_infinite() ? "inf" : shortest(b.upper_eta.value()));
    row("serrin_beta", shortest(b.serrin_beta));
    row("upper_beta", b.upper_beta.is_infinite() ? "inf" : shortest(b.upper_beta.value()));
    row("kappa_eta", shortest(b.kappa_eta));
    row("kappa_beta", shortest(b.kappa_beta));
    if (a.l) {
        const FowlerParams fp = fowler_params(n, *a.l);
        row("alpha", shortest(fp.alpha));
        row("gamma", shortest(fp.gamma));
        row("kelvin_l", shortest(kelvin_exponent(n, fp.l)));
    }
    emit(c, "exponents", os.str());
    return 0;
}

int cmd_validate(const Args& a)
{
    RunConfig c = load(a, "csv");
    const ValidationReport v = validate(c.problem);
    const auto regular = failing_hypotheses(c.problem, Theorem::existence_regular);
    const auto singular = failing_hypotheses(c.problem, Theorem::existence_singular);
    if (c.format == "json") {
        nlohmann::json j = to_json(v);
        j["problem"] = describe(c.problem);
        j["failing_existence_regular"] = regular;
        j["failing_existence_singular"] = singular;
        emit(c, "validate", canonical_dump(j));
        return 0;
    }
    require(c, {"csv"});
    std::ostringstream os;
    os << "check,passed,samples,detail\n";
    for (const auto& ch : v.checks)
        os << ch.name << ',' << (ch.passed ? "true" : "false") << ',' << ch.samples << ",\"" << ch.detail << "\"\n";
    emit(c, "validate", os.str());
    return 0;
}

int cmd_integrate(const Args& a)
{
    RunConfig c = load(a, "csv");
    if (!a.d)
        throw std::invalid_argument("integrate needs --d");
    ClassifyOptions co = c.shoot.classify;
    co.keep_path = true;
    const SolutionClass s = a.from_infinity ? classify_from_infinity(*a.d, c.problem, co) : classify(*a.d, c.problem, co);
    std::cerr << "class " << s.label() << '\n';
    if (c.format == "svg") {
        PortraitStyle st;
        st.title = fmt::format("{} {} = {}", c.problem.name, a.from_infinity ? "L" : "d", *a.d);
        st.marks = fixed_marks(c.problem, c.problem.l_s);
        emit(c, "integrate", render_portrait({}, {{s.path, s.label()}}, st));
    } else if (c.format == "json") {
        nlohmann::json j = to_json(s);
        j["problem"] = describe(c.problem);
        emit(c, "integrate", canonical_dump(j));
    } else {
        std::ostringstream os;
        write_path_csv(os, s.path, c.problem.n);
        emit(c, "integrate", os.str());
        if (c.out_dir.empty()) {
            std::cerr << s.events.size() << " events; pass --out to keep them\n";
        } else {
            std::ofstream f(c.out_dir / "integrate.events.json");
            if (!f || !(f << canonical_dump(events_json(s.events))))
                throw std::runtime_error("cannot write the events sidecar");
        }
    }
    return 0;
}

Side parse_side(const std::string& s)
{
    for (Side v : {Side::unstable_plus, Side::unstable_minus, Side::stable_plus, Side::stable_minus})
        if (to_string(v) == s)
            return v;
    throw std::invalid_argument(fmt::format("unknown side '{}'", s));
}

// Default parameter range: up to the blow-up bound on the regular side, up to 1e2 on the fast-decay side.
std::pair<double, double> default_range(Side side, double tau, const RunConfig& c, double l, bool& cluster)
{
    cluster = false;
    if (is_unstable(side)) {
        const Bound b = continuability_bounds(tau, BoundKind::regular_side, c.problem, l, branch_sign(side),
                                              c.trace.seed);
        const double hi = b.infinite ? 1e3 : b.value;
        cluster = !b.infinite;
        return {1e-4 * hi, hi};
    }
    return {1e-4, 1e2};
}

int cmd_trace(const Args& a)
{
    RunConfig c = load(a, "csv");
    const double tau = section_time(a, c);
    const double l = a.l.value_or(c.problem.l_u);
    if (c.format == "svg") {
        std::vector<ManifoldCurve> curves;
        for (Side s : {Side::unstable_plus, Side::stable_plus, Side::stable_minus}) {
            bool cluster = false;
            auto r = default_range(s, tau, c, l, cluster);
            TraceOptions to = c.trace;
            to.cluster_upper = cluster;
            curves.push_back(trace(s, tau, r, a.samples, c.problem, l, to));
        }
        PortraitStyle st;
        st.mode = a.mode == "cartesian" ? PortraitMode::cartesian : PortraitMode::stripe;
        st.title = fmt::format("{} tau = {}", c.problem.name, tau);
        st.shifts = a.kmax;
        st.marks = fixed_marks(c.problem, l);
        emit(c, "trace", render_portrait(curves, {}, st));
        return 0;
    }
    const Side side = parse_side(a.side);
    bool cluster = false;
    auto range = default_range(side, tau, c, l, cluster);
    if (a.lo)
        range.first = *a.lo;
    if (a.hi)
        range.second = *a.hi;
    TraceOptions to = c.trace;
    to.cluster_upper = cluster && !a.hi;
    const ManifoldCurve curve = trace(side, tau, range, a.samples, c.problem, l, to);
    if (curve.truncated_at)
        std::cerr << "truncated at " << shortest(*curve.truncated_at) << '\n';
    if (curve.under_resolved)
        std::cerr << "under-resolved\n";
    if (c.format == "json") {
        nlohmann::json j;
        j["schema"] = report_schema;
        j["side"] = to_string(curve.side);
        j["tau"] = curve.tau;
        j["l"] = curve.l;
        j["truncated_at"] = curve.truncated_at ? nlohmann::json(*curve.truncated_at) : nlohmann::json(nullptr);
        j["under_resolved"] = curve.under_resolved;
        j["detached"] = curve.detached;
        nlohmann::json s = nlohmann::json::array();
        for (const auto& p : curve.samples)
            s.push_back({{"param", p.param}, {"Theta", p.theta}, {"R", p.R}, {"x", p.state.x}, {"y", p.state.y}});
        j["samples"] = s;
        emit(c, "trace", canonical_dump(j));
        return 0;
    }
    std::ostringstream os;
    write_curve_csv(os, curve);
    emit(c, "trace", os.str());
    return 0;
}

int cmd_shoot(const Args& a)
{
    RunConfig c = load(a, "csv");
    if (!a.d)
        throw std::invalid_argument("shoot needs --d");
    const SolutionClass s = a.from_infinity ? classify_from_infinity(*a.d, c.problem, c.shoot.classify)
                                            : classify(*a.d, c.problem, c.shoot.classify);
    if (c.format == "json") {
        emit(c, "shoot", canonical_dump(to_json(s)));
        return 0;
    }
    require(c, {"csv"});
    const auto o = [](const std::optional<double>& v) { return v ? shortest(*v) : std::string(); };
    std::ostringstream os;
    os << "class,origin,end,zeros,d,L,blow_up_radius,winding,termination\n";
    os << s.label() << ',' << to_string(s.origin_behavior) << ',' << to_string(s.end_behavior) << ',' << s.zeros
       << ',' << o(s.d) << ',' << o(s.L) << ',' << o(s.blow_up_radius) << ',' << shortest(s.winding) << ','
       << to_string(s.termination) << '\n';
    emit(c, "shoot", os.str());
    return 0;
}

int cmd_structure(const Args& a)
{
    RunConfig c = load(a, "json");
    const StructureReport r =
        a.singular ? find_B_sequence(a.kmax, c.problem, c.shoot) : find_A_sequence(a.kmax, c.problem, c.shoot);
    for (const auto& f : r.flags)
        std::cerr << "flag: " << f << '\n';
    if (c.format == "csv") {
        std::ostringstream os;
        os << "sequence,k,value,partner,zeros,verified,class\n";
        for (const auto* seq : {&r.A, &r.B})
            for (const auto& x : *seq)
                os << (seq == &r.A ? "A" : "B") << ',' << x.k << ',' << shortest(x.value) << ',' << shortest(x.partner)
                   << ',' << x.zeros << ',' << (x.verified ? "true" : "false") << ',' << x.verified_label << '\n';
        emit(c, "structure", os.str());
        return 0;
    }
    require(c, {"json"});
    emit(c, "structure", canonical_dump(to_json(r)));
    return 0;
}

int cmd_portrait(const Args& a)
{
    RunConfig c = load(a, "svg");
    if (c.format != "svg")
        c.format = "svg";
    const double tau = section_time(a, c);
    const double l = a.l.value_or(c.problem.l_u);
    std::vector<ManifoldCurve> curves;
    for (Side s : {Side::unstable_plus, Side::unstable_minus, Side::stable_plus, Side::stable_minus}) {
        bool cluster = false;
        const auto r = default_range(s, tau, c, l, cluster);
        TraceOptions to = c.trace;
        to.cluster_upper = cluster;
        curves.push_back(trace(s, tau, r, a.samples, c.problem, l, to));
    }
    PortraitStyle st;
    st.mode = a.mode == "stripe" ? PortraitMode::stripe : PortraitMode::cartesian;
    st.title = fmt::format("{} tau = {}", c.problem.name, tau);
    st.shifts = a.kmax;
    st.marks = fixed_marks(c.problem, l);
    emit(c, "portrait", render_portrait(curves, {}, st));
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hardyflow: Fowler phase-plane analysis of radial Hardy-type equations"};
    app.require_subcommand(1);
    Args a;

    const auto common = [&](CLI::App* s) {
        s->add_option("--config", a.config, "configuration file")->check(CLI::ExistingFile);
        s->add_option("--out", a.out, "output directory (default: stdout)");
        s->add_option("--format", a.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
    };
    auto* ex = app.add_subcommand("exponents", "critical exponents and Fowler parameters");
    common(ex);
    ex->add_option("--n", a.n, "dimension");
    ex->add_option("--eta", a.eta, "Hardy limit at 0");
    ex->add_option("--beta", a.beta, "Hardy limit at infinity");
    ex->add_option("--l", a.l, "Fowler exponent");

    auto* va = app.add_subcommand("validate", "check the hypotheses on a grid");
    common(va);

    auto* in = app.add_subcommand("integrate", "trajectory of u(r,d) or, with --from-infinity, v(r,L)");
    common(in);
    in->add_option("--d", a.d, "shooting parameter")->required();
    in->add_flag("--from-infinity", a.from_infinity, "treat --d as the fast-decay constant L");

    auto* tr = app.add_subcommand("trace", "manifold section at tau");
    common(tr);
    tr->add_option("--tau", a.tau, "section time (default: switch time)");
    tr->add_option("--l", a.l, "Fowler exponent of the section (default: l_u)");
    tr->add_option("--side", a.side, "unstable-plus, unstable-minus, stable-plus or stable-minus");
    tr->add_option("--lo", a.lo, "smallest |parameter|");
    tr->add_option("--hi", a.hi, "largest |parameter|");
    tr->add_option("--samples", a.samples, "initial samples")->check(CLI::Range(2, 100000));
    tr->add_option("--kmax", a.kmax, "shifted stable branches in the svg overlay")->check(CLI::Range(0, 50));
    tr->add_option("--mode", a.mode, "svg layout")->check(CLI::IsMember({"cartesian", "stripe"}));

    auto* sh = app.add_subcommand("shoot", "classify a single solution");
    common(sh);
    sh->add_option("--d", a.d, "shooting parameter")->required();
    sh->add_flag("--from-infinity", a.from_infinity, "treat --d as the fast-decay constant L");

    auto* st = app.add_subcommand("structure", "A_k (or, with --singular, B_k) sequence and interval classes");
    common(st);
    st->add_option("--kmax", a.kmax, "largest k")->check(CLI::Range(0, 50));
    st->add_flag("--singular", a.singular, "singular-side sequence through the Kelvin dual");

    auto* po = app.add_subcommand("portrait", "svg of the four manifold branches at tau");
    common(po);
    po->add_option("--tau", a.tau, "section time (default: switch time)");
    po->add_option("--l", a.l, "Fowler exponent (default: l_u)");
    po->add_option("--kmax", a.kmax, "shifted stable branches in stripe mode")->check(CLI::Range(0, 50));
    po->add_option("--samples", a.samples, "initial samples per branch")->check(CLI::Range(2, 100000));
    po->add_option("--mode", a.mode, "layout")->check(CLI::IsMember({"cartesian", "stripe"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (ex->parsed())
            return cmd_exponents(a);
        if (va->parsed())
            return cmd_validate(a);
        if (in->parsed())
            return cmd_integrate(a);
        if (tr->parsed())
            return cmd_trace(a);
        if (sh->parsed())
            return cmd_shoot(a);
        if (st->parsed())
            return cmd_structure(a);
        if (po->parsed())
            return cmd_portrait(a);
    } catch (const HypothesisError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
