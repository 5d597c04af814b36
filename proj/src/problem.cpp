#include "hardyflow/problem.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace hardyflow {

namespace {

double softplus(double z)
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double signed_power(double x, double p)  // x|x|^{p-1}
{
    if (x == 0.0)
        return 0.0;
    const double m = std::pow(std::fabs(x), p);
    return x > 0.0 ? m : -m;
}

// ---- Hardy profiles -------------------------------------------------------

class ConstantHardy final : public HardyProfile {
public:
    explicit ConstantHardy(double eta) : eta_(eta) {}
    double at_log_radius(double) const override { return eta_; }
    double eta() const override { return eta_; }
    double beta() const override { return eta_; }
    bool is_constant() const override { return true; }
    std::string describe() const override { return fmt::format("constant({})", eta_); }

private:
    double eta_;
};

class RationalHardy final : public HardyProfile {
public:
    explicit RationalHardy(double c) : c_(c) {}
    double at_log_radius(double t) const override { return c_ / (1.0 + std::exp(-2.0 * t)); }
    double eta() const override { return 0.0; }
    double beta() const override { return c_; }
    std::string describe() const override { return fmt::format("rational(C={})", c_); }

private:
    double c_;
};

class TabulatedHardy final : public HardyProfile {
public:
    TabulatedHardy(std::vector<double> r, std::vector<double> h, double eta, double beta)
        : h_(std::move(h)), eta_(eta), beta_(beta)
    {
        if (r.size() != h_.size() || r.size() < 2)
            throw std::invalid_argument("tabulated Hardy profile needs matching r and h lists of length >= 2");
        logr_.reserve(r.size());
        for (double v : r) {
            if (!(v > 0.0))
                throw std::invalid_argument("tabulated Hardy profile needs r > 0");
            logr_.push_back(std::log(v));
        }
        if (!std::is_sorted(logr_.begin(), logr_.end()) ||
            std::adjacent_find(logr_.begin(), logr_.end()) != logr_.end())
            throw std::invalid_argument("tabulated Hardy radii must be strictly increasing");
    }
    double at_log_radius(double t) const override
    {
        if (t <= logr_.front())
            return h_.front();
        if (t >= logr_.back())
            return h_.back();
        const auto it = std::upper_bound(logr_.begin(), logr_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - logr_.begin());
        const double w = (t - logr_[i - 1]) / (logr_[i] - logr_[i - 1]);
        return (1.0 - w) * h_[i - 1] + w * h_[i];
    }
    double eta() const override { return eta_; }
    double beta() const override { return beta_; }
    std::string describe() const override { return fmt::format("tabulated({} points)", h_.size()); }

private:
    std::vector<double> logr_;
    std::vector<double> h_;
    double eta_;
    double beta_;
};

class InvertedHardy final : public HardyProfile {
public:
    explicit InvertedHardy(std::shared_ptr<const HardyProfile> base) : base_(std::move(base)) {}
    double at_log_radius(double t) const override { return base_->at_log_radius(-t); }
    double eta() const override { return base_->beta(); }
    double beta() const override { return base_->eta(); }
    bool is_constant() const override { return base_->is_constant(); }
    std::string describe() const override { return "inverted(" + base_->describe() + ")"; }

private:
    std::shared_ptr<const HardyProfile> base_;
};

// ---- weights --------------------------------------------------------------

class ConstantWeight final : public Weight {
public:
    explicit ConstantWeight(double c) : c_(c) {}
    double scaled(double t, double shift) const override { return shift == 0.0 ? c_ : c_ * std::exp(shift * t); }
    double delta0() const override { return 0.0; }
    double delta_inf() const override { return 0.0; }
    double k0() const override { return c_; }
    double k_inf() const override { return c_; }
    std::string describe() const override { return fmt::format("constant({})", c_); }

private:
    double c_;
};

class SmoothedStepWeight final : public Weight {
public:
    SmoothedStepWeight(double radius, double width, double delta, double amplitude)
        : radius_(radius), width_(width), delta_(delta), amplitude_(amplitude)
    {
        if (!(radius > 0.0) || !(width > 0.0))
            throw std::invalid_argument("smoothed-step weight needs R > 0 and width > 0");
    }
    double scaled(double t, double shift) const override
    {
        const double s = std::tanh((std::exp(t) - radius_) / width_);
        const double e = delta_ + shift;
        return e == 0.0 ? amplitude_ * s : amplitude_ * s * std::exp(e * t);
    }
    std::optional<double> radius() const override { return radius_; }
    double delta0() const override { return delta_; }
    double delta_inf() const override { return delta_; }
    double k0() const override { return -amplitude_ * std::tanh(radius_ / width_); }
    double k_inf() const override { return amplitude_; }
    std::string describe() const override
    {
        return fmt::format("smoothed-step(R={}, width={}, delta={}, amplitude={})", radius_, width_, delta_,
                           amplitude_);
    }

private:
    double radius_, width_, delta_, amplitude_;
};

class PowerProductWeight final : public Weight {
public:
    PowerProductWeight(double amplitude, double radius, double delta0, double delta_inf)
        : amplitude_(amplitude), radius_(radius), delta0_(delta0), delta_inf_(delta_inf)
    {
        if (!(radius > 0.0) || !(amplitude > 0.0))
            throw std::invalid_argument("power-product weight needs R > 0 and amplitude > 0");
    }
    double scaled(double t, double shift) const override
    {
        const double lr = std::log(radius_);
        const double z = t - lr;
        if (z == 0.0)
            return 0.0;
        // ln|r - R| and ln(R + r), both relative to ln R
        const double log_diff = z > 30.0 ? z + std::log1p(-std::exp(-z)) : std::log(std::fabs(std::expm1(z)));
        const double log_sum = softplus(z);
        const double expo = std::log(amplitude_) + lr + log_diff + delta0_ * t +
                            (delta_inf_ - delta0_ - 1.0) * (lr + log_sum) + shift * t;
        const double m = std::exp(expo);
        return z > 0.0 ? m : -m;
    }
    std::optional<double> radius() const override { return radius_; }
    double delta0() const override { return delta0_; }
    double delta_inf() const override { return delta_inf_; }
    double k0() const override { return -amplitude_ * std::pow(radius_, delta_inf_ - delta0_); }
    double k_inf() const override { return amplitude_; }
    std::string describe() const override
    {
        return fmt::format("power-product(A={}, R={}, delta0={}, deltaInf={})", amplitude_, radius_, delta0_,
                           delta_inf_);
    }

private:
    double amplitude_, radius_, delta0_, delta_inf_;
};

class PiecewiseSignWeight final : public Weight {
public:
    PiecewiseSignWeight(double radius, double k0, double delta0, double k_inf, double delta_inf)
        : radius_(radius), k0_(k0), delta0_(delta0), k_inf_(k_inf), delta_inf_(delta_inf)
    {
        if (!(radius > 0.0))
            throw std::invalid_argument("piecewise-sign weight needs R > 0");
    }
    double scaled(double t, double shift) const override
    {
        const double lr = std::log(radius_);
        if (t < lr)
            return k0_ * std::exp((delta0_ + shift) * t);
        if (t > lr)
            return k_inf_ * std::exp((delta_inf_ + shift) * t);
        return 0.0;
    }
    std::optional<double> radius() const override { return radius_; }
    double delta0() const override { return delta0_; }
    double delta_inf() const override { return delta_inf_; }
    double k0() const override { return k0_; }
    double k_inf() const override { return k_inf_; }
    std::string describe() const override
    {
        return fmt::format("piecewise-sign(R={}, K0={}, delta0={}, KInf={}, deltaInf={})", radius_, k0_, delta0_,
                           k_inf_, delta_inf_);
    }

private:
    double radius_, k0_, delta0_, k_inf_, delta_inf_;
};

// ---- nonlinearities -------------------------------------------------------

class PowerNonlinearity final : public Nonlinearity {
public:
    PowerNonlinearity(std::vector<PowerTerm> terms, std::shared_ptr<const Weight> weight, int sign)
        : terms_(std::move(terms)), weight_(std::move(weight)), sign_(sign)
    {
        if (terms_.empty())
            throw std::invalid_argument("power nonlinearity needs at least one term");
        for (const auto& term : terms_)
            if (!(term.q > 2.0) || !(term.delta > -2.0))
                throw std::invalid_argument(
                    fmt::format("power term needs q > 2 and delta > -2 (q={}, delta={})", term.q, term.delta));
        if (!weight_)
            throw std::invalid_argument("power nonlinearity needs a weight");
        if (sign != 1 && sign != -1)
            throw std::invalid_argument("sign must be +1 or -1");
    }
    double f(double u, double r) const override
    {
        const double t = std::log(r);
        double sum = 0.0;
        for (const auto& term : terms_)
            sum += term.coef * weight_->scaled(t, term.delta) * signed_power(u, term.q - 1.0);
        return sign_ * sum;
    }
    double g(double x, double t, double alpha) const override
    {
        if (x == 0.0)
            return 0.0;
        double sum = 0.0;
        for (const auto& term : terms_) {
            const double shift = term.delta + 2.0 - alpha * (term.q - 2.0);
            sum += term.coef * weight_->scaled(t, shift) * signed_power(x, term.q - 1.0);
        }
        return sign_ * sum;
    }
    std::optional<double> primitive(double x, double t, double alpha) const override
    {
        double sum = 0.0;
        for (const auto& term : terms_) {
            const double shift = term.delta + 2.0 - alpha * (term.q - 2.0);
            sum += term.coef * weight_->scaled(t, shift) * std::pow(std::fabs(x), term.q) / term.q;
        }
        return sign_ * sum;
    }
    int orientation() const override { return sign_; }
    const Weight* weight() const override { return weight_.get(); }
    std::pair<double, double> natural_exponents() const override
    {
        double lu = -INFINITY, ls = INFINITY;
        for (const auto& term : terms_) {
            lu = std::max(lu, l_shift(term.q, term.delta + weight_->delta0()));
            ls = std::min(ls, l_shift(term.q, term.delta + weight_->delta_inf()));
        }
        return {lu, ls};
    }
    std::string describe() const override
    {
        std::string s = terms_.size() == 1 ? "single-power" : "sum-of-powers";
        s += fmt::format("(sign={}, weight={}", sign_, weight_->describe());
        for (const auto& term : terms_)
            s += fmt::format(", [coef={}, q={}, delta={}]", term.coef, term.q, term.delta);
        return s + ")";
    }

private:
    std::vector<PowerTerm> terms_;
    std::shared_ptr<const Weight> weight_;
    int sign_;
};

class RationalNonlinearity final : public Nonlinearity {
public:
    RationalNonlinearity(double q1, double q2, double delta1, double delta2, std::shared_ptr<const Weight> weight,
                         int sign)
        : q1_(q1), q2_(q2), delta1_(delta1), delta2_(delta2), weight_(std::move(weight)), sign_(sign)
    {
        if (!(q1 > 2.0) || !(q1 - q2 > 2.0) || !(q2 > 0.0))
            throw std::invalid_argument("rational nonlinearity needs q1 > 2, q2 > 0, q1 - q2 > 2");
        if (!(delta1 > -2.0) || !(delta1 - delta2 > -2.0) || !(delta2 > 0.0))
            throw std::invalid_argument("rational nonlinearity needs delta1 > -2, delta2 > 0, delta1 - delta2 > -2");
        if (!weight_)
            throw std::invalid_argument("rational nonlinearity needs a weight");
    }
    double f(double u, double r) const override
    {
        if (u == 0.0)
            return 0.0;
        const double t = std::log(r);
        const double lu = std::log(std::fabs(u));
        const double m = std::exp((q1_ - 1.0) * lu - softplus(q2_ * lu) + delta1_ * t - softplus(delta2_ * t));
        return sign_ * weight_->scaled(t, 0.0) * (u > 0.0 ? m : -m);
    }
    double g(double x, double t, double alpha) const override
    {
        if (x == 0.0)
            return 0.0;
        const double lu = std::log(std::fabs(x)) - alpha * t;
        const double m = std::exp((q1_ - 1.0) * lu - softplus(q2_ * lu) + delta1_ * t - softplus(delta2_ * t) +
                                  (alpha + 2.0) * t);
        return sign_ * weight_->scaled(t, 0.0) * (x > 0.0 ? m : -m);
    }
    int orientation() const override { return sign_; }
    const Weight* weight() const override { return weight_.get(); }
    std::pair<double, double> natural_exponents() const override
    {
        return {l_shift(q1_ - q2_, delta1_ + weight_->delta0()), l_shift(q1_, delta1_ - delta2_ + weight_->delta_inf())};
    }
    std::string describe() const override
    {
        return fmt::format("rational(sign={}, weight={}, q1={}, q2={}, delta1={}, delta2={})", sign_,
                           weight_->describe(), q1_, q2_, delta1_, delta2_);
    }

private:
    double q1_, q2_, delta1_, delta2_;
    std::shared_ptr<const Weight> weight_;
    int sign_;
};

class KelvinNonlinearity final : public Nonlinearity {
public:
    KelvinNonlinearity(std::shared_ptr<const Nonlinearity> base, int n) : base_(std::move(base)), n_(n) {}
    double f(double u, double s) const override
    {
        return base_->f(u * std::pow(s, n_ - 2.0), 1.0 / s) * std::pow(s, -2.0 - n_);
    }
    // The Fowler images of the two problems coincide after t -> -t and alpha -> n-2-alpha.
    double g(double x, double t, double alpha) const override { return base_->g(x, -t, n_ - 2.0 - alpha); }
    std::optional<double> primitive(double x, double t, double alpha) const override
    {
        return base_->primitive(x, -t, n_ - 2.0 - alpha);
    }
    int orientation() const override { return -base_->orientation(); }
    std::pair<double, double> natural_exponents() const override
    {
        const auto [lu, ls] = base_->natural_exponents();
        return {kelvin_exponent(n_, ls), kelvin_exponent(n_, lu)};
    }
    std::string describe() const override { return "kelvin(" + base_->describe() + ")"; }

private:
    std::shared_ptr<const Nonlinearity> base_;
    int n_;
};

}  // namespace

double HardyProfile::operator()(double r) const
{
    return at_log_radius(std::log(r));
}

double Weight::operator()(double r) const
{
    return scaled(std::log(r), 0.0);
}

double Nonlinearity::g(double x, double t, double alpha) const
{
    if (x == 0.0)
        return 0.0;
    return f(x * std::exp(-alpha * t), std::exp(t)) * std::exp((alpha + 2.0) * t);
}

std::optional<double> Nonlinearity::primitive(double, double, double) const
{
    return std::nullopt;
}

std::shared_ptr<const HardyProfile> make_constant_hardy(double eta)
{
    return std::make_shared<ConstantHardy>(eta);
}

std::shared_ptr<const HardyProfile> make_rational_hardy(double c)
{
    return std::make_shared<RationalHardy>(c);
}

std::shared_ptr<const HardyProfile> make_tabulated_hardy(std::vector<double> r, std::vector<double> h, double eta,
                                                         double beta)
{
    return std::make_shared<TabulatedHardy>(std::move(r), std::move(h), eta, beta);
}

std::shared_ptr<const HardyProfile> make_inverted_hardy(std::shared_ptr<const HardyProfile> base)
{
    return std::make_shared<InvertedHardy>(std::move(base));
}

std::shared_ptr<const Weight> make_constant_weight(double c)
{
    return std::make_shared<ConstantWeight>(c);
}

std::shared_ptr<const Weight> make_smoothed_step_weight(double radius, double width, double delta, double amplitude)
{
    return std::make_shared<SmoothedStepWeight>(radius, width, delta, amplitude);
}

std::shared_ptr<const Weight> make_power_product_weight(double amplitude, double radius, double delta0,
                                                        double delta_inf)
{
    return std::make_shared<PowerProductWeight>(amplitude, radius, delta0, delta_inf);
}

std::shared_ptr<const Weight> make_piecewise_sign_weight(double radius, double k0, double delta0, double k_inf,
                                                         double delta_inf)
{
    return std::make_shared<PiecewiseSignWeight>(radius, k0, delta0, k_inf, delta_inf);
}

std::shared_ptr<const Nonlinearity> make_power_nonlinearity(std::vector<PowerTerm> terms,
                                                            std::shared_ptr<const Weight> weight, int sign)
{
    return std::make_shared<PowerNonlinearity>(std::move(terms), std::move(weight), sign);
}

std::shared_ptr<const Nonlinearity> make_rational_nonlinearity(double q1, double q2, double delta1, double delta2,
                                                               std::shared_ptr<const Weight> weight, int sign)
{
    return std::make_shared<RationalNonlinearity>(q1, q2, delta1, delta2, std::move(weight), sign);
}

std::shared_ptr<const Nonlinearity> make_kelvin_nonlinearity(std::shared_ptr<const Nonlinearity> base, int n)
{
    return std::make_shared<KelvinNonlinearity>(std::move(base), n);
}

ProblemSpec make_problem(int n, std::shared_ptr<const HardyProfile> hardy,
                         std::shared_ptr<const Nonlinearity> nonlinearity, std::optional<double> l_u,
                         std::optional<double> l_s, std::optional<double> switch_time, std::string name)
{
    if (n <= 2)
        throw DomainError(fmt::format("dimension n = {} must exceed 2", n));
    if (!hardy || !nonlinearity)
        throw std::invalid_argument("problem needs a Hardy profile and a nonlinearity");
    ProblemSpec p;
    p.n = n;
    p.hardy = std::move(hardy);
    p.nonlinearity = std::move(nonlinearity);
    const auto natural = (l_u && l_s) ? std::pair<double, double>{*l_u, *l_s} : p.nonlinearity->natural_exponents();
    p.l_u = l_u.value_or(natural.first);
    p.l_s = l_s.value_or(natural.second);
    if (!(p.l_u > 2.0) || !(p.l_s > 2.0))
        throw DomainError(fmt::format("Fowler exponents must exceed 2 (l_u={}, l_s={})", p.l_u, p.l_s));
    if (switch_time) {
        p.switch_time = *switch_time;
    } else if (const Weight* w = p.nonlinearity->weight(); w && w->radius()) {
        p.switch_time = std::log(*w->radius());
    }
    p.name = std::move(name);
    return p;
}

ProblemSpec default_problem()
{
    return make_problem(4, make_constant_hardy(0.0),
                        make_power_nonlinearity({{1.0, 6.0, 0.0}}, make_smoothed_step_weight(1.0, 1.0, 0.0)),
                        std::nullopt, std::nullopt, std::nullopt, "default");
}

ProblemSpec hardy_problem(double c)
{
    ProblemSpec p = default_problem();
    p.hardy = make_rational_hardy(c);
    p.name = fmt::format("hardy(C={})", c);
    return p;
}

ProblemSpec aubin_talenti_problem()
{
    return make_problem(4, make_constant_hardy(0.0), make_power_nonlinearity({{1.0, 4.0, 0.0}}, make_constant_weight(1.0)),
                        std::nullopt, std::nullopt, 0.0, "aubin-talenti");
}

ProblemSpec kelvin_dual(const ProblemSpec& p)
{
    ProblemSpec d;
    d.n = p.n;
    d.hardy = make_inverted_hardy(p.hardy);
    d.nonlinearity = make_kelvin_nonlinearity(p.nonlinearity, p.n);
    d.l_u = kelvin_exponent(p.n, p.l_s);
    d.l_s = kelvin_exponent(p.n, p.l_u);
    d.switch_time = -p.switch_time;
    d.name = "kelvin(" + p.name + ")";
    return d;
}

GValue eval_g_checked(double x, double t, const ProblemSpec& p, double l)
{
    const FowlerParams fp = fowler_params(p.n, l);
    GValue r;
    r.value = p.nonlinearity->g(x, t, fp.alpha);
    if (std::isnan(r.value)) {
        r.saturated = true;
        r.value = 0.0;
    } else if (std::isinf(r.value)) {
        r.saturated = true;
        r.value = r.value > 0 ? DBL_MAX : -DBL_MAX;
    }
    return r;
}

double eval_g(double x, double t, const ProblemSpec& p, double l)
{
    return eval_g_checked(x, t, p, l).value;
}

double eval_g_primitive(double x, double t, const ProblemSpec& p, double l)
{
    if (x == 0.0)
        return 0.0;
    const FowlerParams fp = fowler_params(p.n, l);
    if (auto closed = p.nonlinearity->primitive(x, t, fp.alpha))
        return *closed;
    double error = 0.0;
    const auto integrand = [&](double xi) { return p.nonlinearity->g(xi, t, fp.alpha); };
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, x, 15, 1e-12, &error);
    if (!std::isfinite(value) || error > 1e-8 * std::max(1.0, std::fabs(value)))
        throw std::runtime_error(fmt::format("quadrature of g did not converge at x={}, t={} (error {})", x, t, error));
    return value;
}

double limit_probe_time(End end)
{
    return end == End::past ? -80.0 : 80.0;
}

double hardy_limit(const ProblemSpec& p, End end)
{
    return end == End::past ? p.eta() : p.beta();
}

double end_exponent(const ProblemSpec& p, End end)
{
    return end == End::past ? p.l_u : p.l_s;
}

bool autonomous_limit_exists(const ProblemSpec& p, double l, End end)
{
    const double t2 = limit_probe_time(end);
    const double t1 = t2 / 2.0;
    for (double x : {0.25, 0.5, 1.0, 2.0, -1.0, -3.0}) {
        const GValue a = eval_g_checked(x, t1, p, l);
        const GValue b = eval_g_checked(x, t2, p, l);
        if (a.saturated || b.saturated)
            return false;
        if (std::fabs(a.value - b.value) > 1e-8 * std::max(std::fabs(a.value), std::fabs(b.value)) + 1e-14)
            return false;
    }
    return true;
}

double eval_g_limit(double x, const ProblemSpec& p, double l, End end)
{
    return eval_g(x, limit_probe_time(end), p, l);
}

const HypothesisCheck& ValidationReport::get(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return c;
    throw std::out_of_range("no hypothesis named " + name);
}

namespace {

std::vector<double> log_grid(double lo, double hi, int count)
{
    std::vector<double> v(static_cast<std::size_t>(count));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
    return v;
}

std::vector<double> lin_grid(double lo, double hi, int count, bool skip_zero)
{
    std::vector<double> v;
    for (int i = 0; i < count; ++i) {
        const double x = lo + (hi - lo) * i / (count - 1);
        if (skip_zero && x == 0.0)
            continue;
        v.push_back(x);
    }
    return v;
}

void fail(HypothesisCheck& c, const std::string& what)
{
    if (c.passed) {
        c.passed = false;
        c.detail = what;
    }
}

HypothesisCheck check_h(const ProblemSpec& p, const ValidationGrid& grid)
{
    HypothesisCheck c{"H", true, {}, 0};
    const double hc = hardy_critical(p.n);
    for (double r : log_grid(grid.r_min, grid.r_max, grid.r_samples)) {
        ++c.samples;
        const double h = (*p.hardy)(r);
        if (!(h < hc))
            fail(c, fmt::format("h({}) = {} >= (n-2)^2/4 = {}", r, h, hc));
    }
    const double h0 = (*p.hardy)(grid.r_min), h1 = (*p.hardy)(grid.r_max);
    if (std::fabs(h0 - p.eta()) > grid.limit_tol * std::max(1.0, std::fabs(p.eta())))
        fail(c, fmt::format("h({}) = {} differs from declared eta = {}", grid.r_min, h0, p.eta()));
    if (std::fabs(h1 - p.beta()) > grid.limit_tol * std::max(1.0, std::fabs(p.beta())))
        fail(c, fmt::format("h({}) = {} differs from declared beta = {}", grid.r_max, h1, p.beta()));
    if (c.passed)
        c.detail = fmt::format("eta={}, beta={}", p.eta(), p.beta());
    return c;
}

HypothesisCheck check_k(const ProblemSpec& p, const ValidationGrid& grid)
{
    HypothesisCheck c{"K", true, {}, 0};
    const Nonlinearity& nl = *p.nonlinearity;
    const Weight* w = nl.weight();
    const int o = nl.orientation();
    const auto sign_of = [&](double r) {
        const double v = w ? o * (*w)(r) : o * nl.f(1e-3, r);
        return v > 0 ? 1 : (v < 0 ? -1 : 0);
    };
    const auto rs = log_grid(grid.r_min, grid.r_max, grid.r_samples);
    int changes = 0;
    double r_change = NAN;
    int prev = sign_of(rs.front());
    if (prev >= 0)
        fail(c, fmt::format("weight not negative at r = {}", rs.front()));
    for (std::size_t i = 0; i < rs.size(); ++i) {
        ++c.samples;
        const int s = sign_of(rs[i]);
        if (s == 0)
            continue;
        if (s != prev) {
            ++changes;
            if (s < 0 || changes > 1)
                fail(c, fmt::format("extra sign change of the weight near r = {}", rs[i]));
            else
                r_change = std::sqrt(rs[i] * rs[i - 1]);
            prev = s;
        }
    }
    if (changes == 0)
        fail(c, "weight never changes sign");
    if (w) {
        const double a0 = o * w->scaled(std::log(grid.r_min), -w->delta0());
        const double a1 = o * w->scaled(std::log(grid.r_max), -w->delta_inf());
        const double k0 = o * w->k0(), k1 = o * w->k_inf();
        if (std::fabs(a0 - k0) > 1e-4 * std::fabs(k0))
            fail(c, fmt::format("K(r) r^-delta0 = {} at r = {} but K0 = {}", a0, grid.r_min, k0));
        if (std::fabs(a1 - k1) > 1e-4 * std::fabs(k1))
            fail(c, fmt::format("K(r) r^-deltaInf = {} at r = {} but KInf = {}", a1, grid.r_max, k1));
        if (c.passed)
            c.detail = fmt::format("R~{}, delta0={}, deltaInf={}", r_change, w->delta0(), w->delta_inf());
    } else if (c.passed) {
        c.detail = fmt::format("R~{} (sign pattern only)", r_change);
    }
    return c;
}

HypothesisCheck check_ga(const ProblemSpec& p, End end, const ValidationGrid& grid)
{
    HypothesisCheck c{end == End::past ? "GA-past" : "GA-future", true, {}, 0};
    const double l = end_exponent(p, end);
    if (!autonomous_limit_exists(p, l, end)) {
        fail(c, "autonomous limit unavailable");
        return c;
    }
    const auto xs = lin_grid(grid.x_min, grid.x_max, grid.x_samples, true);
    const double k = eval_g_limit(1.0, p, l, end);
    if (k == 0.0) {
        fail(c, "limit vanishes");
        return c;
    }
    // |g/x| increasing in |x| on each half line, with the sign of g(1)
    double last_pos = 0.0, last_neg = 0.0;
    std::vector<double> pos, neg;
    for (double x : xs)
        (x > 0 ? pos : neg).push_back(x);
    std::reverse(neg.begin(), neg.end());
    for (auto* half : {&pos, &neg}) {
        double& last = half == &pos ? last_pos : last_neg;
        for (double x : *half) {
            ++c.samples;
            const double ratio = eval_g_limit(x, p, l, end) / x;
            if (ratio * k <= 0.0)
                fail(c, fmt::format("g(x)/x changes sign at x = {}", x));
            else if (std::fabs(ratio) <= last)
                fail(c, fmt::format("|g(x)/x| not increasing at x = {}", x));
            last = std::fabs(ratio);
        }
    }
    if (c.passed)
        c.detail = fmt::format("l={}, K sign {}", l, k > 0 ? "+" : "-");
    return c;
}

HypothesisCheck check_sign_condition(const ProblemSpec& p, bool regular, const ValidationGrid& grid)
{
    // regular: g_{l_u}/x <= 0 before T, liminf g_{l_s}/x >= 0 after T; otherwise mirrored.
    HypothesisCheck c{regular ? "L1" : "L2", true, {}, 0};
    const auto rs = log_grid(grid.r_min, grid.r_max, grid.r_samples);
    const auto xs = lin_grid(grid.x_min, grid.x_max, grid.x_samples, true);
    const double big = std::max(std::fabs(grid.x_min), std::fabs(grid.x_max));
    for (double r : rs) {
        const double t = std::log(r);
        if (t == p.switch_time)
            continue;
        const bool before = t < p.switch_time;
        const bool negative_side = regular ? before : !before;
        const double l = before ? p.l_u : p.l_s;
        if (negative_side) {
            for (double x : xs) {
                ++c.samples;
                const double v = eval_g(x, t, p, l) / x;
                if (v > 0.0)
                    fail(c, fmt::format("g/x = {} > 0 at x = {}, t = {}", v, x, t));
            }
        } else {
            for (double x : {big, -big, 10 * big, -10 * big, 100 * big, -100 * big}) {
                ++c.samples;
                const double v = eval_g(x, t, p, l) / x;
                if (v < 0.0)
                    fail(c, fmt::format("g/x = {} < 0 at large x = {}, t = {}", v, x, t));
            }
        }
    }
    if (c.passed)
        c.detail = fmt::format("T={}", p.switch_time);
    return c;
}

HypothesisCheck check_window(const ProblemSpec& p, End end)
{
    const double l = end_exponent(p, end);
    const double h = hardy_limit(p, end);
    HypothesisCheck c{end == End::past ? "gu" : "gs", true, {}, 1};
    bool ok = false;
    try {
        ok = saddle_window(p.n, h, l);
    } catch (const DomainError& e) {
        fail(c, e.what());
        return c;
    }
    if (!ok)
        fail(c, fmt::format("l = {} outside the saddle window ({}, {})", l, serrin_exponent(p.n, h),
                            upper_exponent(p.n, h).to_string()));
    else
        c.detail = fmt::format("l = {} in ({}, {})", l, serrin_exponent(p.n, h), upper_exponent(p.n, h).to_string());
    return c;
}

HypothesisCheck check_superlinear(const ProblemSpec& p, const ValidationGrid& grid)
{
    HypothesisCheck c{"superlinear", true, {}, 0};
    const double eps = 1e-12;
    for (double r : log_grid(grid.r_min, grid.r_max, grid.r_samples)) {
        ++c.samples;
        const double f0 = p.nonlinearity->f(0.0, r);
        const double slope = p.nonlinearity->f(eps, r) / eps;
        const double scale = std::max(1.0, std::fabs(p.nonlinearity->f(1.0, r)));
        if (f0 != 0.0)
            fail(c, fmt::format("f(0, {}) = {}", r, f0));
        else if (!(std::fabs(slope) <= 1e-3 * scale))
            fail(c, fmt::format("f(u,{})/u = {} does not vanish as u -> 0", r, slope));
    }
    return c;
}

}  // namespace

ValidationReport validate(const ProblemSpec& p, const ValidationGrid& grid)
{
    if (!(grid.r_min <= 1e-6) || !(grid.r_max >= 1e6) || grid.r_samples < 2 || grid.x_samples < 2)
        throw std::invalid_argument("validation grid must cover [1e-6, 1e6] in r with at least two samples");
    ValidationReport rep;
    rep.checks.push_back(check_h(p, grid));
    rep.checks.push_back(check_k(p, grid));
    rep.checks.push_back(check_ga(p, End::past, grid));
    rep.checks.push_back(check_ga(p, End::future, grid));
    rep.checks.push_back(check_sign_condition(p, true, grid));
    rep.checks.push_back(check_sign_condition(p, false, grid));
    rep.checks.push_back(check_window(p, End::past));
    rep.checks.push_back(check_window(p, End::future));
    rep.checks.push_back(check_superlinear(p, grid));
    return rep;
}

std::vector<std::string> failing_hypotheses(const ProblemSpec& p, Theorem which, const ValidationGrid& grid)
{
    const ValidationReport rep = validate(p, grid);
    std::vector<std::string> bad;
    const auto need = [&](const std::string& name) {
        if (!rep.passed(name))
            bad.push_back(name + ": " + rep.get(name).detail);
    };
    need("H");
    need("superlinear");
    if (which == Theorem::existence_regular) {
        need("gu");
        need("L1");
        need("GA-future");
        if (rep.passed("GA-future") && !(eval_g_limit(1.0, p, p.l_s, End::future) > 0.0))
            bad.push_back("GA-future: limit has K < 0");
        const ExtendedReal upper = upper_exponent(p.n, p.beta());
        if (!(p.l_s > sobolev_exponent(p.n) && upper > p.l_s))
            bad.push_back(fmt::format("l_s window: l_s = {} not in (2n/(n-2), I(beta))", p.l_s));
    } else {
        need("gs");
        need("L2");
        need("GA-past");
        if (rep.passed("GA-past") && !(eval_g_limit(1.0, p, p.l_u, End::past) > 0.0))
            bad.push_back("GA-past: limit has K < 0");
        if (!(p.l_u > serrin_exponent(p.n, p.eta()) && p.l_u < sobolev_exponent(p.n)))
            bad.push_back(fmt::format("l_u window: l_u = {} not in (serrin(eta), 2n/(n-2))", p.l_u));
    }
    return bad;
}

}  // namespace hardyflow
