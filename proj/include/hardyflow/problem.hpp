#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hardyflow/exponents.hpp"

namespace hardyflow {

enum class End { past, future };

/// Radial Hardy coefficient h(r). Evaluated in log-radius to stay finite for extreme r.
class HardyProfile {
public:
    virtual ~HardyProfile() = default;
    /// h(e^t)
    virtual double at_log_radius(double t) const = 0;
    double operator()(double r) const;
    virtual double eta() const = 0;   // limit r -> 0
    virtual double beta() const = 0;  // limit r -> infinity
    virtual bool is_constant() const { return false; }
    virtual std::string describe() const = 0;
};

/// Weight K(r), evaluated as K(e^t) e^{shift t} so that power scalings cancel before exponentiation.
class Weight {
public:
    virtual ~Weight() = default;
    virtual double scaled(double t, double shift) const = 0;
    double operator()(double r) const;
    /// Sign-change radius R, if the kind has one.
    virtual std::optional<double> radius() const { return std::nullopt; }
    virtual double delta0() const = 0;
    virtual double delta_inf() const = 0;
    virtual double k0() const = 0;
    virtual double k_inf() const = 0;
    virtual std::string describe() const = 0;
};

class Nonlinearity {
public:
    virtual ~Nonlinearity() = default;
    virtual double f(double u, double r) const = 0;
    /// g_l(x,t) = f(x e^{-alpha t}, e^t) e^{(alpha+2)t}.
    virtual double g(double x, double t, double alpha) const;
    /// Closed-form primitive of g in x, when the kind admits one.
    virtual std::optional<double> primitive(double x, double t, double alpha) const;
    /// +1 when the weight is negative near 0 and positive near infinity, -1 for the mirrored pattern.
    virtual int orientation() const = 0;
    /// The weight, if the nonlinearity is a weighted family.
    virtual const Weight* weight() const { return nullptr; }
    /// Natural Fowler exponents (l_u, l_s) that make the limits at 0 and infinity autonomous.
    virtual std::pair<double, double> natural_exponents() const = 0;
    virtual std::string describe() const = 0;
};

std::shared_ptr<const HardyProfile> make_constant_hardy(double eta);
/// h(r) = C r^2/(1+r^2): eta = 0, beta = C.
std::shared_ptr<const HardyProfile> make_rational_hardy(double c);
/// Piecewise linear in ln r through (r_i, h_i), constant outside the table.
std::shared_ptr<const HardyProfile> make_tabulated_hardy(std::vector<double> r, std::vector<double> h, double eta,
                                                         double beta);
/// h(1/r), the profile of the Kelvin-dual problem.
std::shared_ptr<const HardyProfile> make_inverted_hardy(std::shared_ptr<const HardyProfile> base);

std::shared_ptr<const Weight> make_constant_weight(double c);
/// amplitude * tanh((r-R)/width) * r^delta
std::shared_ptr<const Weight> make_smoothed_step_weight(double radius, double width, double delta,
                                                        double amplitude = 1.0);
/// amplitude * (r-R) * r^delta0 * (R+r)^(deltaInf-delta0-1)
std::shared_ptr<const Weight> make_power_product_weight(double amplitude, double radius, double delta0,
                                                        double delta_inf);
/// K0 r^delta0 on (0,R), KInf r^deltaInf on (R,inf)
std::shared_ptr<const Weight> make_piecewise_sign_weight(double radius, double k0, double delta0, double k_inf,
                                                         double delta_inf);

struct PowerTerm {
    double coef = 1.0;
    double q = 0.0;
    double delta = 0.0;
};

/// sign * K(r) * sum_j coef_j r^delta_j u|u|^{q_j-2}
std::shared_ptr<const Nonlinearity> make_power_nonlinearity(std::vector<PowerTerm> terms,
                                                            std::shared_ptr<const Weight> weight, int sign = 1);
/// sign * K(r) * |u|^{q1-2}u/(1+|u|^{q2}) * r^delta1/(1+r^delta2)
std::shared_ptr<const Nonlinearity> make_rational_nonlinearity(double q1, double q2, double delta1, double delta2,
                                                               std::shared_ptr<const Weight> weight, int sign = 1);
/// f~(u,s) = f(u s^{n-2}, 1/s) s^{-2-n}
std::shared_ptr<const Nonlinearity> make_kelvin_nonlinearity(std::shared_ptr<const Nonlinearity> base, int n);

struct ProblemSpec {
    int n = 4;
    std::shared_ptr<const HardyProfile> hardy;
    std::shared_ptr<const Nonlinearity> nonlinearity;
    double l_u = 0.0;
    double l_s = 0.0;
    double switch_time = 0.0;  // the time T separating the two sign regimes
    std::string name;

    double eta() const { return hardy->eta(); }
    double beta() const { return hardy->beta(); }
    double h(double t) const { return hardy->at_log_radius(t); }
};

/// Fills l_u, l_s and switch_time from the nonlinearity when they are unset (zero).
ProblemSpec make_problem(int n, std::shared_ptr<const HardyProfile> hardy,
                         std::shared_ptr<const Nonlinearity> nonlinearity, std::optional<double> l_u = std::nullopt,
                         std::optional<double> l_s = std::nullopt,
                         std::optional<double> switch_time = std::nullopt, std::string name = {});

/// n=4, h=0, f = tanh(r-1) u|u|^4
ProblemSpec default_problem();
/// default_problem with h(r) = C r^2/(1+r^2)
ProblemSpec hardy_problem(double c);
/// n=4, h=0, f = u^3 (autonomous at l = 4)
ProblemSpec aubin_talenti_problem();
/// Kelvin inversion u(r) -> u(1/r) r^{2-n} applied to the whole problem.
ProblemSpec kelvin_dual(const ProblemSpec& p);

struct GValue {
    double value = 0.0;
    bool saturated = false;
};

GValue eval_g_checked(double x, double t, const ProblemSpec& p, double l);
/// Saturates to +-DBL_MAX on overflow.
double eval_g(double x, double t, const ProblemSpec& p, double l);
/// G(x,t) with dG/dx = g, G(0,t) = 0; Gauss-Kronrod quadrature when no closed form exists.
double eval_g_primitive(double x, double t, const ProblemSpec& p, double l);

/// Time at which the autonomous limits are probed.
double limit_probe_time(End end);
bool autonomous_limit_exists(const ProblemSpec& p, double l, End end);
/// g^{-inf} or g^{+inf} approximated at limit_probe_time.
double eval_g_limit(double x, const ProblemSpec& p, double l, End end);
/// Hardy limit at the requested end (eta for past, beta for future).
double hardy_limit(const ProblemSpec& p, End end);
/// Fowler exponent used at the requested end (l_u for past, l_s for future).
double end_exponent(const ProblemSpec& p, End end);

struct ValidationGrid {
    double r_min = 1e-6;
    double r_max = 1e6;
    int r_samples = 512;
    double x_min = -10.0;
    double x_max = 10.0;
    int x_samples = 256;
    double limit_tol = 1e-6;
};

struct HypothesisCheck {
    std::string name;
    bool passed = true;
    std::string detail;  // first violating sample, or a summary when passed
    int samples = 0;
};

struct ValidationReport {
    std::vector<HypothesisCheck> checks;
    const HypothesisCheck& get(const std::string& name) const;
    bool passed(const std::string& name) const { return get(name).passed; }
};

ValidationReport validate(const ProblemSpec& p, const ValidationGrid& grid = {});

enum class Theorem { existence_regular, existence_singular };

/// Names of the hypotheses a theorem needs that fail for p; empty when all hold.
std::vector<std::string> failing_hypotheses(const ProblemSpec& p, Theorem which, const ValidationGrid& grid = {});

}  // namespace hardyflow
