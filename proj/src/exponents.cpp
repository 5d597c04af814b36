#include "hardyflow/exponents.hpp"

#include <cmath>

#include <fmt/format.h>

namespace hardyflow {

double ExtendedReal::value() const
{
    if (infinite_)
        throw DomainError("value() of the infinite sentinel");
    return value_;
}

std::string ExtendedReal::to_string() const
{
    return infinite_ ? std::string("inf") : fmt::format("{}", value_);
}

namespace {

void check_dimension(int n)
{
    if (n <= 2)
        throw DomainError(fmt::format("dimension n = {} must exceed 2", n));
}

void check_hardy(int n, double eta, const char* name)
{
    if (!(eta < hardy_critical(n)))
        throw DomainError(fmt::format("hypothesis H violated: {} = {} >= (n-2)^2/4 = {}", name, eta,
                                      hardy_critical(n)));
}

double root_disc(int n, double eta)
{
    const double m = n - 2.0;
    return std::sqrt(m * m - 4.0 * eta);
}

}  // namespace

double hardy_critical(int n)
{
    const double m = n - 2.0;
    return m * m / 4.0;
}

double serrin_exponent(int n)
{
    check_dimension(n);
    return 2.0 * (n - 1.0) / (n - 2.0);
}

double sobolev_exponent(int n)
{
    check_dimension(n);
    return 2.0 * n / (n - 2.0);
}

double serrin_exponent(int n, double eta)
{
    check_dimension(n);
    check_hardy(n, eta, "eta");
    const double s = root_disc(n, eta);
    return 2.0 * (n + s) / (n - 2.0 + s);
}

ExtendedReal upper_exponent(int n, double eta)
{
    check_dimension(n);
    check_hardy(n, eta, "eta");
    if (eta <= 0.0)
        return ExtendedReal::infinity();
    const double s = root_disc(n, eta);
    return ExtendedReal(2.0 * (n - s) / (n - 2.0 - s));
}

double kappa(int n, double eta)
{
    check_dimension(n);
    check_hardy(n, eta, "eta");
    if (eta == 0.0)
        return 0.0;
    // (m - s)/2 written without cancellation
    const double m = n - 2.0;
    const double s = root_disc(n, eta);
    return 2.0 * eta / (m + s);
}

ExponentBundle critical_exponents(int n, double eta, double beta)
{
    check_dimension(n);
    check_hardy(n, eta, "eta");
    check_hardy(n, beta, "beta");
    ExponentBundle b;
    b.n = n;
    b.eta = eta;
    b.beta = beta;
    b.serrin = serrin_exponent(n);
    b.sobolev = sobolev_exponent(n);
    b.serrin_eta = serrin_exponent(n, eta);
    b.upper_eta = upper_exponent(n, eta);
    b.serrin_beta = serrin_exponent(n, beta);
    b.upper_beta = upper_exponent(n, beta);
    b.kappa_eta = kappa(n, eta);
    b.kappa_beta = kappa(n, beta);
    return b;
}

FowlerParams fowler_params(int n, double l)
{
    check_dimension(n);
    if (!(l > 2.0))
        throw DomainError(fmt::format("Fowler exponent l = {} must exceed 2", l));
    FowlerParams p;
    p.l = l;
    p.alpha = 2.0 / (l - 2.0);
    p.gamma = p.alpha + 2.0 - n;
    return p;
}

double l_shift(double q, double delta)
{
    if (!(delta > -2.0))
        throw DomainError(fmt::format("delta = {} must exceed -2", delta));
    if (!(q > 2.0))
        throw DomainError(fmt::format("q = {} must exceed 2", q));
    return 2.0 * (q + delta) / (2.0 + delta);
}

bool saddle_window(int n, double eta, double l)
{
    if (!(l > 2.0))
        throw DomainError(fmt::format("Fowler exponent l = {} must exceed 2", l));
    const double lo = serrin_exponent(n, eta);
    const ExtendedReal hi = upper_exponent(n, eta);
    return lo < l && hi > l;
}

double kelvin_exponent(int n, double l)
{
    if (!(l > serrin_exponent(n)))
        throw DomainError(fmt::format("Kelvin exponent needs l > 2(n-1)/(n-2), got l = {}", l));
    return 2.0 * (l * (n - 1.0) - 2.0 * n) / (l * (n - 2.0) - 2.0 * n + 2.0);
}

}  // namespace hardyflow
