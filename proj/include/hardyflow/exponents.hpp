#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace hardyflow {

/// Thrown when an argument lies outside the domain where a formula is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A real number or +infinity. Comparisons against the infinite value are exact.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    constexpr explicit ExtendedReal(double v) : value_(v) {}

    static constexpr ExtendedReal infinity()
    {
        ExtendedReal r;
        r.infinite_ = true;
        return r;
    }

    constexpr bool is_infinite() const { return infinite_; }
    /// Finite value; throws for the infinite sentinel.
    double value() const;

    friend constexpr bool operator==(const ExtendedReal& a, double b) { return !a.infinite_ && a.value_ == b; }
    friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b)
    {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, double b)
    {
        if (a.infinite_)
            return std::partial_ordering::greater;
        return a.value_ <=> b;
    }

    std::string to_string() const;

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

struct ExponentBundle {
    int n = 0;
    double eta = 0.0;
    double beta = 0.0;
    double serrin = 0.0;      // 2(n-1)/(n-2)
    double sobolev = 0.0;     // 2n/(n-2)
    double serrin_eta = 0.0;  // Hardy-shifted Serrin exponent at r -> 0
    ExtendedReal upper_eta;   // I(eta)
    double serrin_beta = 0.0;
    ExtendedReal upper_beta;
    double kappa_eta = 0.0;
    double kappa_beta = 0.0;
};

struct FowlerParams {
    double l = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
};

/// Critical Hardy coupling (n-2)^2/4.
double hardy_critical(int n);

double serrin_exponent(int n);
double sobolev_exponent(int n);
double serrin_exponent(int n, double eta);
ExtendedReal upper_exponent(int n, double eta);
double kappa(int n, double eta);

ExponentBundle critical_exponents(int n, double eta, double beta);
FowlerParams fowler_params(int n, double l);

/// l(q, delta) = 2(q + delta)/(2 + delta).
double l_shift(double q, double delta);

/// True iff serrin_exponent(n, eta) < l < upper_exponent(n, eta).
bool saddle_window(int n, double eta, double l);

/// Exponent of the Kelvin-dual problem; an involution on l > 2*.
double kelvin_exponent(int n, double l);

}  // namespace hardyflow
