#include "hardyflow/fowler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hardyflow/exponents.hpp"

namespace hardyflow {

using std::numbers::pi;

double FowlerState::rho() const
{
    return std::hypot(x, y);
}

double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * pi);
    if (a <= -pi)
        a += 2.0 * pi;
    return a;
}

FowlerState to_fowler(const PhysicalState& p, double l, int n)
{
    if (!(p.r > 0.0))
        throw DomainError("to_fowler needs r > 0");
    const FowlerParams fp = fowler_params(n, l);
    FowlerState s;
    s.t = std::log(p.r);
    s.x = p.u * std::pow(p.r, fp.alpha);
    s.y = p.du * std::pow(p.r, fp.alpha + 1.0);
    s.l = l;
    s.phi = std::atan2(s.y, s.x);
    return s;
}

PhysicalState from_fowler(const FowlerState& s, int n)
{
    const FowlerParams fp = fowler_params(n, s.l);
    PhysicalState p;
    p.r = std::exp(s.t);
    p.u = s.x * std::exp(-fp.alpha * s.t);
    p.du = s.y * std::exp(-(fp.alpha + 1.0) * s.t);
    return p;
}

FowlerState switch_l(const FowlerState& s, double l2)
{
    if (!(l2 > 2.0) || !(s.l > 2.0))
        throw DomainError("switch_l needs exponents above 2");
    const double a1 = 2.0 / (s.l - 2.0), a2 = 2.0 / (l2 - 2.0);
    const double k = std::exp((a2 - a1) * s.t);
    FowlerState r = s;
    r.x = s.x * k;
    r.y = s.y * k;
    r.l = l2;
    return r;
}

FowlerState kelvin(const FowlerState& s, int n)
{
    FowlerState r = s;
    r.t = -s.t;
    r.y = -s.y - (n - 2.0) * s.x;
    const double principal = std::atan2(s.y, s.x);
    const double turns = std::round((s.phi - principal) / (2.0 * pi));
    r.phi = std::atan2(r.y, r.x) - 2.0 * pi * turns;
    return r;
}

std::vector<double> polar_unwrap(const std::vector<std::pair<double, double>>& samples)
{
    std::vector<double> out;
    out.reserve(samples.size());
    double prev = 0.0;
    for (const auto& [x, y] : samples) {
        if (x == 0.0 && y == 0.0)
            throw DomainError("polar angle undefined at the origin");
        const double a = std::atan2(y, x);
        if (out.empty())
            out.push_back(a);
        else
            out.push_back(out.back() + wrap_angle(a - prev));
        prev = a;
    }
    return out;
}

}  // namespace hardyflow
