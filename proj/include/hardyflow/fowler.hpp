#pragma once

#include <utility>
#include <vector>

namespace hardyflow {

struct FowlerState {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double l = 0.0;
    double phi = 0.0;  // unwrapped polar angle of (x, y)

    double rho() const;
};

struct PhysicalState {
    double r = 1.0;
    double u = 0.0;
    double du = 0.0;
};

FowlerState to_fowler(const PhysicalState& p, double l, int n);
PhysicalState from_fowler(const FowlerState& s, int n);

/// Re-expresses s in the exponent l2; the angle is unchanged.
FowlerState switch_l(const FowlerState& s, double l2);

/// (t, x, y) -> (-t, x, -y-(n-2)x). The angle keeps the image's winding count negated, so kelvin is an involution.
FowlerState kelvin(const FowlerState& s, int n);

/// Continuous lift of atan2 along the samples; the first angle is the principal value.
std::vector<double> polar_unwrap(const std::vector<std::pair<double, double>>& samples);

/// Angle reduced to (-pi, pi].
double wrap_angle(double a);

}  // namespace hardyflow
