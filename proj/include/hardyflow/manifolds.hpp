#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardyflow/dynamics.hpp"
#include "hardyflow/fowler.hpp"
#include "hardyflow/problem.hpp"

namespace hardyflow {

enum class Side { unstable_plus, unstable_minus, stable_plus, stable_minus };
std::string to_string(Side s);
bool is_unstable(Side s);
/// +1 for the plus branches, -1 for the minus ones.
int branch_sign(Side s);

/// Integrator settings for manifold transport: end detection off.
Controls transport_controls();

struct SeedOptions {
    double eps0 = 1e-8;
    Controls controls = transport_controls();
};

/// Point of W^u at the linear scale eps0, in exponent l: (t0, x, y) = (t0, d e^{(alpha-kappa(eta))t0} (1, -kappa(eta))).
FowlerState seed_unstable(double d, const ProblemSpec& p, double l, double eps0 = 1e-8);
/// Point of W^s at scale eps0: (t1, L e^{(gamma+kappa(beta))t1} (1, kappa(beta)-(n-2))).
FowlerState seed_stable(double L, const ProblemSpec& p, double l, double eps0 = 1e-8);

struct Transport {
    std::optional<FowlerState> state;  // at tau in the requested exponent; empty on blow-up or failure
    Termination termination = Termination::reached_t_end;
    std::optional<double> blow_up_time;
    int zero_count = 0;
};

/// Flows the unstable seed of parameter d to tau. The state keeps the trajectory's unwrapped angle.
Transport transport_unstable(double d, double tau, const ProblemSpec& p, double l_out, const SeedOptions& o = {});
/// Flows the stable seed of parameter L backward to tau.
Transport transport_stable(double L, double tau, const ProblemSpec& p, double l_out, const SeedOptions& o = {});

struct SeedCheck {
    bool passed = false;
    double relative_change = 0.0;
    double threshold = 0.0;
};

/// Seeds at eps0 and eps0/2, integrates both to t_c and compares.
SeedCheck richardson_check(Side side, double param, double t_c, const ProblemSpec& p, double l,
                           const SeedOptions& o = {});

struct CurveSample {
    double param = 0.0;
    double theta = 0.0;  // unwrapped along the curve
    double R = 0.0;
    FowlerState state;   // phi is the angle travelled by the trajectory since its seed
};

struct ManifoldCurve {
    Side side = Side::unstable_plus;
    double tau = 0.0;
    double l = 0.0;
    std::vector<CurveSample> samples;
    std::optional<double> truncated_at;
    bool under_resolved = false;
    /// Surviving parameters beyond the truncation, not connected to the origin component.
    std::vector<double> detached;
};

struct TraceOptions {
    SeedOptions seed;
    double max_angle_gap = 0.39269908169872414;  // pi/8
    double max_chord = 0.1;                      // relative to the larger radius
    std::size_t max_samples = 100000;
    /// Extra samples accumulating at the upper end of the range.
    bool cluster_upper = false;
    int truncation_bisections = 40;
};

/// Traces the branch over |param| in [lo, hi] (0 < lo < hi); the branch sign gives the parameter sign.
ManifoldCurve trace(Side side, double tau, std::pair<double, double> range, int n_samples, const ProblemSpec& p,
                    double l, const TraceOptions& o = {});

/// Angle at which a branch leaves the origin: -atan(kappa(eta)) or atan(kappa(beta)-(n-2)), minus pi for minus branches.
double asymptotic_tangent(Side side, const ProblemSpec& p);

struct IntersectionRecord {
    int j = 0;
    double d_star = 0.0;
    double L_star = 0.0;
    double theta = 0.0;
    double R = 0.0;
    bool first_in_d = false;
    bool converged = false;
    double residual = 0.0;
};

struct BracketCheck {
    int j = 0;
    std::optional<double> L_down;  // |L| where the shifted branch reaches -pi/2
    std::optional<double> L_up;    // |L| where it reaches pi/2
    bool passed = true;
    std::string detail;
};

struct IntersectionResult {
    std::vector<IntersectionRecord> records;
    std::vector<BracketCheck> brackets;
};

/// Crossings of the unstable curve with Gamma^s_j, j = 0..k_max: even j from stable_plus shifted by -j pi,
/// odd j from stable_minus shifted by -(j-1) pi. Refined in (d, L) until the Cartesian points agree to tol.
IntersectionResult intersections(const ManifoldCurve& unstable, const ManifoldCurve& stable_plus,
                                 const ManifoldCurve& stable_minus, int k_max, const ProblemSpec& p,
                                 const SeedOptions& o = {}, double tol = 1e-9);

enum class BoundKind { regular_side, fast_decay_side };

struct Bound {
    double value = 0.0;
    bool infinite = false;  // no blow-up up to cap
    double cap = 1e6;
};

/// Smallest |parameter| whose trajectory blows up before reaching tau, to relative tolerance rel.
Bound continuability_bounds(double tau, BoundKind kind, const ProblemSpec& p, double l, int sign = 1,
                            const SeedOptions& o = {}, double cap = 1e6, double rel = 1e-6);

/// Slope y/x of W^s(tau) at the origin, from a trace at small L.
double stable_tangent_slope(double tau, const ProblemSpec& p, double l, const SeedOptions& o = {});

}  // namespace hardyflow
