#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardyflow/fowler.hpp"
#include "hardyflow/problem.hpp"

namespace hardyflow {

std::pair<double, double> vector_field(double t, double x, double y, const ProblemSpec& p, double l);

enum class EventKind { zero_crossing, entered_origin_ball, entered_p_ball, blow_up_abort };
enum class Termination { reached_t_end, converged_origin, converged_p_plus, converged_p_minus, blow_up, step_failure };

std::string to_string(EventKind k);
std::string to_string(Termination t);

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::zero_crossing;
    double x = 0.0;
    double y = 0.0;
};

struct Controls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-2;
    double max_step = 0.5;
    double min_step = 1e-14;
    std::size_t max_steps = 4'000'000;
    /// Largest wrapped angle change accepted in one step.
    double max_angle_step = std::numbers::pi / 4;
    /// When |F| exceeds speed_cap * (1 + rho) the flow is slowed to that speed, so blow-up stays resolvable.
    double speed_cap = 10.0;

    double rho_max = 1e8;
    int blowup_steps = 3;

    bool detect_origin = true;
    double origin_radius = 1e-2;
    double origin_angle_tol = 0.05;
    double origin_dwell = 2.0;

    bool detect_p = true;
    double p_radius = 1e-5;
    double p_dwell = 5.0;

    /// Checks the documented ranges; throws std::invalid_argument.
    void check() const;
};

struct Trajectory {
    std::vector<FowlerState> states;
    std::vector<Event> events;
    Termination termination = Termination::reached_t_end;
    int zero_count = 0;
    std::optional<double> blow_up_time;
    /// Index range [first, last] of the accepted origin dwell.
    std::optional<std::pair<std::size_t, std::size_t>> dwell;
    std::size_t rejected_steps = 0;
};

/// Linearization of the autonomous limit at the origin.
struct OriginModel {
    double alpha = 0.0;
    double gamma = 0.0;
    double h = 0.0;
    double kappa = 0.0;
    double lambda_s = 0.0;  // gamma + kappa
    double lambda_u = 0.0;  // alpha - kappa
    double slope_s = 0.0;   // -(n-2-kappa)
    double slope_u = 0.0;   // -kappa
    bool saddle = false;

    /// Coefficient of the stable eigenvector (1, slope_s) in (x, y).
    double stable_component(double x, double y) const { return (y - slope_u * x) / (slope_s - slope_u); }
    /// Coefficient of the unstable eigenvector (1, slope_u) in (x, y).
    double unstable_component(double x, double y) const { return (y - slope_s * x) / (slope_u - slope_s); }
};

OriginModel origin_model(const ProblemSpec& p, double l, End end);

enum class Stability { stable, unstable, center, saddle };
std::string to_string(Stability s);

struct FixedPointInfo {
    std::string name;  // "O", "P+", "P-"
    double x = 0.0;
    double y = 0.0;
    Stability stability = Stability::saddle;
    std::array<std::complex<double>, 2> eigenvalues;
};

/// Critical points of the autonomous limit at the requested end. Throws when the limit is unavailable.
std::vector<FixedPointInfo> fixed_points(const ProblemSpec& p, double l, End end);

/// Positive P_x of the autonomous limit, if K > 0 and it exists.
std::optional<double> p_location(const ProblemSpec& p, double l, End end);

/// Integrates system (S) in the exponent start.l. Backward when t_end < start.t.
Trajectory integrate(const FowlerState& start, double t_end, const ProblemSpec& p, const Controls& c = {});

/// First integral at l = 2n/(n-2) with h constant, using l = p.l_u.
double critical_energy(double x, double y, double t, const ProblemSpec& p);

enum class EdgeSide { inward, outward, unchecked };

struct Triangle {
    std::array<std::pair<double, double>, 3> v;  // O, A, B
};

struct EdgeReport {
    std::string name;  // "o", "a", "b": edge opposite to O, A, B
    EdgeSide side = EdgeSide::unchecked;
    bool passed = true;
    int samples = 0;
    std::string first_violation;
};

struct RegionReport {
    std::array<EdgeReport, 3> edges;
    bool passed() const;
};

/// Sign of the flow across each edge against its outward normal, on an edge x time grid.
RegionReport verify_invariant_region(const Triangle& tri, std::pair<double, double> t_range,
                                     const std::array<EdgeSide, 3>& sides, const ProblemSpec& p, double l,
                                     int edge_samples = 40, int time_samples = 25);

/// Triangle O, (d, -(n-2)d/2), (0, -(n-2)d/2) with d the largest admissible size for t in [tau, tau + span].
Triangle stable_side_triangle(const ProblemSpec& p, double tau, double span = 40.0);
/// Triangle O, (xi, m xi), (xi, -(n-2)xi/2) with m^2 the supremum of -h - g/x over 0 < x <= xi, t <= tau.
Triangle unstable_side_triangle(const ProblemSpec& p, double xi, double tau, double span = 40.0);

}  // namespace hardyflow
