#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hardyflow/dynamics.hpp"
#include "hardyflow/manifolds.hpp"
#include "hardyflow/problem.hpp"

namespace hardyflow {

/// A theorem's hypotheses fail for the problem; what() names them.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(const std::string& what, std::vector<std::string> failing)
        : std::runtime_error(what), failing_(std::move(failing))
    {
    }
    const std::vector<std::string>& failing() const { return failing_; }

private:
    std::vector<std::string> failing_;
};

enum class OriginBehavior { regular, singular, blow_up, undetermined };
enum class EndBehavior { fast_decay, slow_decay, blow_up, undetermined };
std::string to_string(OriginBehavior b);
std::string to_string(EndBehavior b);

struct SolutionClass {
    OriginBehavior origin_behavior = OriginBehavior::regular;
    EndBehavior end_behavior = EndBehavior::undetermined;
    int zeros = 0;
    std::optional<double> d;
    std::optional<double> L;
    std::optional<double> blow_up_radius;
    /// +1 / -1 for convergence to +P / -P.
    int p_side = 0;
    /// Angle swept from the seed to the acceptance point (or the last state).
    double winding = 0.0;
    Termination termination = Termination::reached_t_end;
    std::vector<FowlerState> path;  // filled when requested
    std::vector<Event> events;      // idem

    /// "R-2-s", "R-0-f", "S-0-f", ...
    std::string label() const;
};

struct ClassifyOptions {
    double horizon = 200.0;
    double eps0 = 1e-8;
    Controls controls;
    bool keep_path = false;
    /// Stop at the origin acceptance; when false only P convergence, blow-up or the horizon end the run.
    bool stop_at_origin = true;
};

/// R-solution u(r,d): seeded at r = 0, flowed in l_u up to the switch time, then in l_s with end detection.
SolutionClass classify(double d, const ProblemSpec& p, const ClassifyOptions& o = {});
/// Fast-decay solution v(r,L): seeded at infinity and flowed backward; the origin behavior is the result.
SolutionClass classify_from_infinity(double L, const ProblemSpec& p, const ClassifyOptions& o = {});

struct ShootOptions {
    ClassifyOptions classify;
    int sign = 1;
    int interval_samples = 32;
    double bisection_rel = 1e-10;
    bool check_tolerance = true;
    int trace_samples = 96;
    double trace_lo = 1e-4;
    double L_cap = 1e6;
};

struct Connection {
    int k = 0;
    double value = 0.0;     // A_k (d) or B_k (|L|)
    double partner = 0.0;   // the other end's parameter, signed
    int zeros = -1;
    bool verified = false;
    std::string verified_label;
    double winding = 0.0;
    double winding_expected = 0.0;
    std::optional<double> tolerance_shift;  // relative move under halved tolerances
    std::optional<double> geometric;        // d*_k from the curve intersections
    std::string bracket_source;             // "geometry" or "scan"
};

struct IntervalSample {
    double param = 0.0;
    std::string label;
};

struct IntervalClass {
    std::string name;  // "(0,A_0)", "(A_0,A_1)", ...
    double lo = 0.0;
    double hi = 0.0;
    std::vector<IntervalSample> samples;
};

struct ABracket {
    int k = 0;
    double lo = 0.0;  // last sample before the final R-k-s run
    double hi = 0.0;  // first sample of that run
};

struct StructureReport {
    std::string problem;
    std::string theorem;  // "existence_regular" or "existence_singular"
    std::vector<Connection> A;
    std::vector<ABracket> a;
    std::vector<Connection> B;
    std::vector<IntervalClass> intervals;
    std::vector<std::string> flags;
    double d_plus = 0.0;
    bool d_plus_infinite = false;
    std::vector<IntersectionRecord> intersections;
};

/// Regular fast-decay connections A_0 < ... < A_k_max, bracketed by curve intersections and refined by bisection.
StructureReport find_A_sequence(int k_max, const ProblemSpec& p, const ShootOptions& o = {});
/// Singular-side sequence via the Kelvin dual, checked by backward classification on p itself.
StructureReport find_B_sequence(int k_max, const ProblemSpec& p, const ShootOptions& o = {});

/// Total angle of an R-k-f connection: -k pi - atan(n-2-kappa(beta)) + atan(kappa(eta)).
double expected_winding(int k, const ProblemSpec& p);

}  // namespace hardyflow
