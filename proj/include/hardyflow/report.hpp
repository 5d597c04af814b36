#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardyflow/dynamics.hpp"
#include "hardyflow/exponents.hpp"
#include "hardyflow/manifolds.hpp"
#include "hardyflow/problem.hpp"
#include "hardyflow/shooting.hpp"

namespace hardyflow {

inline constexpr int report_schema = 1;

/// Sorted keys, floats at 17 significant digits, non-finite floats as null.
std::string canonical_dump(const nlohmann::json& j, int indent = 2);
/// Shortest string that reads back to the same double.
std::string shortest(double v);

nlohmann::json to_json(const StructureReport& r);
StructureReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolutionClass& c);
nlohmann::json to_json(const ExponentBundle& b);
nlohmann::json to_json(const ValidationReport& v);
nlohmann::json to_json(const IntersectionRecord& r);
nlohmann::json describe(const ProblemSpec& p);

/// Writes canonical JSON to path; throws std::runtime_error when the file cannot be written.
void emit_report(const StructureReport& r, const std::filesystem::path& path);

/// param,Theta,R,x,y
void write_curve_csv(std::ostream& os, const ManifoldCurve& c, bool with_side = false);
/// t,x,y,phi,rho,u,du,r
void write_path_csv(std::ostream& os, const std::vector<FowlerState>& path, int n);
nlohmann::json events_json(const std::vector<Event>& events);

}  // namespace hardyflow
