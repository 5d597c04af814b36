#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>

#include "hardyflow/manifolds.hpp"
#include "hardyflow/problem.hpp"
#include "hardyflow/shooting.hpp"

namespace hardyflow {

/// Flat "section.key = value" text; "[section]" lines set a prefix for the keys below them; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(std::istream& in);

struct RunConfig {
    ProblemSpec problem = default_problem();
    ShootOptions shoot;
    TraceOptions trace;
    std::filesystem::path out_dir;  // empty: write to stdout
    std::string format;  // empty: the subcommand default
    /// Worker threads for the independent integrations; 0 uses the hardware count. Results do not depend on it.
    unsigned threads = 0;

    /// Throws std::invalid_argument when a numeric field is outside its range.
    void check() const;
};

RunConfig config_from_map(const std::map<std::string, std::string>& kv);
RunConfig load_config(const std::filesystem::path& path);

/// Upper bound on worker threads used by the library (0: hardware concurrency).
void set_thread_limit(unsigned n);
unsigned thread_limit();

}  // namespace hardyflow
