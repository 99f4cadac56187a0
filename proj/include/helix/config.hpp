#ifndef HELIX_CONFIG_HPP
#define HELIX_CONFIG_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace helix {

// Parsed and schema-checked run configuration. Unknown keys anywhere are
// rejected with the line they appear on.
struct RunConfig {
    nlohmann::json doc;
    std::string raw_text;

    double grid_R() const;
    int grid_n() const;
    double solver_cg_tol() const;
    double solver_picard_tol() const;
    int solver_max_sweeps() const;
    double solver_damping() const;
    std::string output_dir() const;
    std::vector<std::string> output_formats() const;
    unsigned seed() const;
};

RunConfig parse_config_text(const std::string& text, const std::string& command);
RunConfig parse_config_file(const std::string& path, const std::string& command);

// Applies "dotted.path=value" (value parsed as JSON when possible, else string).
void apply_override(RunConfig& cfg, const std::string& assignment);

// Runs one subcommand; returns the process exit code (0 ok, 1 numerical
// failure, 2 validation failure) and writes artifacts plus a manifest into
// the output directory.
int run_command(const std::string& command, RunConfig& cfg);

// FNV-1a hash of the canonical config serialization, for the manifest.
std::string config_hash(const RunConfig& cfg);

}  // namespace helix

#endif
