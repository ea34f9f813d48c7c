#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace parley {

// Command-line values that override their config counterparts.
struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> source;  // distances: "query" or "latent"
    std::optional<std::string> baseline;
    bool emit_svg = false;
};

// Runs one subcommand end to end: loads the config, resolves the output
// directory (--out, then config output_dir, then $PARLEY_OUT, then "out"),
// takes the run lock, writes the artifacts and appends a manifest entry.
// Returns the process exit code: 0 on success, 1 for configuration errors and
// missing prerequisites, 2 for runtime failures.
int run_command(const std::string& subcommand, const std::string& config_path,
                const CliOverrides& overrides);

}  // namespace parley
