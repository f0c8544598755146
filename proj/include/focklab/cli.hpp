#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "focklab/config.hpp"

namespace focklab {

inline constexpr const char* kToolName = "focklab";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitPrecondition = 3, kExitNumeric = 4 };

/// Result of one experiment: a flat table plus scalar summary values. `extra` carries
/// structured data (point configurations) that only the JSON output includes.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
    Json summary = Json::object();
    Json extra = Json::object();
};

/// Runs cfg.command. Parameters computed from others (lattice radius, random
/// coefficients, cover radius, ...) are written back into cfg.params first.
Table run_experiment(ExperimentConfig& cfg);

/// Output document for the chosen format, with tool version, config hash and the
/// resolved config in the header. Doubles in CSV use 17 significant digits.
std::string render(const ExperimentConfig& cfg, const Table& table);

/// Full command-line entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace focklab
