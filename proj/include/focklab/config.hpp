#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "focklab/pointsets.hpp"
#include "focklab/weights.hpp"

namespace focklab {

using Json = nlohmann::json;

enum class OutputFormat { csv, json };

/// A validated experiment request. `params` holds every parameter of the command with
/// defaults filled in, so dumping `resolved()` reproduces the run exactly.
struct ExperimentConfig {
    std::string command;
    Json weight;
    Json params;
    OutputFormat format = OutputFormat::csv;
    std::optional<std::string> output_path;
    std::uint64_t seed = 1;

    /// Fully-resolved config without the output path (the path does not affect results).
    Json resolved() const;
};

/// Commands understood by the CLI, in documentation order.
const std::vector<std::string>& known_commands();

/// Parses and validates a config document. Unknown fields, wrong types and missing
/// required fields throw ConfigError.
ExperimentConfig parse_config(std::string_view text);

/// Parses the weight part of a config: {"family": "gaussian", "alpha": 3.14} and friends.
/// Numbers may also be given as strings "pi", "2pi", "0.5pi". Returns the canonical
/// (numeric) form through `canonical` when non-null.
Weight weight_from_json(const Json& spec, Json* canonical = nullptr);

/// Point set from a config: {"kind": "lattice", "a": .., "b": .., "R": ..},
/// {"kind": "points", "points": [[x, y], ...]} or {"kind": "csv", "path": ".."}.
PointSet pointset_from_json(const Json& spec);

/// 64-bit FNV-1a of a string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

/// Hash of resolved().dump().
std::string config_hash(const ExperimentConfig& cfg);

OutputFormat parse_format(std::string_view s);

}  // namespace focklab
