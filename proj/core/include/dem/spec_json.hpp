#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "dem/plugins.hpp"
#include "dem/process_spec.hpp"
#include "dem/registry.hpp"

namespace dem {

/// Version of the ProcessSpec JSON layout ("schema" field).
inline constexpr int kSpecSchemaVersion = 1;

/// Parses a spec document. Unknown plugin names, missing fields, wrong
/// types and a schema version other than kSpecSchemaVersion raise
/// SchemaError; semantic violations (e.g. y_hat outside the domain) raise
/// InstanceError.
ProcessSpec spec_from_json(const nlohmann::json& doc, const Registry& registry = builtin_registry());

nlohmann::json to_json(const ProcessSpec& spec);

/// Reads and parses a spec file; malformed JSON raises SchemaError.
ProcessSpec load_spec(const std::filesystem::path& path,
                      const Registry& registry = builtin_registry());

/// Reads a JSON array of anchors, e.g. [[1.0], [0.98]].
std::vector<std::vector<double>> load_anchors(const std::filesystem::path& path);

}  // namespace dem
