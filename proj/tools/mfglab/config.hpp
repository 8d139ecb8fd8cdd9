#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfg/model.hpp"
#include "mfg/solver.hpp"

namespace mfglab {

using nlohmann::json;

/// Every accepted key with its default. A run config is this document with
/// some leaves replaced; keys absent here are rejected.
json default_config();

/// Defaults overlaid with `user`; throws mfg::ConfigError on unknown keys or
/// type mismatches. model.params is free-form (checked by the model catalog).
json merge_config(const json& user);

json load_config(const std::filesystem::path& path);

/// Applies `--a.b.c=value`; the path must name an existing leaf. Values are
/// parsed as JSON when possible, otherwise taken as strings.
void apply_override(json& config, std::string_view assignment);

mfg::ModelSpec model_from(const json& config);
mfg::Grid grid_from(const json& config);
mfg::SolverOptions solver_options_from(const json& config);
int solver_steps(const json& config);

std::vector<std::int64_t> int_list(const json& j, std::string_view what);

}  // namespace mfglab
