#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace mfglab {

std::string sha256_hex(std::string_view bytes);

/// Object id git assigns to a blob with these contents: sha1("blob <len>\0" + bytes).
std::string git_blob_sha1(std::string_view bytes);

/// Canonical text of a config: compact JSON with sorted keys.
std::string canonical(const nlohmann::json& config);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace mfglab
