#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

namespace mfglab {

struct RunContext {
  std::string command;
  nlohmann::json config;     // merged and overridden
  std::string input_bytes;   // raw config file, empty when defaults only
  std::filesystem::path run_dir;
  int threads = 1;
};

/// {outdir}/{command}/{run_id or UTC timestamp}; a numeric suffix avoids
/// clobbering an existing directory.
std::filesystem::path make_run_dir(const nlohmann::json& config, const std::string& command,
                                   const std::string& run_id);

/// Writes manifest.json: config hash, git-style hash of the input file,
/// root seed and substream naming, thread count.
void write_manifest(const RunContext& ctx);

int cmd_solve(const RunContext& ctx);
int cmd_forward(const RunContext& ctx);
int cmd_simulate(const RunContext& ctx);
int cmd_converge(const RunContext& ctx);
int cmd_nashgap(const RunContext& ctx);

/// Oracle battery; one line per check. Returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace mfglab
