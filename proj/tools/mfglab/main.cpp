#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mfg/errors.hpp"
#include "mfglab/commands.hpp"
#include "mfglab/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int fail(int code, const char* kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("MFG_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw mfg::ConfigError(std::string("MFG_THREADS must be a positive integer, got '") + env + "'");
  }
  return omp_get_max_threads();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mfglab: mean field games of moderate interaction"};
  app.require_subcommand(1);
  std::string config_path, run_id;
  int threads = 0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "solve the MFG system (Picard and Hopf-Cole) and check mild residuals"},
      {"forward", "solve the forward equation under a configured feedback"},
      {"simulate", "simulate the N-player system under alpha*"},
      {"converge", "particle-limit convergence study"},
      {"nashgap", "epsilon-Nash gap study"},
      {"selftest", "run the built-in oracle battery"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    if (name != "selftest") {
      sub->add_option("-c,--config", config_path, "JSON run config (defaults when omitted)");
      sub->add_option("--run-id", run_id, "output leaf directory instead of a timestamp");
    }
    sub->add_option("--threads", threads, "worker threads (fallback: MFG_THREADS)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "config", e.what());
  }

  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    const int nthreads = resolve_threads(threads);
    omp_set_num_threads(nthreads);
    if (command == "selftest") return mfglab::run_selftest(std::cout) == 0 ? 0 : 1;

    mfglab::RunContext ctx;
    ctx.command = command;
    ctx.threads = nthreads;
    if (config_path.empty()) {
      ctx.config = mfglab::default_config();
    } else {
      std::ifstream in(config_path);
      if (!in) throw mfg::ConfigError("cannot read config file " + config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      ctx.input_bytes = buf.str();
      ctx.config = mfglab::load_config(config_path);
    }
    for (const auto& extra : sub->remaining()) {
      if (!extra.starts_with("--") || extra.find('=') == std::string::npos) {
        throw mfg::ConfigError("unexpected argument '" + extra + "' (overrides look like --solver.tol=1e-9)");
      }
      mfglab::apply_override(ctx.config, extra);
    }
    // Resolve the model and grid before anything runs so schema errors surface first.
    mfglab::model_from(ctx.config);
    mfglab::grid_from(ctx.config);

    ctx.run_dir = mfglab::make_run_dir(ctx.config, command, run_id);
    mfglab::write_manifest(ctx);
    if (command == "solve") return mfglab::cmd_solve(ctx);
    if (command == "forward") return mfglab::cmd_forward(ctx);
    if (command == "simulate") return mfglab::cmd_simulate(ctx);
    if (command == "converge") return mfglab::cmd_converge(ctx);
    if (command == "nashgap") return mfglab::cmd_nashgap(ctx);
    return fail(kExitConfig, "config", "unknown command " + command);
  } catch (const mfg::ConfigError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const mfg::NumericalError& e) {
    return fail(kExitNumerical, "numerical", e.what());
  }
}
