#include "mfglab/config.hpp"

#include <fstream>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfglab {

using mfg::ConfigError;

json default_config() {
  return json::parse(R"({
    "model":  {"name": "congestion", "params": {}, "beta": 0.3, "T": 0.5,
               "bounds": {"C": null, "L": null}},
    "grid":   {"dim": 1, "L": 8.0, "n": 256},
    "solver": {"M": 50, "tol": 1e-8, "max_iter": 200, "damping": 1.0},
    "sim":    {"N": [100, 400, 1600, 6400], "M_sim": 200, "seeds": 8, "replications": 50,
               "root_seed": 2024, "density_n": 1024, "cell_size": 0.0},
    "forward": {"alpha": "alpha*", "constant": [0.0, 0.0], "scale": 1.0, "tol": 1e-10, "max_iter": 200},
    "study":  {"hopf_cole": true, "validation_samples": 10000, "mc_paths": 10000, "mc_steps": 200,
               "nash_N": [100, 400, 1600], "admissibility_bound": null, "trajectories": true},
    "output": {"dir": "runs"}
  })");
}

namespace {

bool compatible(const json& def, const json& val) {
  if (def.is_null()) return val.is_null() || val.is_number();
  if (def.is_number()) return val.is_number();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) return val.is_array();
  if (def.is_object()) return val.is_object();
  return false;
}

void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("config section '" + path + "' must be an object");
  for (const auto& [key, val] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + where + "'");
    json& def = base[key];
    if (!compatible(def, val)) throw ConfigError("config key '" + where + "' has the wrong type");
    if (where == "model.params") {
      for (const auto& [pk, pv] : val.items()) {
        if (!pv.is_number()) throw ConfigError("model parameter '" + pk + "' must be a number");
      }
      def = val;
    } else if (def.is_object()) {
      overlay(def, val, where);
    } else {
      def = val;
    }
  }
}

const json& at(const json& j, const char* section, const char* key) {
  return j.at(section).at(key);
}

}  // namespace

json merge_config(const json& user) {
  json cfg = default_config();
  overlay(cfg, user, "");
  return cfg;
}

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json user;
  try {
    user = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return merge_config(user);
}

void apply_override(json& config, std::string_view assignment) {
  if (assignment.starts_with("--")) assignment.remove_prefix(2);
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' lacks '=value'");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  // Rebuild the override as a nested object and overlay it, so it gets the
  // same key and type checks as the config file.
  json patch = value;
  std::string_view rest = key;
  std::vector<std::string> parts;
  while (true) {
    const auto dot = rest.find('.');
    parts.emplace_back(rest.substr(0, dot));
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  json merged = config;
  overlay(merged, patch, "");
  config = std::move(merged);
}

mfg::ModelSpec model_from(const json& c) {
  mfg::ParamMap params;
  for (const auto& [k, v] : at(c, "model", "params").items()) params[k] = v.get<double>();
  mfg::ModelSpec m = mfg::builtin_model(at(c, "model", "name").get<std::string>(), params,
                                        at(c, "grid", "dim").get<int>(), at(c, "model", "T").get<double>(),
                                        at(c, "model", "beta").get<double>());
  const json& b = at(c, "model", "bounds");
  if (!b.at("C").is_null()) m.bounds.sup_drift_plus_cost = b.at("C").get<double>();
  if (!b.at("L").is_null()) m.bounds.lipschitz = b.at("L").get<double>();
  return m;
}

mfg::Grid grid_from(const json& c) {
  return mfg::Grid(at(c, "grid", "dim").get<int>(), at(c, "grid", "L").get<double>(), at(c, "grid", "n").get<int>());
}

mfg::SolverOptions solver_options_from(const json& c) {
  mfg::SolverOptions o;
  o.tol = at(c, "solver", "tol").get<double>();
  o.max_iter = at(c, "solver", "max_iter").get<int>();
  o.damping = at(c, "solver", "damping").get<double>();
  return o;
}

int solver_steps(const json& c) { return at(c, "solver", "M").get<int>(); }

std::vector<std::int64_t> int_list(const json& j, std::string_view what) {
  std::vector<std::int64_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ConfigError(std::string(what) + " must be a list of integers");
    out.push_back(v.get<std::int64_t>());
  }
  if (out.empty()) throw ConfigError(std::string(what) + " must not be empty");
  return out;
}

}  // namespace mfglab
