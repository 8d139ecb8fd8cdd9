#include "mfglab/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "mfg/analysis.hpp"
#include "mfg/errors.hpp"
#include "mfg/field_io.hpp"
#include "mfg/forward.hpp"
#include "mfg/particles.hpp"
#include "mfg/rng.hpp"
#include "mfg/solver.hpp"
#include "mfglab/config.hpp"
#include "mfglab/manifest.hpp"

namespace mfglab {

namespace fs = std::filesystem;
using mfg::ConfigError;
using mfg::NumericalError;

namespace {

std::uint64_t root_seed(const json& c) { return c.at("sim").at("root_seed").get<std::uint64_t>(); }

json estimate_json(const mfg::CostEstimate& e) {
  return {{"mean", e.mean},       {"std_error", e.std_error}, {"has_std_error", e.has_std_error},
          {"n_samples", e.n_samples}, {"energy", e.energy},   {"running", e.running},
          {"terminal", e.terminal}};
}

std::vector<mfg::Field> component_frames(const mfg::VectorFlow& v, int axis) {
  std::vector<mfg::Field> out;
  for (const auto& f : v.frames) out.push_back(f.component(axis));
  return out;
}

void write_flow(const fs::path& path, const mfg::FieldFlow& flow) { mfg::write_fields(path, flow.frames); }

void write_vector_flow(const fs::path& dir, const std::string& stem, const mfg::VectorFlow& v) {
  for (int a = 0; a < v.frames.front().dim(); ++a) {
    mfg::write_fields(dir / (stem + "_x" + std::to_string(a + 1) + ".mfgf"), component_frames(v, a));
  }
}

struct Solved {
  mfg::ModelSpec model;
  mfg::MfgProblem problem;
  mfg::MfgSolution solution;
};

Solved solve_from(const json& c) {
  mfg::ModelSpec m = model_from(c);
  mfg::MfgProblem pr = mfg::make_mfg_problem(m, grid_from(c), solver_steps(c));
  mfg::MfgSolution sol = mfg::solve_mfg(pr, solver_options_from(c));
  if (!sol.converged) {
    std::ostringstream msg;
    msg << "MFG Picard iteration did not converge in " << sol.iterations << " iterations (last residual "
        << sol.residual_history.back() << "); reduce T or increase solver.max_iter";
    throw NumericalError(msg.str());
  }
  return {std::move(m), std::move(pr), std::move(sol)};
}

json solution_summary(const mfg::MfgSolution& sol) {
  return {{"converged", sol.converged},
          {"iterations", sol.iterations},
          {"residuals", sol.residual_history},
          {"contraction_ratio", sol.contraction_ratio()},
          {"k_bound", sol.k_bound},
          {"mass_drift", sol.mass_drift},
          {"max_clipped_mass", sol.max_clipped_mass},
          {"final_damping", sol.final_damping}};
}

mfg::SimConfig sim_template(const json& c) {
  mfg::SimConfig s;
  s.steps = c.at("sim").at("M_sim").get<int>();
  s.cell_size = c.at("sim").at("cell_size").get<double>();
  return s;
}

mfg::Grid density_grid(const json& c) {
  return mfg::Grid(c.at("grid").at("dim").get<int>(), c.at("grid").at("L").get<double>(),
                   c.at("sim").at("density_n").get<int>());
}

}  // namespace

fs::path make_run_dir(const json& config, const std::string& command, const std::string& run_id) {
  std::string leaf = run_id;
  if (leaf.empty()) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    leaf = s.str();
  }
  const fs::path base = fs::path(config.at("output").at("dir").get<std::string>()) / command;
  fs::path dir = base / leaf;
  for (int k = 1; fs::exists(dir); ++k) dir = base / (leaf + "-" + std::to_string(k));
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const RunContext& ctx) {
  const std::string canon = canonical(ctx.config);
  json m{{"command", ctx.command},
         {"config", ctx.config},
         {"config_sha256", sha256_hex(canon)},
         {"config_git_blob", git_blob_sha1(canon)},
         {"input_git_blob", ctx.input_bytes.empty() ? json(nullptr) : json(git_blob_sha1(ctx.input_bytes))},
         {"root_seed", root_seed(ctx.config)},
         {"substreams",
          {{"model-init", mfg::derive_seed(root_seed(ctx.config), "model-init")},
           {"mc-paths", mfg::derive_seed(root_seed(ctx.config), "mc-paths")},
           {"simulation", "derive_seed(root_seed, \"sim-N{N}-seed{s}\")"},
           {"nashgap", "derive_seed(root_seed, \"nash-N{N}-seed{s}-rep{r}\")"}}},
         {"threads", ctx.threads}};
  write_json(ctx.run_dir / "manifest.json", m);
}

int cmd_solve(const RunContext& ctx) {
  const json& c = ctx.config;
  const Solved s = solve_from(c);
  const auto& sol = s.solution;
  json summary = solution_summary(sol);

  const auto report = mfg::validate_hypotheses(s.model, c.at("study").at("validation_samples").get<int>(),
                                               mfg::derive_seed(root_seed(c), "model-init"));
  json checks = json::array();
  for (const auto& ch : report.checks) checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  summary["validation"] = {{"passed", report.passed}, {"checks", checks}};

  const auto r = mfg::verify_mild_residual(s.problem, sol);
  summary["mild_residual"] = {{"r_u", r.r_u}, {"r_p", r.r_p}};

  write_flow(ctx.run_dir / "u.mfgf", sol.u);
  write_flow(ctx.run_dir / "p.mfgf", sol.p);
  write_vector_flow(ctx.run_dir, "alpha_star", sol.alpha_star);
  mfg::write_csv(ctx.run_dir / "u_t0.csv", sol.u.frames.front());
  mfg::write_csv(ctx.run_dir / "p_T.csv", sol.p.frames.back());

  if (c.at("study").at("hopf_cole").get<bool>()) {
    const auto hc = mfg::solve_hopf_cole(s.problem, solver_options_from(c));
    double gap = 0.0;
    for (std::size_t k = 0; k < hc.u_from_w.frames.size(); ++k) {
      gap = std::max(gap, mfg::sup_distance(hc.u_from_w.frames[k], sol.u.frames[k]));
    }
    double f_sup = 0.0;
    for (const auto& p : sol.p.frames) f_sup = std::max(f_sup, mfg::sup_norm(mfg::running_cost_field(s.model, p)));
    summary["hopf_cole"] = {{"converged", hc.converged},
                            {"iterations", hc.iterations},
                            {"min_w", hc.min_w},
                            {"min_w_lower_bound", std::exp(-(mfg::sup_norm(s.problem.g) + s.model.horizon * f_sup))},
                            {"sup_u_gap", gap}};
    write_flow(ctx.run_dir / "w.mfgf", hc.w);
  }
  write_json(ctx.run_dir / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_forward(const RunContext& ctx) {
  const json& c = ctx.config;
  const json& f = c.at("forward");
  const std::string kind = f.at("alpha").get<std::string>();
  const double scale = f.at("scale").get<double>();
  mfg::ModelSpec m = model_from(c);
  mfg::MfgProblem pr = mfg::make_mfg_problem(m, grid_from(c), solver_steps(c));
  json summary;
  mfg::VectorFlow alpha;
  std::optional<mfg::MfgSolution> sol;
  if (kind == "alpha*") {
    sol = solve_from(c).solution;
    alpha = sol->alpha_star;
    for (auto& fr : alpha.frames) fr *= scale;
  } else if (kind == "zero" || kind == "constant") {
    mfg::Point v{0.0, 0.0};
    if (kind == "constant") {
      const auto& arr = f.at("constant");
      for (std::size_t a = 0; a < arr.size() && a < 2; ++a) v[a] = scale * arr[a].get<double>();
    }
    alpha = mfg::constant_feedback(pr, v);
  } else {
    throw ConfigError("forward.alpha must be one of alpha*, zero, constant; got '" + kind + "'");
  }
  mfg::ForwardOptions opt;
  opt.tol = f.at("tol").get<double>();
  opt.max_iter = f.at("max_iter").get<int>();
  const auto lim = mfg::solve_forward(pr, alpha, opt);
  summary = {{"alpha", kind},
             {"scale", scale},
             {"converged", lim.converged},
             {"iterations", lim.iterations},
             {"residual", lim.residual},
             {"residuals", lim.residual_history},
             {"max_clipped_mass", lim.max_clipped_mass}};
  if (sol) {
    double d = 0.0;
    for (std::size_t k = 0; k < lim.p.frames.size(); ++k) d = std::max(d, mfg::sup_distance(lim.p.frames[k], sol->p.frames[k]));
    summary["sup_distance_to_mfg_density"] = d;
  }
  write_flow(ctx.run_dir / "p_forward.mfgf", lim.p);
  write_json(ctx.run_dir / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  if (!lim.converged) throw NumericalError("forward Picard iteration did not converge");
  return 0;
}

int cmd_simulate(const RunContext& ctx) {
  const json& c = ctx.config;
  const Solved s = solve_from(c);
  const auto Ns = int_list(c.at("sim").at("N"), "sim.N");
  const int seeds = c.at("sim").at("seeds").get<int>();
  const mfg::Grid dgrid = density_grid(c);
  const int stride = c.at("sim").at("M_sim").get<int>() / s.problem.steps;
  if (stride < 1 || stride * s.problem.steps != c.at("sim").at("M_sim").get<int>()) {
    throw ConfigError("sim.M_sim must be a multiple of solver.M");
  }
  const mfg::Profile profile{mfg::Feedback(std::make_shared<mfg::VectorFlow>(s.solution.alpha_star)), std::nullopt, {}};
  json runs = json::array();
  for (const auto N : Ns) {
    for (int seed = 0; seed < seeds; ++seed) {
      mfg::SimConfig cfg = sim_template(c);
      cfg.particles = N;
      cfg.seed = mfg::derive_seed(root_seed(c), "sim-N" + std::to_string(N) + "-seed" + std::to_string(seed));
      const auto ens = mfg::simulate(s.model, s.problem.grid, cfg, profile);
      const auto dens = mfg::empirical_density(ens, s.model, dgrid, stride);
      double mass_err = 0.0;
      for (const auto& fr : dens.frames.frames) mass_err = std::max(mass_err, std::abs(mfg::integrate(fr) - 1.0));
      runs.push_back({{"N", N}, {"seed_index", seed}, {"seed", cfg.seed}, {"escaped", ens.escaped},
                      {"max_mass_error", mass_err}});
      if (seed == 0) {
        const std::string stem = "N" + std::to_string(N);
        write_flow(ctx.run_dir / ("density_" + stem + ".mfgf"), dens.frames);
        if (c.at("study").at("trajectories").get<bool>()) {
          mfg::write_trajectories(ctx.run_dir / ("trajectories_" + stem + ".mfgt"), ens.dump());
        }
      }
    }
  }
  json summary{{"solver", solution_summary(s.solution)}, {"runs", runs}};
  write_json(ctx.run_dir / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_converge(const RunContext& ctx) {
  const json& c = ctx.config;
  const Solved s = solve_from(c);
  mfg::ConvergenceOptions opt;
  opt.N_values = int_list(c.at("sim").at("N"), "sim.N");
  opt.seeds_per_N = c.at("sim").at("seeds").get<int>();
  opt.root_seed = root_seed(c);
  opt.sim = sim_template(c);
  const auto rep = mfg::convergence_study(s.model, s.solution, density_grid(c), opt);
  {
    std::ofstream out(ctx.run_dir / "convergence.csv");
    mfg::write_csv(out, rep);
  }
  std::ofstream series(ctx.run_dir / "convergence_medians.csv");
  series << "N,sup_density_gap,dw_proxy,w1,holder_norm\n" << std::setprecision(17);
  json medians = json::array();
  for (const auto& m : rep.summary) {
    series << m.N << ',' << m.sup_density_gap << ',' << m.dw_proxy << ',' << m.w1 << ',' << m.holder_norm << '\n';
    medians.push_back({{"N", m.N}, {"sup_density_gap", m.sup_density_gap}, {"dw_proxy", m.dw_proxy},
                       {"w1", m.w1}, {"holder_norm", m.holder_norm}});
  }
  json summary{{"solver", solution_summary(s.solution)},
               {"holder_gamma", rep.holder_gamma},
               {"seeds_per_N", opt.seeds_per_N},
               {"medians", medians}};
  write_json(ctx.run_dir / "convergence.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_nashgap(const RunContext& ctx) {
  const json& c = ctx.config;
  const Solved s = solve_from(c);
  mfg::NashOptions opt;
  opt.N_values = int_list(c.at("study").at("nash_N"), "study.nash_N");
  opt.seeds_per_N = c.at("sim").at("seeds").get<int>();
  opt.replications = c.at("sim").at("replications").get<int>();
  opt.root_seed = root_seed(c);
  opt.sim = sim_template(c);
  if (!c.at("study").at("admissibility_bound").is_null()) {
    opt.admissibility_bound = c.at("study").at("admissibility_bound").get<double>();
  }
  const auto candidates = mfg::default_candidates(std::make_shared<mfg::VectorFlow>(s.solution.alpha_star));
  const auto rep = mfg::nash_gap_study(s.model, s.solution, candidates, opt);
  {
    std::ofstream out(ctx.run_dir / "nashgap.csv");
    mfg::write_csv(out, rep);
  }
  json rows = json::array();
  for (const auto& r : rep.summary) {
    rows.push_back({{"N", r.N},
                    {"J_equilibrium", estimate_json(r.equilibrium)},
                    {"J_best_deviation", estimate_json(r.best_deviation)},
                    {"deviation_winner", r.deviation_winner},
                    {"candidate_gap_lower_bound_estimate", r.candidate_gap},
                    {"combined_std_error", r.combined_std_error}});
  }
  json summary{{"solver", solution_summary(s.solution)},
               {"note", "candidate_gap is a lower-bound estimate of the required epsilon (finite candidate set)"},
               {"candidates", rep.candidates},
               {"admissibility_bound", rep.admissibility_bound},
               {"spearman_gap_vs_N", rep.spearman_gap_vs_N},
               {"per_N", rows}};
  write_json(ctx.run_dir / "nashgap.json", summary);
  std::cout << summary.dump(2) << '\n';
  return 0;
}

}  // namespace mfglab
