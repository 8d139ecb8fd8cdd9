#include "mfg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfg/errors.hpp"
#include "mild.hpp"

namespace mfg {

namespace detail {

FieldFlow forward_mild_map(const HeatOperator& heat, const Field& p0, double t0, double t1,
                           const FieldFlow& p, const std::vector<VectorField>& velocity) {
  const int M = p.steps();
  const double dt = (t1 - t0) / M;
  const int d = p0.grid().dim();

  // Transform the fluxes p_j V_j once; frame M is never a source.
  std::vector<std::vector<Spectrum>> flux(M);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < M; ++j) {
    flux[j].resize(d);
    for (int a = 0; a < d; ++a) {
      Field q = p.frames[j];
      const Field& v = velocity[j].component(a);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] *= v[i];
      flux[j][a] = heat.transform(q);
    }
  }
  const Spectrum p0_hat = heat.transform(p0);

  FieldFlow out{t0, t1, std::vector<Field>(M + 1, Field(p0.grid()))};
  out.frames[0] = p0;
#pragma omp parallel for schedule(static)
  for (int k = 1; k <= M; ++k) {
    Spectrum acc = heat.zero_spectrum();
    heat.accumulate_heat(acc, k * dt, p0_hat);
    for (int j = 0; j < k; ++j) {
      for (int a = 0; a < d; ++a) heat.accumulate_gradient(acc, a, (k - j) * dt, flux[j][a], -dt);
    }
    out.frames[k] = heat.synthesize(acc);
  }
  return out;
}

ClipStats clip_and_renormalize(FieldFlow& p) {
  ClipStats stats;
  for (std::size_t k = 1; k < p.frames.size(); ++k) {
    Field& f = p.frames[k];
    double negative = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] < 0.0) {
        negative -= f[i];
        f[i] = 0.0;
      }
    }
    stats.clipped_mass = std::max(stats.clipped_mass, negative * f.grid().cell_volume());
    const double mass = integrate(f);
    stats.mass_drift = std::max(stats.mass_drift, std::abs(mass - 1.0));
    if (mass > 0.0) f *= 1.0 / mass;
  }
  return stats;
}

double flow_distance(const FieldFlow& a, const FieldFlow& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.frames.size(); ++k) m = std::max(m, sup_distance(a.frames[k], b.frames[k]));
  return m;
}

double flow_distance(const VectorFlow& a, const VectorFlow& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.frames.size(); ++k) m = std::max(m, sup_distance(a.frames[k], b.frames[k]));
  return m;
}

FieldFlow blend(const FieldFlow& a, const FieldFlow& b, double d) {
  if (d == 1.0) return b;
  FieldFlow out = a;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    out.frames[k] *= (1.0 - d);
    out.frames[k] += d * b.frames[k];
  }
  return out;
}

VectorFlow blend(const VectorFlow& a, const VectorFlow& b, double d) {
  if (d == 1.0) return b;
  VectorFlow out = a;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    VectorField scaled = b.frames[k];
    scaled *= d;
    out.frames[k] *= (1.0 - d);
    out.frames[k] += scaled;
  }
  return out;
}

}  // namespace detail

using detail::blend;
using detail::flow_distance;

namespace {

void check_finite_flow(const FieldFlow& f, int iteration, const char* what) {
  for (std::size_t k = 0; k < f.frames.size(); ++k) {
    for (double v : f.frames[k].values()) {
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << ": non-finite value at iteration " << iteration << ", frame " << k;
        throw NumericalError(msg.str());
      }
    }
  }
}

void check_finite_flow(const VectorFlow& f, int iteration, const char* what) {
  for (std::size_t k = 0; k < f.frames.size(); ++k) {
    for (int a = 0; a < f.frames[k].dim(); ++a) {
      for (double v : f.frames[k].component(a).values()) {
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << what << ": non-finite value at iteration " << iteration << ", frame " << k;
          throw NumericalError(msg.str());
        }
      }
    }
  }
}

// H = b . theta - |theta|^2 / 2 + f at one frame.
Field hamiltonian_source(const ModelSpec& m, const Field& density, const VectorField& theta) {
  Field h = running_cost_field(m, density);
  const int d = theta.dim();
  const bool with_drift = !m.drift_is_zero;
  VectorField b = with_drift ? drift_field(m, density) : VectorField(density.grid());
  for (std::size_t i = 0; i < h.size(); ++i) {
    double bt = 0.0, tt = 0.0;
    for (int a = 0; a < d; ++a) {
      const double th = theta.component(a)[i];
      if (with_drift) bt += b.component(a)[i] * th;
      tt += th * th;
    }
    h[i] += bt - 0.5 * tt;
  }
  return h;
}

std::vector<VectorField> mfg_velocity(const ModelSpec& m, const MfgIterate& x) {
  std::vector<VectorField> v;
  v.reserve(x.p.frames.size());
  for (std::size_t k = 0; k < x.p.frames.size(); ++k) {
    VectorField vel = -x.theta.frames[k];
    if (!m.drift_is_zero) vel += drift_field(m, x.p.frames[k]);
    v.push_back(std::move(vel));
  }
  return v;
}

// Backward mild sum with kernel `gradient ? gradP : P`:
//   out_k = K_{(M-k)dt} g + dt * sum_{j>k} K_{(j-k)dt} src_j,  out_M = terminal.
std::vector<Spectrum> transform_all(const HeatOperator& heat, const std::vector<Field>& src) {
  std::vector<Spectrum> out(src.size());
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < src.size(); ++j) out[j] = heat.transform(src[j]);
  return out;
}

FieldFlow backward_value(const HeatOperator& heat, const MfgProblem& pr, const Field& terminal,
                         const std::vector<Spectrum>& src_hat) {
  const int M = pr.steps;
  const double dt = pr.dt();
  const Spectrum g_hat = heat.transform(terminal);
  FieldFlow out{pr.t0, pr.t1, std::vector<Field>(M + 1, Field(pr.grid))};
  out.frames[M] = terminal;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < M; ++k) {
    Spectrum acc = heat.zero_spectrum();
    heat.accumulate_heat(acc, (M - k) * dt, g_hat);
    for (int j = k + 1; j <= M; ++j) heat.accumulate_heat(acc, (j - k) * dt, src_hat[j], dt);
    out.frames[k] = heat.synthesize(acc);
  }
  return out;
}

VectorFlow backward_gradient(const HeatOperator& heat, const MfgProblem& pr, const Field& terminal,
                             const VectorField& terminal_gradient, const std::vector<Spectrum>& src_hat) {
  const int M = pr.steps;
  const double dt = pr.dt();
  const int d = pr.grid.dim();
  const Spectrum g_hat = heat.transform(terminal);
  VectorFlow out{pr.t0, pr.t1, std::vector<VectorField>(M + 1, VectorField(pr.grid))};
  out.frames[M] = terminal_gradient;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < M; ++k) {
    for (int a = 0; a < d; ++a) {
      Spectrum acc = heat.zero_spectrum();
      heat.accumulate_gradient(acc, a, (M - k) * dt, g_hat);
      for (int j = k + 1; j <= M; ++j) heat.accumulate_gradient(acc, a, (j - k) * dt, src_hat[j], dt);
      out.frames[k].component(a) = heat.synthesize(acc);
    }
  }
  return out;
}

}  // namespace

VectorField drift_field(const ModelSpec& m, const Field& density) {
  const Grid& g = density.grid();
  VectorField out(g);
  if (m.drift_is_zero) return out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point b = m.drift(g.point(i), std::max(density[i], 0.0));
    for (int a = 0; a < g.dim(); ++a) out.component(a)[i] = b[a];
  }
  return out;
}

Field running_cost_field(const ModelSpec& m, const Field& density) {
  const Grid& g = density.grid();
  Field out(g);
  if (m.running_cost_is_zero) return out;
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = m.running_cost(g.point(i), std::max(density[i], 0.0));
  return out;
}

double MfgSolution::contraction_ratio() const {
  double worst = 0.0;
  for (std::size_t k = 2; k < residual_history.size(); ++k) {
    if (residual_history[k - 1] > 0.0) worst = std::max(worst, residual_history[k] / residual_history[k - 1]);
  }
  return worst;
}

MfgProblem make_mfg_problem(const ModelSpec& model, const Grid& grid, int steps) {
  if (steps < 1) throw ConfigError("solver needs at least one time step");
  if (grid.dim() != model.dim) throw ConfigError("grid and model dimensions differ");
  return MfgProblem{model,  grid, 0.0, model.horizon, steps, initial_density_field(model, grid),
                    field_from_function(grid, model.terminal_cost)};
}

MfgProblem restart_problem(const MfgProblem& problem, const FieldFlow& p, int frame) {
  if (frame < 0 || frame >= problem.steps) throw ConfigError("restart frame out of range");
  return MfgProblem{problem.model, problem.grid, problem.time(frame), problem.t1,
                    problem.steps - frame, p.frames[frame], problem.g};
}

HeatOperator make_heat_operator(const MfgProblem& problem) {
  return HeatOperator::with_ladder(problem.grid, problem.dt(), problem.steps);
}

MfgIterate initial_iterate(const MfgProblem& pr, const HeatOperator& heat) {
  const int M = pr.steps;
  const double dt = pr.dt();
  MfgIterate x{FieldFlow{pr.t0, pr.t1, std::vector<Field>(M + 1, Field(pr.grid))},
               VectorFlow{pr.t0, pr.t1, std::vector<VectorField>(M + 1, VectorField(pr.grid))}};
  const Spectrum p0_hat = heat.transform(pr.p0);
  const Spectrum g_hat = heat.transform(pr.g);
  x.p.frames[0] = pr.p0;
  x.theta.frames[M] = gradient(pr.g);
  for (int k = 0; k <= M; ++k) {
    if (k > 0) {
      Spectrum acc = heat.zero_spectrum();
      heat.accumulate_heat(acc, k * dt, p0_hat);
      x.p.frames[k] = heat.synthesize(acc);
    }
    if (k < M) {
      for (int a = 0; a < pr.grid.dim(); ++a) {
        Spectrum acc = heat.zero_spectrum();
        heat.accumulate_gradient(acc, a, (M - k) * dt, g_hat);
        x.theta.frames[k].component(a) = heat.synthesize(acc);
      }
    }
  }
  return x;
}

MfgIterate gamma_step(const MfgProblem& pr, const HeatOperator& heat, const MfgIterate& cur) {
  // Gamma_1: forward density under velocity -theta + b.
  FieldFlow p = detail::forward_mild_map(heat, pr.p0, pr.t0, pr.t1, cur.p, mfg_velocity(pr.model, cur));

  // Gamma_2: backward gradient equation with source H(p, theta).
  std::vector<Field> source;
  source.reserve(cur.p.frames.size());
  for (std::size_t k = 0; k < cur.p.frames.size(); ++k) {
    source.push_back(hamiltonian_source(pr.model, cur.p.frames[k], cur.theta.frames[k]));
  }
  VectorFlow theta = backward_gradient(heat, pr, pr.g, gradient(pr.g), transform_all(heat, source));
  return {std::move(p), std::move(theta)};
}

MfgSolution solve_mfg(const MfgProblem& pr, const SolverOptions& opt) {
  return solve_mfg(pr, make_heat_operator(pr), opt);
}

MfgSolution solve_mfg(const ModelSpec& model, const Grid& grid, int steps, const SolverOptions& opt) {
  return solve_mfg(make_mfg_problem(model, grid, steps), opt);
}

MfgSolution solve_mfg(const MfgProblem& pr, const HeatOperator& heat, const SolverOptions& opt) {
  if (!(opt.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (opt.max_iter < 1) throw ConfigError("max_iter must be >= 1");

  MfgSolution sol;
  MfgIterate x = initial_iterate(pr, heat);
  double damping = opt.damping;
  int rising = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    MfgIterate y = gamma_step(pr, heat, x);
    check_finite_flow(y.p, it, "gamma_step density");
    check_finite_flow(y.theta, it, "gamma_step gradient");
    MfgIterate next{blend(x.p, y.p, damping), blend(x.theta, y.theta, damping)};
    const auto clip = detail::clip_and_renormalize(next.p);
    sol.max_clipped_mass = std::max(sol.max_clipped_mass, clip.clipped_mass);
    sol.mass_drift = std::max(sol.mass_drift, clip.mass_drift);
    if (clip.clipped_mass > opt.max_clipped_mass) {
      std::ostringstream msg;
      msg << "clipped negative density mass " << clip.clipped_mass << " exceeds "
          << opt.max_clipped_mass << " at iteration " << it;
      throw NumericalError(msg.str());
    }
    const double r = flow_distance(next.p, x.p) + flow_distance(next.theta, x.theta);
    sol.residual_history.push_back(r);
    sol.iterations = it;
    x = std::move(next);
    if (r <= opt.tol) {
      sol.converged = true;
      break;
    }
    const auto& h = sol.residual_history;
    rising = (h.size() >= 2 && h[h.size() - 1] > h[h.size() - 2]) ? rising + 1 : 0;
    if (rising >= 2 && damping > opt.min_damping) {
      damping = std::max(opt.min_damping, 0.5 * damping);
      rising = 0;
    }
  }
  sol.final_damping = damping;

  // u from the backward mild equation with the final (p, theta).
  std::vector<Field> source;
  source.reserve(x.p.frames.size());
  for (std::size_t k = 0; k < x.p.frames.size(); ++k) {
    source.push_back(hamiltonian_source(pr.model, x.p.frames[k], x.theta.frames[k]));
  }
  sol.u = backward_value(heat, pr, pr.g, transform_all(heat, source));
  check_finite_flow(sol.u, sol.iterations, "value function");

  sol.p = std::move(x.p);
  sol.theta = std::move(x.theta);
  sol.alpha_star = VectorFlow{pr.t0, pr.t1, {}};
  sol.alpha_star.frames.reserve(sol.theta.frames.size());
  for (const auto& th : sol.theta.frames) {
    sol.alpha_star.frames.push_back(-th);
    sol.k_bound = std::max(sol.k_bound, sup_norm(th));
  }
  return sol;
}

HopfColeSolution solve_hopf_cole(const MfgProblem& pr, const SolverOptions& opt) {
  if (!(opt.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  const HeatOperator heat = make_heat_operator(pr);
  const int M = pr.steps;
  const int d = pr.grid.dim();
  const double floor = 1e-12;

  // Work with v = w - 1, which decays in the far field like g and f, so
  // zero-padded convolutions stay consistent: P_t 1 = 1 exactly on R^d.
  Field v_terminal(pr.grid);
  for (std::size_t i = 0; i < v_terminal.size(); ++i) v_terminal[i] = std::exp(-pr.g[i]) - 1.0;
  const VectorField eta_terminal = gradient(v_terminal);

  const MfgIterate start = initial_iterate(pr, heat);
  FieldFlow p = start.p;
  FieldFlow v = backward_value(heat, pr, v_terminal,
                               std::vector<Spectrum>(M + 1, heat.zero_spectrum()));
  VectorFlow eta = backward_gradient(heat, pr, v_terminal, eta_terminal,
                                     std::vector<Spectrum>(M + 1, heat.zero_spectrum()));

  HopfColeSolution sol;
  for (int it = 1; it <= opt.max_iter; ++it) {
    // Backward source b . grad w - w f and forward velocity grad w / w + b.
    std::vector<Field> source;
    std::vector<VectorField> velocity;
    for (int k = 0; k <= M; ++k) {
      const Field& dens = p.frames[k];
      Field s = running_cost_field(pr.model, dens);
      VectorField b = drift_field(pr.model, dens);
      VectorField vel(pr.grid);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double w = 1.0 + v.frames[k][i];
        if (!(w >= floor)) {
          std::ostringstream msg;
          msg << "Hopf-Cole variable fell below " << floor << " at iteration " << it << ", frame " << k
              << "; refine the grid or enlarge the domain";
          throw NumericalError(msg.str());
        }
        double bg = 0.0;
        for (int a = 0; a < d; ++a) {
          const double ga = eta.frames[k].component(a)[i];
          bg += b.component(a)[i] * ga;
          vel.component(a)[i] = ga / w + b.component(a)[i];
        }
        s[i] = bg - w * s[i];
      }
      source.push_back(std::move(s));
      velocity.push_back(std::move(vel));
    }
    const auto src_hat = transform_all(heat, source);
    FieldFlow v_new = backward_value(heat, pr, v_terminal, src_hat);
    VectorFlow eta_new = backward_gradient(heat, pr, v_terminal, eta_terminal, src_hat);
    FieldFlow p_new = detail::forward_mild_map(heat, pr.p0, pr.t0, pr.t1, p, velocity);
    check_finite_flow(v_new, it, "hopf-cole w");
    check_finite_flow(p_new, it, "hopf-cole density");
    const auto clip = detail::clip_and_renormalize(p_new);
    if (clip.clipped_mass > opt.max_clipped_mass) {
      throw NumericalError("hopf-cole: clipped negative density mass exceeds limit");
    }
    const double r = flow_distance(p_new, p) + flow_distance(v_new, v) + flow_distance(eta_new, eta);
    sol.residual_history.push_back(r);
    sol.iterations = it;
    p = std::move(p_new);
    v = std::move(v_new);
    eta = std::move(eta_new);
    if (r <= opt.tol) {
      sol.converged = true;
      break;
    }
  }

  sol.p = std::move(p);
  sol.grad_w = std::move(eta);
  sol.w = FieldFlow{pr.t0, pr.t1, {}};
  sol.u_from_w = FieldFlow{pr.t0, pr.t1, {}};
  sol.min_w = std::numeric_limits<double>::infinity();
  for (auto& frame : v.frames) {
    Field w = frame;
    Field u(pr.grid);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] += 1.0;
      if (!(w[i] >= floor)) throw NumericalError("Hopf-Cole variable fell below positivity floor");
      sol.min_w = std::min(sol.min_w, w[i]);
      u[i] = -std::log(w[i]);
    }
    sol.w.frames.push_back(std::move(w));
    sol.u_from_w.frames.push_back(std::move(u));
  }
  return sol;
}

MildResidual verify_mild_residual(const MfgProblem& pr, const MfgSolution& sol) {
  const int M = pr.steps;
  const double dt = pr.dt();
  const int d = pr.grid.dim();
  std::vector<double> ladder;
  for (int l = 0; l <= M; ++l) ladder.push_back((l + 0.5) * dt);
  for (int l = 1; l <= M; ++l) ladder.push_back(l * dt);
  const HeatOperator heat(pr.grid, ladder);

  // theta is taken from the solution's feedback: theta = -alpha*.
  std::vector<Spectrum> h_hat(M + 1);
  std::vector<std::vector<Spectrum>> flux_hat(M + 1);
#pragma omp parallel for schedule(static)
  for (int k = 0; k <= M; ++k) {
    const VectorField theta = -sol.alpha_star.frames[k];
    h_hat[k] = heat.transform(hamiltonian_source(pr.model, sol.p.frames[k], theta));
    VectorField vel = sol.alpha_star.frames[k];
    if (!pr.model.drift_is_zero) vel += drift_field(pr.model, sol.p.frames[k]);
    flux_hat[k].resize(d);
    for (int a = 0; a < d; ++a) {
      Field q = sol.p.frames[k];
      for (std::size_t i = 0; i < q.size(); ++i) q[i] *= vel.component(a)[i];
      flux_hat[k][a] = heat.transform(q);
    }
  }
  const Spectrum g_hat = heat.transform(pr.g);
  const Spectrum p0_hat = heat.transform(pr.p0);

  std::vector<double> ru(M + 1, 0.0), rp(M + 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k <= M; ++k) {
    if (k < M) {
      Spectrum acc = heat.zero_spectrum();
      heat.accumulate_heat(acc, (M - k) * dt, g_hat);
      for (int j = k; j < M; ++j) {
        const double lag = (j - k + 0.5) * dt;
        heat.accumulate_heat(acc, lag, h_hat[j], 0.5 * dt);
        heat.accumulate_heat(acc, lag, h_hat[j + 1], 0.5 * dt);
      }
      ru[k] = sup_distance(heat.synthesize(acc), sol.u.frames[k]);
    } else {
      ru[k] = sup_distance(pr.g, sol.u.frames[k]);
    }
    if (k > 0) {
      Spectrum acc = heat.zero_spectrum();
      heat.accumulate_heat(acc, k * dt, p0_hat);
      for (int j = 0; j < k; ++j) {
        const double lag = (k - j - 0.5) * dt;
        for (int a = 0; a < d; ++a) {
          heat.accumulate_gradient(acc, a, lag, flux_hat[j][a], -0.5 * dt);
          heat.accumulate_gradient(acc, a, lag, flux_hat[j + 1][a], -0.5 * dt);
        }
      }
      rp[k] = sup_distance(heat.synthesize(acc), sol.p.frames[k]);
    } else {
      rp[k] = sup_distance(pr.p0, sol.p.frames[0]);
    }
  }
  return {*std::max_element(ru.begin(), ru.end()), *std::max_element(rp.begin(), rp.end())};
}

}  // namespace mfg
