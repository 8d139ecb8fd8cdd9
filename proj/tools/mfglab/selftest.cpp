#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mfg/analysis.hpp"
#include "mfg/errors.hpp"
#include "mfg/forward.hpp"
#include "mfg/particles.hpp"
#include "mfg/rng.hpp"
#include "mfg/semigroup.hpp"
#include "mfg/solver.hpp"
#include "mfglab/commands.hpp"
#include "mfglab/config.hpp"

namespace mfglab {

namespace {

using namespace mfg;

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string on success, reason otherwise
};

std::string expect(bool ok, double value, double limit) {
  if (ok) return {};
  std::ostringstream s;
  s << std::setprecision(6) << "value " << value << " vs limit " << limit;
  return s.str();
}

Field gaussian(const Grid& g, double var, double mean = 0.0) {
  return field_from_function(g, [=](const Point& x) {
    return std::exp(-(x[0] - mean) * (x[0] - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
  });
}

ModelSpec congestion() {
  return builtin_model("congestion", {{"c", 1.0}, {"g_depth", 0.5}, {"g_center", 1.0}, {"p0_mean", -0.5}}, 1, 0.5);
}

std::vector<Check> battery() {
  std::vector<Check> checks;
  checks.push_back({"grid: integral of 1 is (2L)^d", [] {
                      const Grid g(2, 3.0, 16);
                      const double v = integrate(Field(g, 1.0));
                      return expect(v == 36.0, v, 36.0);
                    }});
  checks.push_back({"grid: Gaussian mass", [] {
                      const double e = std::abs(integrate(gaussian(Grid(1, 8.0, 512), 1.0)) - 1.0);
                      return expect(e <= 1e-10, e, 1e-10);
                    }});
  checks.push_back({"semigroup: Gaussian convolution oracle", [] {
                      const Grid g(1, 8.0, 512);
                      const double e = sup_distance(HeatOperator(g).apply(0.5, gaussian(g, 0.25)), gaussian(g, 0.75));
                      return expect(e <= 1e-8, e, 1e-8);
                    }});
  checks.push_back({"semigroup: gradient bound sqrt(d)/sqrt(t)", [] {
                      const Grid g(1, 8.0, 256);
                      const HeatOperator heat(g);
                      Philox4x32 rng(7);
                      double worst = 0.0;
                      for (int r = 0; r < 20; ++r) {
                        Field f(g);
                        for (std::size_t i = 0; i < f.size(); ++i) {
                          const auto w = rng({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(r), 0, 0});
                          f[i] = 2.0 * uniform_open(w[0], w[1]) - 1.0;
                        }
                        for (double t : {0.01, 0.1, 1.0}) {
                          worst = std::max(worst, sup_norm(heat.apply_gradient(t, f)) * std::sqrt(t) / sup_norm(f));
                        }
                      }
                      return expect(worst <= 1.0, worst, 1.0);
                    }});
  checks.push_back({"model: mollifier mass and V^1 = V", [] {
                      const ModelSpec m = congestion();
                      double worst = 0.0;
                      for (std::int64_t N : {1, 100, 10000}) {
                        const Mollifier v = mollifier_for(m, N);
                        const Grid g(1, 4.0 * v.scale(), 1024);
                        worst = std::max(worst, std::abs(integrate(field_from_function(g, [&](const Point& x) { return v(x); })) - 1.0));
                      }
                      const Mollifier v1 = mollifier_for(m, 1);
                      const bool same = v1(Point{0.3, 0.0}) == m.kernel(Point{0.3, 0.0});
                      return same ? expect(worst <= 1e-8, worst, 1e-8) : std::string("V^1 differs from V");
                    }});
  checks.push_back({"model: beta outside (0, 1/2) is rejected", [] {
                      try {
                        builtin_model("free", {}, 1, 1.0, 0.7);
                      } catch (const ConfigError& e) {
                        return std::string(e.what()).find("(H3) requires beta in (0, 1/2)") != std::string::npos
                                   ? std::string()
                                   : std::string("unexpected message: ") + e.what();
                      }
                      return std::string("no error raised");
                    }});
  checks.push_back({"solver: free model with g = 0 is trivial", [] {
                      const auto sol = solve_mfg(builtin_model("free", {}, 1, 0.5), Grid(1, 8.0, 128), 10);
                      const double u = sol.u.frames.empty() ? 1.0 : sup_norm(sol.u.frames[0]);
                      return sol.iterations <= 2 && sol.k_bound == 0.0 ? expect(u == 0.0, u, 0.0)
                                                                       : std::string("iterations or k_bound wrong");
                    }});
  checks.push_back({"solver: congestion Picard contracts to 1e-8", [] {
                      const auto sol = solve_mfg(congestion(), Grid(1, 8.0, 256), 50);
                      if (!sol.converged) return std::string("not converged");
                      return expect(sol.contraction_ratio() < 1.0, sol.contraction_ratio(), 1.0);
                    }});
  checks.push_back({"solver: Hopf-Cole agrees with the direct solve", [] {
                      const auto pr = make_mfg_problem(congestion(), Grid(1, 8.0, 256), 50);
                      const auto sol = solve_mfg(pr);
                      const auto hc = solve_hopf_cole(pr);
                      double gap = 0.0;
                      for (std::size_t k = 0; k < sol.u.frames.size(); ++k) {
                        gap = std::max(gap, sup_distance(sol.u.frames[k], hc.u_from_w.frames[k]));
                      }
                      return expect(gap <= 1e-3, gap, 1e-3);
                    }});
  checks.push_back({"solver: mild residual detects a perturbed u", [] {
                      const auto pr = make_mfg_problem(congestion(), Grid(1, 8.0, 128), 20);
                      auto sol = solve_mfg(pr);
                      for (auto& f : sol.u.frames) f += Field(f.grid(), 0.1);
                      const double r = verify_mild_residual(pr, sol).r_u;
                      return expect(r >= 0.05, r, 0.05);
                    }});
  checks.push_back({"forward: zero feedback is the heat flow", [] {
                      const auto pr = make_mfg_problem(builtin_model("free", {}, 1, 0.5), Grid(1, 8.0, 256), 20);
                      const auto lim = solve_forward(pr, constant_feedback(pr, {0.0, 0.0}));
                      const HeatOperator heat(pr.grid);
                      double e = 0.0;
                      for (int k = 0; k <= pr.steps; ++k) e = std::max(e, sup_distance(lim.p.frames[k], heat.apply(pr.time(k), pr.p0)));
                      return expect(e <= 1e-8, e, 1e-8);
                    }});
  checks.push_back({"particles: cell list equals direct summation", [] {
                      const ModelSpec m = congestion();
                      for (int r = 0; r < 10; ++r) {
                        const std::int64_t N = 16 + 24 * r;
                        Philox4x32 rng(derive_seed(5, "cells" + std::to_string(r)));
                        std::vector<Point> x(N);
                        for (std::int64_t i = 0; i < N; ++i) {
                          const auto w = rng({static_cast<std::uint32_t>(i), 0, 0, 0});
                          x[i] = {4.0 * uniform_open(w[0], w[1]) - 2.0, 0.0};
                        }
                        const Mollifier mol = mollifier_for(m, N);
                        if (interaction_cell_list(mol, x, 1) != interaction_direct(mol, x, 1)) {
                          return "mismatch for N = " + std::to_string(N);
                        }
                      }
                      return std::string();
                    }});
  checks.push_back({"particles: empirical density has unit mass", [] {
                      const ModelSpec m = congestion();
                      const Grid g(1, 8.0, 256);
                      SimConfig cfg;
                      cfg.particles = 400;
                      cfg.steps = 20;
                      const auto ens = simulate(m, g, cfg, Profile{});
                      const auto dens = empirical_density(ens, m, Grid(1, 8.0, 1024), 5);
                      double e = 0.0;
                      for (const auto& f : dens.frames.frames) e = std::max(e, std::abs(integrate(f) - 1.0));
                      return expect(e <= 1e-8, e, 1e-8);
                    }});
  checks.push_back({"analysis: constant control costs |c|^2 T / 2", [] {
                      const ModelSpec m = builtin_model("free", {}, 1, 0.5);
                      SimConfig cfg;
                      cfg.particles = 4;
                      cfg.steps = 10;
                      cfg.tracked = {0};
                      const Profile p{Feedback::constant({0.6, 0.0}, "c"), std::nullopt, {}};
                      const double v = player_cost(simulate(m, Grid(1, 8.0, 128), cfg, p), m, 0).total();
                      return expect(std::abs(v - 0.09) <= 1e-12, v, 0.09);
                    }});
  checks.push_back({"analysis: dw_proxy of two Diracs", [] {
                      const Grid g(1, 4.0, 256);
                      Field delta(g);
                      const int k = 128 + 16;  // node at 0.5
                      delta[k] = 1.0 / g.h();
                      const std::vector<Point> at0{{0.0, 0.0}};
                      const double v = dw_proxy(at0, delta);
                      return expect(std::abs(v - 0.5) <= g.h(), v, 0.5);
                    }});
  checks.push_back({"rng: Philox4x32-10 known answer", [] {
                      const auto out = Philox4x32(Philox4x32::Key{0u, 0u})({0u, 0u, 0u, 0u});
                      const Philox4x32::Counter want{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
                      return out == want ? std::string() : std::string("block mismatch");
                    }});
  checks.push_back({"cli: unknown config keys are rejected", [] {
                      try {
                        merge_config(json::parse(R"({"solver": {"tolerance": 1e-9}})"));
                      } catch (const ConfigError&) {
                        return std::string();
                      }
                      return std::string("unknown key accepted");
                    }});
  return checks;
}

}  // namespace

int run_selftest(std::ostream& out) {
  int failures = 0;
  for (const auto& c : battery()) {
    std::string reason;
    try {
      reason = c.run();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    out << (reason.empty() ? "PASS " : "FAIL ") << c.name;
    if (!reason.empty()) out << " (" << reason << ")";
    out << '\n';
    failures += reason.empty() ? 0 : 1;
  }
  out << (failures == 0 ? "selftest: all checks passed" : "selftest: " + std::to_string(failures) + " failed") << '\n';
  return failures;
}

}  // namespace mfglab
