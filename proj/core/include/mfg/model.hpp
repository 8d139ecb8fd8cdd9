#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mfg/field.hpp"

namespace mfg {

using DriftFunction = std::function<Point(const Point& x, double density)>;
using CostFunction = std::function<double(const Point& x, double density)>;
using ParamMap = std::map<std::string, double>;

/// Radial C^1 bump V(x) = c_d (1 - |x|^2)^2 on the unit ball, unit mass.
class BumpKernel {
 public:
  explicit BumpKernel(int dim = 1);

  int dim() const { return dim_; }
  double support_radius() const { return 1.0; }
  double normalization() const { return norm_; }
  double operator()(const Point& x) const;
  /// V as a function of |x|^2.
  double from_squared_radius(double r2) const {
    return r2 >= 1.0 ? 0.0 : norm_ * (1.0 - r2) * (1.0 - r2);
  }

 private:
  int dim_;
  double norm_;
};

/// V^N(x) = N^beta V(N^{beta/d} x): support radius eps_N = N^{-beta/d}.
class Mollifier {
 public:
  Mollifier(const BumpKernel& base, std::int64_t particles, double beta);

  std::int64_t particles() const { return particles_; }
  double beta() const { return beta_; }
  int dim() const { return base_.dim(); }
  double scale() const { return scale_; }
  double amplitude() const { return amplitude_; }
  double support_radius() const { return scale_; }
  double peak() const { return amplitude_ * base_.from_squared_radius(0.0); }

  double operator()(const Point& x) const;
  double from_squared_distance(double r2) const {
    return amplitude_ * base_.from_squared_radius(r2 * inv_scale2_);
  }

 private:
  BumpKernel base_;
  std::int64_t particles_;
  double beta_;
  double scale_;
  double inv_scale2_;
  double amplitude_;
};

struct ModelBounds {
  double sup_drift_plus_cost = 0.0;  // C: |b| + |f| <= C
  double lipschitz = 0.0;            // L: joint Lipschitz constant in (x, density)
};

/// The game's data: coefficients, initial density, interaction kernel.
///
/// Coefficient callables must be pure and reentrant; particle code calls
/// them concurrently. Catalog models decay in the far field (b(x,0) = 0,
/// f(x,0) = 0, g -> 0, p0 -> 0), which is what makes truncation to a box
/// with zero-padded convolutions consistent.
struct ModelSpec {
  std::string name;
  int dim = 1;
  double horizon = 1.0;
  double beta = 0.3;
  DriftFunction drift;
  CostFunction running_cost;
  ScalarFunction terminal_cost;
  ScalarFunction initial_density;
  BumpKernel kernel{1};
  ModelBounds bounds;
  bool drift_is_zero = false;
  bool drift_depends_on_density = true;
  bool running_cost_is_zero = false;
  ParamMap params;
};

/// Names accepted by builtin_model.
std::vector<std::string> model_catalog();

/// Catalog models:
///   free              b = 0, f = 0
///   congestion        b = 0, f = c rho / (1 + rho)
///   drift-congestion  b = -kappa tanh(rho) x / (1 + |x|), f = c rho / (1 + rho)
/// Shared params: g_depth, g_center, g_width (terminal well
/// g(x) = -depth exp(-|x - center e1|^2 / (2 width^2))), p0_mean, p0_sd
/// (Gaussian initial density centred at mean*e1).
ModelSpec builtin_model(std::string_view name, const ParamMap& params, int dim = 1,
                        double horizon = 1.0, double beta = 0.3);

Mollifier mollifier_for(const ModelSpec& m, std::int64_t particles);

/// Throws ConfigError unless beta lies strictly inside (0, 1/2).
void require_valid_beta(double beta);

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  bool passed = false;
  double estimated_sup = 0.0;
  double estimated_lipschitz = 0.0;
  std::array<double, 3> exp_moment_lambdas{0.5, 1.0, 2.0};
  std::array<double, 3> exp_moments{};
  std::vector<HypothesisCheck> checks;
};

/// Monte Carlo certification of the declared bounds plus quadrature checks
/// of the initial density. Failures are recorded in the report.
ValidationReport validate_hypotheses(const ModelSpec& m, int samples, std::uint64_t seed);

/// Initial density sampled on the grid and renormalised to unit mass.
Field initial_density_field(const ModelSpec& m, const Grid& grid);

}  // namespace mfg
