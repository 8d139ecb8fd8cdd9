#include "mfg/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg {

BumpKernel::BumpKernel(int dim) : dim_(dim) {
  if (dim == 1) {
    norm_ = 15.0 / 16.0;  // int_{-1}^{1} (1 - x^2)^2 dx = 16/15
  } else if (dim == 2) {
    norm_ = 3.0 / std::numbers::pi;  // 2 pi int_0^1 (1 - r^2)^2 r dr = pi/3
  } else {
    throw ConfigError("bump kernel dimension must be 1 or 2");
  }
}

double BumpKernel::operator()(const Point& x) const {
  double r2 = x[0] * x[0];
  if (dim_ == 2) r2 += x[1] * x[1];
  return from_squared_radius(r2);
}

Mollifier::Mollifier(const BumpKernel& base, std::int64_t particles, double beta)
    : base_(base), particles_(particles), beta_(beta) {
  if (particles < 1) throw ConfigError("mollifier needs N >= 1");
  const double n = static_cast<double>(particles);
  scale_ = std::pow(n, -beta / base.dim());
  inv_scale2_ = 1.0 / (scale_ * scale_);
  amplitude_ = std::pow(n, beta);
}

double Mollifier::operator()(const Point& x) const {
  double r2 = x[0] * x[0];
  if (dim() == 2) r2 += x[1] * x[1];
  return from_squared_distance(r2);
}

void require_valid_beta(double beta) {
  if (!(beta > 0.0 && beta < 0.5)) {
    std::ostringstream msg;
    msg << "(H3) requires beta in (0, 1/2), got " << beta;
    throw ConfigError(msg.str());
  }
}

std::vector<std::string> model_catalog() { return {"free", "congestion", "drift-congestion"}; }

namespace {

double param_or(const ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const ParamMap& params, const std::set<std::string>& allowed,
                    std::string_view model) {
  for (const auto& [key, value] : params) {
    if (!allowed.count(key)) {
      std::ostringstream msg;
      msg << "unknown parameter '" << key << "' for model '" << model << "'; allowed:";
      for (const auto& a : allowed) msg << ' ' << a;
      throw ConfigError(msg.str());
    }
    if (!std::isfinite(value)) throw ConfigError("parameter '" + key + "' must be finite");
  }
}

}  // namespace

ModelSpec builtin_model(std::string_view name, const ParamMap& params, int dim, double horizon,
                        double beta) {
  const auto catalog = model_catalog();
  if (std::find(catalog.begin(), catalog.end(), name) == catalog.end()) {
    std::ostringstream msg;
    msg << "unknown model '" << name << "'; catalog:";
    for (const auto& c : catalog) msg << ' ' << c;
    throw ConfigError(msg.str());
  }
  if (dim != 1 && dim != 2) throw ConfigError("model dimension must be 1 or 2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon T must be positive");
  require_valid_beta(beta);

  std::set<std::string> allowed{"g_depth", "g_center", "g_width", "p0_mean", "p0_sd"};
  if (name != "free") allowed.insert("c");
  if (name == "drift-congestion") allowed.insert("kappa");
  reject_unknown(params, allowed, name);

  ModelSpec m;
  m.name = std::string(name);
  m.dim = dim;
  m.horizon = horizon;
  m.beta = beta;
  m.kernel = BumpKernel(dim);

  const double g_depth = param_or(params, "g_depth", 0.0);
  const double g_center = param_or(params, "g_center", 0.0);
  const double g_width = param_or(params, "g_width", 1.0);
  const double p0_mean = param_or(params, "p0_mean", 0.0);
  const double p0_sd = param_or(params, "p0_sd", 0.5);
  if (!(g_width > 0.0)) throw ConfigError("g_width must be positive");
  if (!(p0_sd > 0.0)) throw ConfigError("p0_sd must be positive");
  m.params = {{"g_depth", g_depth}, {"g_center", g_center}, {"g_width", g_width},
              {"p0_mean", p0_mean}, {"p0_sd", p0_sd}};

  m.terminal_cost = [=](const Point& x) {
    if (g_depth == 0.0) return 0.0;
    double r2 = (x[0] - g_center) * (x[0] - g_center);
    if (dim == 2) r2 += x[1] * x[1];
    return -g_depth * std::exp(-r2 / (2.0 * g_width * g_width));
  };
  m.initial_density = [=](const Point& x) {
    double r2 = (x[0] - p0_mean) * (x[0] - p0_mean);
    if (dim == 2) r2 += x[1] * x[1];
    const double var = p0_sd * p0_sd;
    return std::exp(-r2 / (2.0 * var)) / std::pow(2.0 * std::numbers::pi * var, 0.5 * dim);
  };

  if (name == "free") {
    m.drift = [](const Point&, double) { return Point{0.0, 0.0}; };
    m.running_cost = [](const Point&, double) { return 0.0; };
    m.drift_is_zero = true;
    m.drift_depends_on_density = false;
    m.running_cost_is_zero = true;
    m.bounds = {0.0, 0.0};
    return m;
  }

  const double c = param_or(params, "c", 1.0);
  if (c < 0.0) throw ConfigError("congestion weight c must be >= 0");
  m.params["c"] = c;
  m.running_cost = [c](const Point&, double rho) {
    const double r = std::max(rho, 0.0);
    return c * r / (1.0 + r);
  };
  m.running_cost_is_zero = c == 0.0;

  if (name == "congestion") {
    m.drift = [](const Point&, double) { return Point{0.0, 0.0}; };
    m.drift_is_zero = true;
    m.drift_depends_on_density = false;
    // 0 <= f < c; |df/drho| = c / (1 + rho)^2 <= c
    m.bounds = {c, c};
    return m;
  }

  const double kappa = param_or(params, "kappa", 0.5);
  if (kappa < 0.0) throw ConfigError("kappa must be >= 0");
  m.params["kappa"] = kappa;
  m.drift = [kappa, dim](const Point& x, double rho) {
    const double r = std::max(rho, 0.0);
    const double s = -kappa * std::tanh(r) / (1.0 + norm(x, dim));
    return Point{s * x[0], dim == 2 ? s * x[1] : 0.0};
  };
  m.drift_is_zero = kappa == 0.0;
  m.drift_depends_on_density = kappa != 0.0;
  // |b| <= kappa, |f| < c; x -> x/(1+|x|) is 1-Lipschitz, tanh is 1-Lipschitz.
  m.bounds = {kappa + c, kappa + c};
  return m;
}

Mollifier mollifier_for(const ModelSpec& m, std::int64_t particles) {
  return Mollifier(m.kernel, particles, m.beta);
}

Field initial_density_field(const ModelSpec& m, const Grid& grid) {
  if (grid.dim() != m.dim) throw ConfigError("grid and model dimensions differ");
  Field p0 = field_from_function(grid, m.initial_density);
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] < 0.0) throw ConfigError("initial density must be nonnegative");
  }
  const double mass = integrate(p0);
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "initial density has mass " << mass
        << " on the grid; enlarge the domain so that |mass - 1| <= 1e-6";
    throw ConfigError(msg.str());
  }
  p0 *= 1.0 / mass;
  return p0;
}

ValidationReport validate_hypotheses(const ModelSpec& m, int samples, std::uint64_t seed) {
  if (samples < 1000) throw ConfigError("validate_hypotheses needs at least 1000 samples");
  ValidationReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double box = 10.0;

  auto draw_point = [&] {
    Point x{0.0, 0.0};
    for (int a = 0; a < m.dim; ++a) x[a] = box * (2.0 * unit(rng) - 1.0);
    return x;
  };
  // Half of the densities near zero where the coefficients vary most.
  auto draw_density = [&] { return unit(rng) < 0.5 ? 2.0 * unit(rng) : 50.0 * unit(rng); };
  auto bf = [&](const Point& x, double rho) {
    const Point b = m.drift(x, rho);
    return std::pair{b, m.running_cost(x, rho)};
  };

  double sup = 0.0, lip = 0.0;
  bool finite = true;
  for (int s = 0; s < samples; ++s) {
    const Point x = draw_point();
    const double rho = draw_density();
    const auto [b, f] = bf(x, rho);
    const double val = norm(b, m.dim) + std::abs(f);
    finite = finite && std::isfinite(val);
    sup = std::max(sup, val);

    // nearby pair at a random scale
    const double scale = std::pow(10.0, -4.0 + 4.0 * unit(rng));
    Point y = x;
    for (int a = 0; a < m.dim; ++a) y[a] += scale * (2.0 * unit(rng) - 1.0);
    const double q = std::max(0.0, rho + scale * (2.0 * unit(rng) - 1.0));
    const auto [b2, f2] = bf(y, q);
    Point db{b[0] - b2[0], b[1] - b2[1]};
    Point dx{x[0] - y[0], x[1] - y[1]};
    const double den = norm(dx, m.dim) + std::abs(rho - q);
    if (den > 0.0) lip = std::max(lip, (norm(db, m.dim) + std::abs(f - f2)) / den);
  }
  rep.estimated_sup = sup;
  rep.estimated_lipschitz = lip;

  auto add = [&](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  {
    std::ostringstream d;
    d << "sampled sup |b|+|f| = " << sup << ", declared C = " << m.bounds.sup_drift_plus_cost;
    add("drift-cost-bound", finite && sup <= 1.01 * m.bounds.sup_drift_plus_cost, d.str());
  }
  {
    std::ostringstream d;
    d << "sampled Lipschitz ratio = " << lip << ", declared L = " << m.bounds.lipschitz;
    add("lipschitz", finite && lip <= 1.01 * m.bounds.lipschitz, d.str());
  }

  // g and its gradient bounded (central differences on samples).
  {
    double gsup = 0.0, dgsup = 0.0;
    bool ok = true;
    const double e = 1e-5;
    for (int s = 0; s < samples; ++s) {
      const Point x = draw_point();
      const double gx = m.terminal_cost(x);
      ok = ok && std::isfinite(gx);
      gsup = std::max(gsup, std::abs(gx));
      for (int a = 0; a < m.dim; ++a) {
        Point xp = x, xm = x;
        xp[a] += e;
        xm[a] -= e;
        const double dg = (m.terminal_cost(xp) - m.terminal_cost(xm)) / (2.0 * e);
        ok = ok && std::isfinite(dg);
        dgsup = std::max(dgsup, std::abs(dg));
      }
    }
    std::ostringstream d;
    d << "sup|g| = " << gsup << ", sup|grad g| = " << dgsup;
    add("terminal-cost", ok, d.str());
  }

  // Beta range and unit mass of the base kernel (exact Gauss-Legendre
  // on the radial profile, which is a polynomial).
  {
    const bool beta_ok = m.beta > 0.0 && m.beta < 0.5;
    std::ostringstream d;
    d << "beta = " << m.beta;
    add("beta-range", beta_ok, d.str());
    // 5-point Gauss-Legendre on [0,1] integrates degree <= 9 exactly.
    const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                             0.9061798459386640};
    const double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};
    double mass = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double r = 0.5 * (nodes[i] + 1.0);
      const double w = 0.5 * weights[i];
      const double v = m.kernel.from_squared_radius(r * r);
      mass += m.dim == 1 ? 2.0 * w * v : 2.0 * std::numbers::pi * r * w * v;
    }
    std::ostringstream dm;
    dm << "integral of V = " << mass;
    add("kernel-mass", std::abs(mass - 1.0) <= 1e-12, dm.str());
  }

  // Exponential moments of p0 by quadrature on a box; finiteness
  // proxy is the decay of the integrand at the box edge.
  {
    const double R = 12.0;
    const int n = m.dim == 1 ? 4096 : 512;
    const double h = 2.0 * R / n;
    double mass = 0.0;
    std::array<double, 3> mom{};
    std::array<double, 3> edge{};
    auto visit = [&](const Point& x, bool on_edge) {
      const double p = m.initial_density(x);
      const double r = norm(x, m.dim);
      mass += p;
      for (int l = 0; l < 3; ++l) {
        const double v = std::exp(rep.exp_moment_lambdas[l] * r) * p;
        mom[l] += v;
        if (on_edge) edge[l] = std::max(edge[l], v);
      }
    };
    if (m.dim == 1) {
      for (int k = 0; k < n; ++k) visit({-R + k * h, 0.0}, k == 0 || k == n - 1);
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          visit({-R + i * h, -R + j * h}, i == 0 || j == 0 || i == n - 1 || j == n - 1);
    }
    const double vol = m.dim == 1 ? h : h * h;
    mass *= vol;
    bool ok = true;
    std::ostringstream d;
    for (int l = 0; l < 3; ++l) {
      rep.exp_moments[l] = mom[l] * vol;
      const bool fin = std::isfinite(rep.exp_moments[l]) && edge[l] <= 1e-8 * mom[l];
      ok = ok && fin;
      d << "E[exp(" << rep.exp_moment_lambdas[l] << "|X0|)] = " << rep.exp_moments[l]
        << (fin ? "" : " (tail not decayed)") << "; ";
    }
    d << "mass = " << mass;
    ok = ok && std::abs(mass - 1.0) <= 1e-6;
    add("initial-density-tails", ok, d.str());
  }

  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const HypothesisCheck& c) { return c.passed; });
  return rep;
}

}  // namespace mfg
