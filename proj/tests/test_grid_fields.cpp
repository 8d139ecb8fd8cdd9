#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mfg/errors.hpp"
#include "mfg/field.hpp"

namespace mfg {
namespace {

double std_normal(const Point& x) { return std::exp(-0.5 * x[0] * x[0]) / std::sqrt(2.0 * std::numbers::pi); }

TEST(Grid, SpacingAndNodes) {
  const Grid g(1, 8.0, 512);
  EXPECT_EQ(g.h(), 16.0 / 512);
  EXPECT_EQ(g.node(0), -8.0);
  EXPECT_EQ(g.node(3), -8.0 + 3 * g.h());
  EXPECT_EQ(g.size(), 512u);
}

TEST(Grid, RejectsInvalidShapes) {
  EXPECT_THROW(Grid(3, 1.0, 16), ConfigError);
  EXPECT_THROW(Grid(1, 0.0, 16), ConfigError);
  EXPECT_THROW(Grid(1, 1.0, 8), ConfigError);
  EXPECT_THROW(Grid(1, 1.0, 48), ConfigError);
}

TEST(Grid, RowMajorFlatIndex) {
  const Grid g(2, 1.0, 16);
  EXPECT_EQ(g.flat_index(2, 3), 2u * 16 + 3);
  const Point p = g.point(g.flat_index(2, 3));
  EXPECT_EQ(p[0], g.node(2));
  EXPECT_EQ(p[1], g.node(3));
}

TEST(Grid, ContainsTheClosedBox) {
  const Grid g(1, 2.0, 16);
  EXPECT_TRUE(g.contains({2.0, 0.0}));
  EXPECT_TRUE(g.contains({-2.0, 0.0}));
  EXPECT_FALSE(g.contains({2.0001, 0.0}));
}

TEST(FieldFromFunction, ConstantAndIdentity) {
  const Grid g(1, 4.0, 32);
  const Field one = field_from_function(g, [](const Point&) { return 1.0; });
  for (double v : one.values()) EXPECT_EQ(v, 1.0);
  const Field id = field_from_function(g, [](const Point& x) { return x[0]; });
  for (int k = 0; k < g.n(); ++k) EXPECT_EQ(id[k], -4.0 + k * g.h());
}

TEST(FieldFromFunction, NonFiniteNamesTheNode) {
  const Grid g(1, 1.0, 16);
  try {
    field_from_function(g, [](const Point& x) { return x[0] > 0.5 ? NAN : 0.0; });
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("node"), std::string::npos);
  }
}

TEST(Integrate, ZeroConstantAndGaussian) {
  const Grid g(1, 8.0, 512);
  EXPECT_EQ(integrate(Field(g)), 0.0);
  EXPECT_EQ(integrate(Field(g, 1.0)), 16.0);
  EXPECT_EQ(integrate(Field(Grid(2, 8.0, 64), 1.0)), 256.0);
  // Analytic mass 1; the tail beyond |x| = 8 is below 1e-14.
  EXPECT_NEAR(integrate(field_from_function(g, std_normal)), 1.0, 1e-10);
}

TEST(Integrate, IsLinear) {
  const Grid g(1, 3.0, 64);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Field a(g), b(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    a[i] = n(rng);
    b[i] = n(rng);
  }
  const double lhs = integrate(2.5 * a + (-1.5) * b);
  EXPECT_NEAR(lhs, 2.5 * integrate(a) - 1.5 * integrate(b), 1e-12);
}

TEST(Gradient, ConstantGivesZero) {
  const VectorField v = gradient(Field(Grid(2, 1.0, 16), 3.0));
  EXPECT_EQ(sup_norm(v), 0.0);
}

TEST(Gradient, ExactOnQuadratics) {
  const Grid g(1, 2.0, 64);
  const VectorField v = gradient(field_from_function(g, [](const Point& x) { return x[0] * x[0]; }));
  for (int k = 0; k < g.n(); ++k) EXPECT_NEAR(v.component(0)[k], 2.0 * g.node(k), 1e-12) << k;
}

TEST(Gradient, SecondOrderOnSine) {
  const double L = 2.0;
  auto error = [&](int n) {
    const Grid g(1, L, n);
    const VectorField v =
        gradient(field_from_function(g, [&](const Point& x) { return std::sin(std::numbers::pi * x[0] / L); }));
    double e = 0.0;
    for (int k = 0; k < n; ++k) {
      e = std::max(e, std::abs(v.component(0)[k] - std::numbers::pi / L * std::cos(std::numbers::pi * g.node(k) / L)));
    }
    return e;
  };
  const double e1 = error(64), e2 = error(128);
  // Richardson: error constant fitted at n = 64 must carry over to n = 128.
  const double h1 = 2 * L / 64, h2 = 2 * L / 128;
  const double C = e1 / (h1 * h1);
  EXPECT_LE(e2, 1.2 * C * h2 * h2);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(SupNorm, ZeroSelfAndConstants) {
  const Grid g(1, 1.0, 16);
  const Field f(g, 2.0), h(g, -1.0);
  EXPECT_EQ(sup_norm(Field(g)), 0.0);
  EXPECT_EQ(sup_distance(f, f), 0.0);
  EXPECT_EQ(sup_distance(f, h), 3.0);
}

TEST(SupNorm, GridMismatchThrows) {
  EXPECT_THROW(sup_distance(Field(Grid(1, 1.0, 16)), Field(Grid(1, 2.0, 16))), ConfigError);
}

TEST(SupDistance, IsAMetricOnRandomTriples) {
  const Grid g(1, 1.0, 32);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 50; ++t) {
    Field a(g), b(g), c(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
    }
    EXPECT_EQ(sup_distance(a, b), sup_distance(b, a));
    EXPECT_LE(sup_distance(a, c), sup_distance(a, b) + sup_distance(b, c) + 1e-15);
  }
}

TEST(Holder, ConstantIsZero) { EXPECT_EQ(holder_seminorm(Field(Grid(1, 1.0, 16), 5.0), 0.4), 0.0); }

TEST(Holder, SingleJump) {
  const Grid g(1, 1.0, 32);
  Field f(g);
  for (int k = 16; k < 32; ++k) f[k] = 0.3;
  // The adjacent pair across the jump dominates: J / h^gamma.
  EXPECT_NEAR(holder_seminorm(f, 0.5, 4), 0.3 / std::pow(g.h(), 0.5), 1e-12);
}

TEST(Holder, AbsoluteValueIsLipschitzOne) {
  const Grid g(1, 1.0, 64);
  const Field f = field_from_function(g, [](const Point& x) { return std::abs(x[0]); });
  EXPECT_NEAR(holder_seminorm(f, 1.0, 2), 1.0, 1e-12);
}

TEST(Holder, MonotoneInWindowAndGamma) {
  const Grid g(1, 0.5, 64);  // h < 1
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  Field f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = u(rng);
  for (int r = 1; r < 6; ++r) EXPECT_LE(holder_seminorm(f, 0.4, r), holder_seminorm(f, 0.4, r + 1));
  // Every pair in the window is closer than 1, so |x-y|^gamma shrinks as
  // gamma grows and the seminorm can only grow.
  ASSERT_LT(4 * g.h(), 1.0);
  EXPECT_LE(holder_seminorm(f, 0.3, 4), holder_seminorm(f, 0.6, 4));
  // Pairs at distance >= 1 reverse the order.
  const Grid wide(1, 64.0, 32);  // h = 4
  Field w(wide);
  for (std::size_t i = 0; i < wide.size(); ++i) w[i] = u(rng);
  EXPECT_GE(holder_seminorm(w, 0.3, 4), holder_seminorm(w, 0.6, 4));
  EXPECT_NEAR(holder_norm(f, 0.4), holder_seminorm(f, 0.4) + sup_norm(f), 1e-15);
}

TEST(Interpolate, ExactAtNodesAndLinearBetween) {
  const Grid g(2, 1.0, 16);
  const Field f = field_from_function(g, [](const Point& x) { return 2.0 * x[0] - x[1] + 0.5; });
  EXPECT_NEAR(interpolate(f, {0.1, -0.33}), 2.0 * 0.1 + 0.33 + 0.5, 1e-12);
  EXPECT_EQ(interpolate(f, g.point(37)), f[37]);
}

TEST(Resample, FineToCoarseHitsSharedNodes) {
  const Grid fine(1, 4.0, 128), coarse(1, 4.0, 32);
  const Field f = field_from_function(fine, [](const Point& x) { return std::cos(x[0]); });
  const Field r = resample(f, coarse);
  for (int k = 0; k < coarse.n(); ++k) EXPECT_NEAR(r[k], std::cos(coarse.node(k)), 1e-14);
}

}  // namespace
}  // namespace mfg
