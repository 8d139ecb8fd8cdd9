#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Scalar function sampled at the nodes of a Grid.
class Field {
 public:
  explicit Field(const Grid& grid, double fill = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// d scalar components on a common grid.
class VectorField {
 public:
  explicit VectorField(const Grid& grid);
  explicit VectorField(std::vector<Field> components);

  const Grid& grid() const { return components_.front().grid(); }
  int dim() const { return static_cast<int>(components_.size()); }
  const Field& component(int axis) const { return components_[axis]; }
  Field& component(int axis) { return components_[axis]; }
  Point at(std::size_t flat) const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator*=(double s);

 private:
  std::vector<Field> components_;
};

VectorField operator-(const VectorField& v);

/// Time-indexed sequence of frames on the uniform ladder t0 + k*(t1-t0)/M.
template <class Frame>
struct Flow {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<Frame> frames;

  int steps() const { return static_cast<int>(frames.size()) - 1; }
  double dt() const { return (t1 - t0) / steps(); }
  double time(int k) const { return t0 + k * dt(); }
  /// Frame index that is active at time t under left-constant interpolation.
  int frame_at(double t) const;
};

using FieldFlow = Flow<Field>;
using VectorFlow = Flow<VectorField>;

template <class Frame>
int Flow<Frame>::frame_at(double t) const {
  const int m = steps();
  if (m <= 0) return 0;
  const double s = (t - t0) / dt();
  int k = static_cast<int>(s + 1e-9);
  if (k < 0) k = 0;
  if (k > m) k = m;
  return k;
}

using ScalarFunction = std::function<double(const Point&)>;

/// Samples fn at every node. Throws NumericalError naming the first node
/// where fn is not finite.
Field field_from_function(const Grid& grid, const ScalarFunction& fn);

/// Rectangle rule: h^d * sum of values.
double integrate(const Field& f);

/// Central differences inside, one-sided second-order stencils on the first
/// and last node of every axis.
VectorField gradient(const Field& f);

double sup_norm(const Field& f);
double sup_norm(const VectorField& v);
double sup_distance(const Field& f, const Field& g);
double sup_distance(const VectorField& f, const VectorField& g);

/// Pointwise Euclidean norm of a vector field.
Field magnitude(const VectorField& v);

/// Local Hölder seminorm: max over node pairs with 0 < |x-y| <= radius*h of
/// |f(x)-f(y)| / |x-y|^gamma.
double holder_seminorm(const Field& f, double gamma, int window_radius = 4);

/// Hölder norm [f]_gamma + ||f||_inf.
double holder_norm(const Field& f, double gamma, int window_radius = 4);

/// Multilinear interpolation; points outside the grid box are clamped to it.
double interpolate(const Field& f, const Point& x);
Point interpolate(const VectorField& v, const Point& x);

/// Samples f onto another grid by multilinear interpolation; nodes outside
/// the source box receive `outside`.
Field resample(const Field& f, const Grid& target, double outside = 0.0);

/// Throws NumericalError if any value is NaN or infinite.
void require_finite(const Field& f, std::string_view context);
void require_finite(const VectorField& v, std::string_view context);

void require_same_grid(const Grid& a, const Grid& b, std::string_view context);

}  // namespace mfg
