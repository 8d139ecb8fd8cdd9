#pragma once

#include <array>
#include <cstddef>

namespace mfg {

// A point in R^d for d <= 2. Unused trailing coordinates are zero.
using Point = std::array<double, 2>;

/// Uniform node grid on the box [-L, L]^d with n nodes per axis.
///
/// Nodes sit at x_k = -L + k*h, k = 0..n-1, with h = 2L/n. Flat indices are
/// row-major: in 2D, flat = k0 * n + k1 where k0 indexes the first axis.
class Grid {
 public:
  Grid(int dim, double half_width, int points_per_axis);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  std::size_t size() const;

  double node(int k) const { return -half_width_ + k * h_; }
  Point point(std::size_t flat) const;
  std::array<int, 2> multi_index(std::size_t flat) const;
  std::size_t flat_index(int k0, int k1 = 0) const;

  bool contains(const Point& x) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  double half_width_;
  int n_;
  double h_;
};

double norm(const Point& x, int dim);

}  // namespace mfg
