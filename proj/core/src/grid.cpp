#include "mfg/grid.hpp"

#include <cmath>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

Grid::Grid(int dim, double half_width, int points_per_axis)
    : dim_(dim), half_width_(half_width), n_(points_per_axis), h_(0.0) {
  if (dim != 1 && dim != 2) {
    throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("grid half width must be positive and finite");
  }
  if (points_per_axis < 16 || (points_per_axis & (points_per_axis - 1)) != 0) {
    throw ConfigError("grid points per axis must be a power of two >= 16, got " +
                      std::to_string(points_per_axis));
  }
  h_ = 2.0 * half_width / points_per_axis;
}

std::size_t Grid::size() const {
  const auto n = static_cast<std::size_t>(n_);
  return dim_ == 1 ? n : n * n;
}

std::array<int, 2> Grid::multi_index(std::size_t flat) const {
  if (dim_ == 1) return {static_cast<int>(flat), 0};
  return {static_cast<int>(flat / n_), static_cast<int>(flat % n_)};
}

std::size_t Grid::flat_index(int k0, int k1) const {
  if (dim_ == 1) return static_cast<std::size_t>(k0);
  return static_cast<std::size_t>(k0) * n_ + static_cast<std::size_t>(k1);
}

Point Grid::point(std::size_t flat) const {
  const auto k = multi_index(flat);
  Point x{node(k[0]), 0.0};
  if (dim_ == 2) x[1] = node(k[1]);
  return x;
}

bool Grid::contains(const Point& x) const {
  for (int a = 0; a < dim_; ++a) {
    if (x[a] < -half_width_ || x[a] > half_width_) return false;
  }
  return true;
}

double norm(const Point& x, int dim) {
  return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
}

}  // namespace mfg
