#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "mfg/field.hpp"

namespace mfg {

/// Fourier coefficients of a zero-padded field on the doubled grid.
using Spectrum = std::vector<std::complex<double>>;

/// Heat semigroup P_t (generator Laplacian/2, kernel covariance t*I) and its
/// gradient, realised as linear convolutions on a grid.
///
/// Fields are zero-padded to a grid with 2n nodes per axis so circular FFT
/// convolution equals linear convolution over the original box. The heat
/// kernel is the sampled Gaussian renormalised to unit discrete mass; the
/// gradient kernel is the sampled analytic derivative -x/t * G(t, x), odd by
/// construction so it carries zero mass.
///
/// Multipliers for a ladder of times can be precomputed at construction;
/// any other t > 0 is built on the fly. Instances are immutable and safe to
/// share across threads.
class HeatOperator {
 public:
  explicit HeatOperator(const Grid& grid);
  HeatOperator(const Grid& grid, std::vector<double> ladder);

  /// Ladder {dt, 2dt, ..., steps*dt}.
  static HeatOperator with_ladder(const Grid& grid, double dt, int steps);

  const Grid& grid() const;

  Field apply(double t, const Field& f) const;
  VectorField apply_gradient(double t, const Field& f) const;

  // Building blocks for Duhamel sums: transform each source once, accumulate
  // kernel products in Fourier space, synthesize once per output frame.
  Spectrum transform(const Field& f) const;
  Field synthesize(const Spectrum& s) const;
  Spectrum zero_spectrum() const;

  /// acc += scale * FT[G(t)] * s
  void accumulate_heat(Spectrum& acc, double t, const Spectrum& s, double scale = 1.0) const;
  /// acc += scale * FT[d_axis G(t)] * s
  void accumulate_gradient(Spectrum& acc, int axis, double t, const Spectrum& s,
                           double scale = 1.0) const;

  /// Real heat multiplier on the padded frequency lattice (identity at t = 0).
  std::vector<double> heat_multiplier(double t) const;

  struct Kernels;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::shared_ptr<const Kernels> kernels_for(double t) const;
};

}  // namespace mfg
