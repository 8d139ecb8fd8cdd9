#pragma once

// Shared discretisation of the forward mild equation; the MFG solver and the
// standalone forward solver must agree on it term for term.

#include <vector>

#include "mfg/field.hpp"
#include "mfg/semigroup.hpp"

namespace mfg::detail {

/// p'(t_k) = P_{k dt} p0 - dt * sum_{j<k} gradP_{(k-j) dt} . (p_j V_j)
FieldFlow forward_mild_map(const HeatOperator& heat, const Field& p0, double t0, double t1,
                           const FieldFlow& p, const std::vector<VectorField>& velocity);

struct ClipStats {
  double clipped_mass = 0.0;  // largest clipped negative mass over frames
  double mass_drift = 0.0;    // largest |mass - 1| over frames before renormalising
};

/// Clips negative densities and renormalises every frame after the first to
/// unit mass.
ClipStats clip_and_renormalize(FieldFlow& p);

double flow_distance(const FieldFlow& a, const FieldFlow& b);
double flow_distance(const VectorFlow& a, const VectorFlow& b);

/// (1 - d) a + d b, frame by frame.
FieldFlow blend(const FieldFlow& a, const FieldFlow& b, double d);
VectorFlow blend(const VectorFlow& a, const VectorFlow& b, double d);

}  // namespace mfg::detail
