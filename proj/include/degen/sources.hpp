#pragma once

// Separable source signals s(x) g(t) on the staggered mesh.

#include <array>
#include <string>

#include "degen/eddy_current.hpp"

namespace degen {

enum class TimeShape { Step, Ramp, Gaussian };

/// Every shape vanishes for t < start.
///   step:     amplitude
///   ramp:     amplitude sin^2(pi/2 (t - start)/width) up to start + width, then amplitude
///   gaussian: amplitude exp(-(t - c)^2 / (2 width^2)), c = start + 4 width
struct TimeProfile {
  TimeShape shape = TimeShape::Ramp;
  double start = 0.0;
  double width = 1.0;
  double amplitude = 1.0;

  double value(double t) const;
};

enum class SpatialShape { Zero, Random, Monomial };

/// random: i.i.d. standard normal entries from seed.
/// monomial: x^a y^b z^c at the entity's center, restricted to one axis
/// when axis is 0..2. Nonzero fields are scaled to unit Euclidean norm.
struct SpatialProfile {
  SpatialShape shape = SpatialShape::Random;
  unsigned seed = 1;
  std::array<int, 3> exponents{0, 0, 0};
  int axis = -1;
};

TimeShape parse_time_shape(const std::string& name);
SpatialShape parse_spatial_shape(const std::string& name);
const char* to_string(TimeShape s) noexcept;
const char* to_string(SpatialShape s) noexcept;

/// Edge field; projected onto H0 when project is set (before the scaling).
Vector edge_field(const EddyProblem& p, const SpatialProfile& s, bool project);
Vector face_field(const EddyProblem& p, const SpatialProfile& s);

/// (space ⊗ g)(t_n) = g(t_n) space.
TimeSignal separable(const TimeGrid& grid, const Vector& space, const TimeProfile& g);

/// First node index where the signal is nonzero, nodes() if none.
int first_nonzero_node(const TimeSignal& f);

}  // namespace degen
