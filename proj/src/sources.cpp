#include "degen/sources.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "degen/error.hpp"

namespace degen {

double TimeProfile::value(double t) const {
  if (t < start) return 0.0;
  switch (shape) {
    case TimeShape::Step: return amplitude;
    case TimeShape::Ramp: {
      if (t >= start + width) return amplitude;
      const double s = std::sin(0.5 * std::numbers::pi * (t - start) / width);
      return amplitude * s * s;
    }
    case TimeShape::Gaussian: {
      const double z = (t - start - 4.0 * width) / width;
      return amplitude * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

TimeShape parse_time_shape(const std::string& name) {
  if (name == "step") return TimeShape::Step;
  if (name == "ramp") return TimeShape::Ramp;
  if (name == "gaussian") return TimeShape::Gaussian;
  fail(ErrorKind::Argument, "unknown time profile '" + name + "' (step, ramp, gaussian)");
}

SpatialShape parse_spatial_shape(const std::string& name) {
  if (name == "zero") return SpatialShape::Zero;
  if (name == "random" || name == "random_h0") return SpatialShape::Random;
  if (name == "monomial") return SpatialShape::Monomial;
  fail(ErrorKind::Argument, "unknown spatial profile '" + name + "' (zero, random, monomial)");
}

const char* to_string(TimeShape s) noexcept {
  switch (s) {
    case TimeShape::Step: return "step";
    case TimeShape::Ramp: return "ramp";
    case TimeShape::Gaussian: return "gaussian";
  }
  return "?";
}

const char* to_string(SpatialShape s) noexcept {
  switch (s) {
    case SpatialShape::Zero: return "zero";
    case SpatialShape::Random: return "random";
    case SpatialShape::Monomial: return "monomial";
  }
  return "?";
}

namespace {

template <class Center, class Axis>
Vector raw_field(Index dim, const SpatialProfile& s, Center center, Axis axis_of) {
  Vector v = Vector::Zero(dim);
  if (s.shape == SpatialShape::Random) {
    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> nd;
    for (Index i = 0; i < dim; ++i) v(i) = nd(rng);
  } else if (s.shape == SpatialShape::Monomial) {
    require(s.axis >= -1 && s.axis <= 2, ErrorKind::Argument, "monomial source: axis must be -1..2");
    for (int e : s.exponents) require(e >= 0, ErrorKind::Argument, "monomial source: exponents must be >= 0");
    for (Index i = 0; i < dim; ++i) {
      if (s.axis >= 0 && axis_of(i) != s.axis) continue;
      const std::array<double, 3> x = center(i);
      v(i) = std::pow(x[0], s.exponents[0]) * std::pow(x[1], s.exponents[1]) * std::pow(x[2], s.exponents[2]);
    }
  }
  return v;
}

Vector unit(Vector v) {
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

}  // namespace

Vector edge_field(const EddyProblem& p, const SpatialProfile& s, bool project) {
  const StaggeredMesh& m = p.mesh;
  Vector v = raw_field(
      p.edge_dim(), s, [&](Index i) { return m.edge_midpoint(i); }, [&](Index i) { return m.edges[i].axis; });
  if (project) {
    v = p.project_h0(v);
    // Cancellation residue below the admission tolerance counts as zero.
    if (v.norm() <= 1e-12) v.setZero();
  }
  return unit(std::move(v));
}

Vector face_field(const EddyProblem& p, const SpatialProfile& s) {
  const StaggeredMesh& m = p.mesh;
  return unit(raw_field(
      p.face_dim(), s, [&](Index i) { return m.face_center(i); }, [&](Index i) { return m.faces[i].axis; }));
}

TimeSignal separable(const TimeGrid& grid, const Vector& space, const TimeProfile& g) {
  Matrix v(space.size(), grid.nodes());
  for (int n = 0; n < grid.nodes(); ++n) v.col(n) = g.value(grid.time(n)) * space;
  return TimeSignal(grid, std::move(v));
}

int first_nonzero_node(const TimeSignal& f) {
  for (int n = 0; n < f.nodes(); ++n)
    if (!f.at(n).isZero(0.0)) return n;
  return f.nodes();
}

}  // namespace degen
