#pragma once

// Discrete calculus on the exponentially weighted time axis.
//
// A signal lives on the uniform grid t_n = n*dt, n = 0..N, with implicit zero
// history for t < 0. The causal derivative is the backward difference with
// u_{-1} = 0 and its exact inverse is the causal cumulative sum, so every
// operator here maps signals supported in [t0, T] to signals supported in
// [t0, T].

#include <cstddef>

#include "degen/linalg.hpp"

namespace degen {

class TimeGrid {
public:
  /// Throws Argument unless horizon > 0, steps >= 1, rho > 0 and dt <= 1/rho.
  TimeGrid(double horizon, int steps, double rho);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  int nodes() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return horizon_ / steps_; }
  double rho() const noexcept { return rho_; }
  double time(int n) const noexcept { return n * dt(); }
  /// exp(-2 rho t_n)
  double weight(int n) const noexcept;

  /// Largest node index n with t_n <= a (a clamped to [0, T]).
  int last_node_at_or_before(double a) const;

  bool operator==(const TimeGrid& other) const noexcept;
  bool operator!=(const TimeGrid& other) const noexcept { return !(*this == other); }

private:
  double horizon_;
  int steps_;
  double rho_;
};

/// State vectors of a fixed dimension, one column per grid node.
class TimeSignal {
public:
  /// Zero signal.
  TimeSignal(const TimeGrid& grid, Index dim);
  /// Throws Dimension if values has the wrong column count and Argument if
  /// any entry is not finite.
  TimeSignal(const TimeGrid& grid, Matrix values);

  const TimeGrid& grid() const noexcept { return grid_; }
  Index dim() const noexcept { return values_.rows(); }
  int nodes() const noexcept { return grid_.nodes(); }

  const Matrix& values() const noexcept { return values_; }
  Matrix& values() noexcept { return values_; }
  auto at(int n) const { return values_.col(n); }
  auto at(int n) { return values_.col(n); }

  bool is_zero() const { return values_.isZero(0.0); }

private:
  TimeGrid grid_;
  Matrix values_;
};

/// Time-shifted weighted inner product dt * sum_n <(d0^k f)_n, (d0^k g)_n> e^{-2 rho t_n}.
/// Negative k applies d0_inverse |k| times. Supported k: -3..1.
double weighted_inner(const TimeSignal& f, const TimeSignal& g, int k = 0);
double weighted_norm(const TimeSignal& f, int k = 0);

TimeSignal d0(const TimeSignal& f);
TimeSignal d0_inverse(const TimeSignal& f);
/// Applies d0 (k > 0) or d0_inverse (k < 0) |k| times.
TimeSignal d0_power(const TimeSignal& f, int k);

/// Zeroes every node with t_n > a. Requires 0 <= a <= T.
TimeSignal truncate(const TimeSignal& f, double a);

/// Applies a fixed spatial operator node by node: (A f)_n = A f_n.
TimeSignal apply(const Matrix& op, const TimeSignal& f);
TimeSignal apply(const SparseMatrix& op, const TimeSignal& f);

TimeSignal operator+(const TimeSignal& a, const TimeSignal& b);
TimeSignal operator-(const TimeSignal& a, const TimeSignal& b);
TimeSignal operator*(double s, const TimeSignal& a);

/// Max over nodes of the Euclidean norm of the state vector.
double max_state_norm(const TimeSignal& f);

}  // namespace degen
