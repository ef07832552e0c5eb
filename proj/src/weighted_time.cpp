#include "degen/weighted_time.hpp"

#include <cmath>
#include <sstream>

#include "degen/error.hpp"

namespace degen {

TimeGrid::TimeGrid(double horizon, int steps, double rho)
    : horizon_(horizon), steps_(steps), rho_(rho) {
  require(std::isfinite(horizon) && horizon > 0.0, ErrorKind::Argument,
          "time grid: horizon must be positive");
  require(steps >= 1, ErrorKind::Argument, "time grid: steps must be >= 1");
  require(std::isfinite(rho) && rho > 0.0, ErrorKind::Argument,
          "time grid: rho must be positive");
  if (dt() * rho > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "time grid: dt = " << dt() << " exceeds 1/rho = " << 1.0 / rho
        << " (backward difference loses weighted accretivity)";
    fail(ErrorKind::Argument, msg.str());
  }
}

double TimeGrid::weight(int n) const noexcept { return std::exp(-2.0 * rho_ * time(n)); }

int TimeGrid::last_node_at_or_before(double a) const {
  if (a <= 0.0) return 0;
  if (a >= horizon_) return steps_;
  // Half-ulp style slack so that a = t_n selects node n.
  const double x = a / dt();
  const auto n = static_cast<int>(std::floor(x + 1e-9));
  return std::min(n, steps_);
}

bool TimeGrid::operator==(const TimeGrid& other) const noexcept {
  return horizon_ == other.horizon_ && steps_ == other.steps_ && rho_ == other.rho_;
}

TimeSignal::TimeSignal(const TimeGrid& grid, Index dim)
    : grid_(grid), values_(Matrix::Zero(dim, grid.nodes())) {}

TimeSignal::TimeSignal(const TimeGrid& grid, Matrix values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.cols() == grid_.nodes(), ErrorKind::Dimension,
          "time signal: column count must equal the number of grid nodes");
  require(values_.allFinite(), ErrorKind::Argument, "time signal: non-finite value");
}

namespace {

void require_compatible(const TimeSignal& f, const TimeSignal& g) {
  require(f.grid() == g.grid(), ErrorKind::Dimension, "signals live on different time grids");
  require(f.dim() == g.dim(), ErrorKind::Dimension, "signals have different state dimensions");
}

}  // namespace

TimeSignal d0(const TimeSignal& f) {
  const double inv_dt = 1.0 / f.grid().dt();
  Matrix out(f.dim(), f.nodes());
  out.col(0) = f.at(0) * inv_dt;
  for (int n = 1; n < f.nodes(); ++n) out.col(n) = (f.at(n) - f.at(n - 1)) * inv_dt;
  return TimeSignal(f.grid(), std::move(out));
}

TimeSignal d0_inverse(const TimeSignal& f) {
  const double dt = f.grid().dt();
  Matrix out(f.dim(), f.nodes());
  out.col(0) = dt * f.at(0);
  for (int n = 1; n < f.nodes(); ++n) out.col(n) = out.col(n - 1) + dt * f.at(n);
  return TimeSignal(f.grid(), std::move(out));
}

TimeSignal d0_power(const TimeSignal& f, int k) {
  TimeSignal out = f;
  for (int i = 0; i < k; ++i) out = d0(out);
  for (int i = 0; i < -k; ++i) out = d0_inverse(out);
  return out;
}

double weighted_inner(const TimeSignal& f, const TimeSignal& g, int k) {
  require_compatible(f, g);
  require(k >= -3 && k <= 1, ErrorKind::Argument,
          "weighted_inner: supported shifts are k = -3..1, got " + std::to_string(k));
  const TimeSignal fk = d0_power(f, k);
  const TimeSignal gk = d0_power(g, k);
  const TimeGrid& grid = f.grid();
  double acc = 0.0;
  for (int n = 0; n < grid.nodes(); ++n) acc += grid.weight(n) * fk.at(n).dot(gk.at(n));
  return grid.dt() * acc;
}

double weighted_norm(const TimeSignal& f, int k) {
  return std::sqrt(std::max(0.0, weighted_inner(f, f, k)));
}

TimeSignal truncate(const TimeSignal& f, double a) {
  const TimeGrid& grid = f.grid();
  require(a >= -1e-12 && a <= grid.horizon() * (1.0 + 1e-12), ErrorKind::Argument,
          "truncate: cut point outside [0, T]");
  const int last = grid.last_node_at_or_before(a);
  TimeSignal out = f;
  if (last + 1 < grid.nodes())
    out.values().rightCols(grid.nodes() - last - 1).setZero();
  return out;
}

TimeSignal apply(const Matrix& op, const TimeSignal& f) {
  require(op.cols() == f.dim(), ErrorKind::Dimension, "apply: operator/signal dimension mismatch");
  return TimeSignal(f.grid(), op * f.values());
}

TimeSignal apply(const SparseMatrix& op, const TimeSignal& f) {
  require(op.cols() == f.dim(), ErrorKind::Dimension, "apply: operator/signal dimension mismatch");
  return TimeSignal(f.grid(), Matrix(op * f.values()));
}

TimeSignal operator+(const TimeSignal& a, const TimeSignal& b) {
  require_compatible(a, b);
  return TimeSignal(a.grid(), a.values() + b.values());
}

TimeSignal operator-(const TimeSignal& a, const TimeSignal& b) {
  require_compatible(a, b);
  return TimeSignal(a.grid(), a.values() - b.values());
}

TimeSignal operator*(double s, const TimeSignal& a) { return TimeSignal(a.grid(), s * a.values()); }

double max_state_norm(const TimeSignal& f) {
  double m = 0.0;
  for (int n = 0; n < f.nodes(); ++n) m = std::max(m, f.at(n).norm());
  return m;
}

}  // namespace degen
