#pragma once

// Evo-systems (d0 M0 + M1 + A) U = F on a weighted time grid.

#include <memory>
#include <optional>
#include <string>

#include "degen/linalg.hpp"
#include "degen/weighted_time.hpp"

namespace degen {

namespace detail {
class StepFactorization;
}

struct EvoProblem {
  SparseMatrix m0;  // symmetric PSD
  SparseMatrix m1;
  SparseMatrix a;
  double rho = 1.0;
  std::optional<double> c0;  // set by certify_positivity

  Index dim() const noexcept { return m0.rows(); }
  /// Throws Dimension on shape mismatch, Model if M0 is not symmetric PSD
  /// (defect and negative part relative to 1e-12 |M0|).
  void validate() const;
};

struct PositivityCertificate {
  double c0 = 0.0;
  /// The adjoint positivity condition uses sym(X^T) = sym(X), so in finite
  /// dimensions it holds with the same constant; recorded rather than recomputed.
  bool adjoint_condition_equivalent = true;
  std::string note;
};

/// c0 = lambda_min(sym(rho M0 + M1 + A)); stores it in p.c0. Throws
/// Certification if c0 <= 0.
PositivityCertificate certify_positivity(EvoProblem& p);

/// Backward-Euler solver with a factorization of M0/dt + M1 + A shared by
/// all steps. Immutable after construction; solve() may run concurrently.
class EvoSolver {
public:
  /// Requires a certified problem and grid.dt() <= 1/p.rho.
  EvoSolver(const EvoProblem& p, const TimeGrid& grid);
  ~EvoSolver();
  EvoSolver(EvoSolver&&) noexcept;
  EvoSolver& operator=(EvoSolver&&) noexcept;

  const TimeGrid& grid() const noexcept { return grid_; }
  const EvoProblem& problem() const noexcept { return problem_; }

  /// (M0/dt + M1 + A) U_n = F_n + (M0/dt) U_{n-1}, U_{-1} = 0.
  TimeSignal solve(const TimeSignal& f) const;

private:
  EvoProblem problem_;
  TimeGrid grid_;
  SparseMatrix m0_over_dt_;
  std::unique_ptr<detail::StepFactorization> lu_;
};

TimeSignal solve(const EvoProblem& p, const TimeSignal& f);

struct CausalBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// |trunc(U,a)|_{rho,0,0} <= (1/c0)(1 + 10 dt rho) |trunc(F,a)|_{rho,0,0}.
CausalBound causal_bound_check(const EvoProblem& p, const TimeSignal& f, const TimeSignal& u, double a);
CausalBound causal_bound_check(const EvoProblem& p, const TimeSignal& f, double a);

}  // namespace degen
