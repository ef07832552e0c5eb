#pragma once

#include <memory>

#include <Eigen/SparseLU>

#include "degen/linalg.hpp"

namespace degen::detail {

/// LU of a constant per-step matrix, computed once and reused for every
/// time step. Small or dense matrices use partial-pivot dense LU, large
/// sparse ones SparseLU.
class StepFactorization {
public:
  explicit StepFactorization(const SparseMatrix& m);

  Index dim() const noexcept { return dim_; }
  Vector solve(const Vector& rhs) const;
  /// max |M x - b| / max(|b|, 1e-300) over a few random right-hand sides.
  double residual_probe(unsigned seed, int trials = 3) const;

private:
  Index dim_;
  SparseMatrix matrix_;
  std::unique_ptr<Eigen::PartialPivLU<Matrix>> dense_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> sparse_;
};

}  // namespace degen::detail
