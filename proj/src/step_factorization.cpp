#include "step_factorization.hpp"

#include <random>

#include "degen/error.hpp"

namespace degen::detail {

StepFactorization::StepFactorization(const SparseMatrix& m) : dim_(m.rows()), matrix_(m) {
  require(m.rows() == m.cols(), ErrorKind::Dimension, "step matrix not square");
  matrix_.makeCompressed();
  const double density = dim_ > 0 ? static_cast<double>(matrix_.nonZeros()) / (double(dim_) * double(dim_)) : 1.0;
  if (dim_ <= 600 || density > 0.05) {
    dense_ = std::make_unique<Eigen::PartialPivLU<Matrix>>(Matrix(matrix_));
    const double rcond = dense_->rcond();
    require(rcond > 1e-15, ErrorKind::Internal,
            "per-step matrix is numerically singular (rcond " + std::to_string(rcond) + ")");
  } else {
    sparse_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    sparse_->analyzePattern(matrix_);
    sparse_->factorize(matrix_);
    require(sparse_->info() == Eigen::Success, ErrorKind::Internal,
            "per-step matrix is singular: " + sparse_->lastErrorMessage());
  }
}

Vector StepFactorization::solve(const Vector& rhs) const {
  require(rhs.size() == dim_, ErrorKind::Dimension, "step solve: right-hand side size mismatch");
  if (dense_) return dense_->solve(rhs);
  return sparse_->solve(rhs);
}

double StepFactorization::residual_probe(unsigned seed, int trials) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector b(dim_);
    for (Index i = 0; i < dim_; ++i) b(i) = normal(rng);
    const Vector x = solve(b);
    worst = std::max(worst, (matrix_ * x - b).norm() / std::max(b.norm(), 1e-300));
  }
  return worst;
}

}  // namespace degen::detail
