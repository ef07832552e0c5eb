#include "degen/evo_core.hpp"

#include <cmath>
#include <sstream>

#include "degen/error.hpp"
#include "degen/subspaces.hpp"
#include "step_factorization.hpp"

namespace degen {

void EvoProblem::validate() const {
  const Index d = m0.rows();
  require(m0.cols() == d && m1.rows() == d && m1.cols() == d && a.rows() == d && a.cols() == d,
          ErrorKind::Dimension, "evo problem: M0, M1, A must be square of equal size");
  require(d > 0, ErrorKind::Dimension, "evo problem: empty state space");
  require(std::isfinite(rho) && rho > 0.0, ErrorKind::Argument, "evo problem: rho must be positive");
  const Matrix dense(m0);
  const SymmetryCheck s = check_symmetric(dense);
  require(s.symmetry_defect <= 1e-12, ErrorKind::Model, "evo problem: M0 is not symmetric");
  require(s.min_eigenvalue >= -1e-12 * std::max(s.norm, 1e-300), ErrorKind::Model,
          "evo problem: M0 is not positive semidefinite");
}

PositivityCertificate certify_positivity(EvoProblem& p) {
  p.validate();
  const Matrix x = Matrix(p.rho * p.m0 + p.m1 + p.a);
  const Matrix sym = 0.5 * (x + x.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double c0 = es.eigenvalues()(0);
  if (!(c0 > 0.0)) {
    std::ostringstream msg;
    msg << "not uniformly positive: lambda_min(sym(rho M0 + M1 + A)) = " << c0
        << " <= 0, well-posedness hypotheses fail";
    fail(ErrorKind::Certification, msg.str());
  }
  p.c0 = c0;
  PositivityCertificate cert;
  cert.c0 = c0;
  cert.note = "adjoint condition follows from sym(X^T) = sym(X); same constant";
  return cert;
}

EvoSolver::EvoSolver(const EvoProblem& p, const TimeGrid& grid) : problem_(p), grid_(grid) {
  require(problem_.c0.has_value(), ErrorKind::Argument, "evo solve: problem has not been certified");
  require(grid.rho() == problem_.rho, ErrorKind::Argument, "evo solve: grid rho differs from problem rho");
  require(grid.dt() <= 1.0 / problem_.rho * (1.0 + 1e-12), ErrorKind::Argument, "evo solve: dt exceeds 1/rho");
  m0_over_dt_ = problem_.m0 / grid.dt();
  SparseMatrix step = m0_over_dt_ + problem_.m1 + problem_.a;
  lu_ = std::make_unique<detail::StepFactorization>(step);
}

EvoSolver::~EvoSolver() = default;
EvoSolver::EvoSolver(EvoSolver&&) noexcept = default;
EvoSolver& EvoSolver::operator=(EvoSolver&&) noexcept = default;

TimeSignal EvoSolver::solve(const TimeSignal& f) const {
  require(f.grid() == grid_, ErrorKind::Dimension, "evo solve: source on a different grid");
  require(f.dim() == problem_.dim(), ErrorKind::Dimension, "evo solve: source dimension mismatch");
  TimeSignal u(grid_, problem_.dim());
  Vector prev = Vector::Zero(problem_.dim());
  for (int n = 0; n < grid_.nodes(); ++n) {
    const Vector rhs = f.at(n) + m0_over_dt_ * prev;
    // Zero data stays exactly zero, which makes causality bitwise.
    Vector next = rhs.isZero(0.0) ? Vector::Zero(rhs.size()) : lu_->solve(rhs);
    u.at(n) = next;
    prev = std::move(next);
  }
  return u;
}

TimeSignal solve(const EvoProblem& p, const TimeSignal& f) { return EvoSolver(p, f.grid()).solve(f); }

CausalBound causal_bound_check(const EvoProblem& p, const TimeSignal& f, const TimeSignal& u, double a) {
  require(p.c0.has_value(), ErrorKind::Argument, "causal bound: problem has not been certified");
  CausalBound out;
  const TimeGrid& grid = f.grid();
  out.slack = 10.0 * grid.dt() * grid.rho();
  out.lhs = weighted_norm(truncate(u, a));
  out.rhs = weighted_norm(truncate(f, a)) / *p.c0;
  out.pass = out.lhs <= out.rhs * (1.0 + out.slack);
  return out;
}

CausalBound causal_bound_check(const EvoProblem& p, const TimeSignal& f, double a) {
  return causal_bound_check(p, f, solve(p, f), a);
}

}  // namespace degen
