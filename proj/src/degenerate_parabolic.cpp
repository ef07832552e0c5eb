#include "degen/degenerate_parabolic.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "degen/error.hpp"

namespace degen {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double rel(double num, double scale) { return scale > 0.0 ? num / scale : num; }

int node_of(const TimeGrid& grid, double t, const char* what) {
  const double x = t / grid.dt();
  const double n = std::round(x);
  require(std::abs(x - n) <= 1e-9 * std::max(1.0, x) && n >= 0 && n <= grid.steps(), ErrorKind::Argument,
          std::string("energy balance: ") + what + " is not a grid node");
  return static_cast<int>(n);
}

}  // namespace

TimeSignal DegenerateProblem::lift(const TimeSignal& coords) const {
  require(coords.dim() == reduced_dim(), ErrorKind::Dimension, "lift: signal is not in H0 coordinates");
  return apply(h0.basis(), coords);
}

double DegenerateProblem::h0_defect(const TimeSignal& ambient) const {
  require(ambient.dim() == ambient_dim(), ErrorKind::Dimension, "H0 defect: ambient dimension mismatch");
  const Matrix& b = h0.basis();
  const Matrix residual = ambient.values() - b * (b.transpose() * ambient.values());
  double worst = 0.0;
  double scale = 0.0;
  for (int n = 0; n < ambient.nodes(); ++n) {
    worst = std::max(worst, residual.col(n).norm());
    scale = std::max(scale, ambient.at(n).norm());
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

TimeSignal DegenerateProblem::reduce(const TimeSignal& ambient, double admit_tol) const {
  const double defect = h0_defect(ambient);
  if (defect > admit_tol) {
    std::ostringstream msg;
    msg << "source is not H0-valued: relative projection defect " << defect << " > " << admit_tol;
    fail(ErrorKind::Argument, msg.str());
  }
  return apply(Matrix(h0.basis().transpose()), ambient);
}

EvoProblem DegenerateProblem::evo_problem(double rho) const {
  EvoProblem p;
  p.m0 = eta0.sparseView();
  p.m1 = SparseMatrix(reduced_dim(), reduced_dim());
  p.a = a0.sparseView();
  p.rho = rho;
  certify_positivity(p);
  return p;
}

DegenerateProblem build_degenerate(const Matrix& eta, const Matrix& c, double tol) {
  require(eta.rows() == eta.cols(), ErrorKind::Dimension, "degenerate problem: eta not square");
  require(c.cols() == eta.cols(), ErrorKind::Dimension, "degenerate problem: C and eta act on different spaces");
  require_symmetric_psd(eta, tol, "eta");

  DegenerateProblem p;
  p.eta = eta;
  p.c = c;
  p.tol = tol;
  const Index d = eta.cols();
  const Subspace n_eta = kernel(eta, tol);
  const Subspace n_c = c.rows() > 0 ? kernel(c, tol) : Subspace::full(d);
  p.h0 = complement(intersect(n_eta, n_c));
  require(p.h0.dim() > 0, ErrorKind::Model, "degenerate problem: reduced state space H0 is trivial");

  const Matrix& b = p.h0.basis();
  p.eta0 = symmetrized(b.transpose() * eta * b);
  p.c0 = c * b;
  p.a0 = symmetrized(p.c0.transpose() * p.c0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(p.eta0 + p.a0, Eigen::EigenvaluesOnly);
  p.c1 = es.eigenvalues()(0);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (!(p.c1 > tol * scale)) {
    std::ostringstream msg;
    msg << "degenerate beyond H0 reduction: lambda_min(eta0 + C0^T C0) = " << p.c1
        << ", coercivity on H0 fails";
    fail(ErrorKind::Certification, msg.str());
  }

  p.decomposition = three_way_decompose(c, eta, tol);
  const Subspace& r_cstar = p.decomposition.parts[0];
  if (r_cstar.dim() == 0) {
    p.eta_preserves_range_cstar = true;
  } else {
    const Matrix image = eta * r_cstar.basis();
    const Matrix off = image - r_cstar.basis() * (r_cstar.basis().transpose() * image);
    p.eta_preserves_range_cstar = off.cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, eta.cwiseAbs().maxCoeff());
  }
  return p;
}

SpacetimeReport check_spacetime_equivalence(const DegenerateProblem& p, const TimeGrid& grid, int trials,
                                            unsigned seed) {
  SpacetimeReport r;
  r.trials = trials;
  const double rho = grid.rho();
  r.c0_temporal = std::min(rho, 1.0) * p.c1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Index dim = p.reduced_dim();
  auto random_vector = [&] {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = normal(rng);
    return v;
  };
  const Matrix form = p.eta0 + p.a0;
  r.worst_spatial_ratio = std::numeric_limits<double>::infinity();
  r.worst_temporal_ratio = std::numeric_limits<double>::infinity();
  const int ramp_last = grid.last_node_at_or_before(1.0);
  for (int t = 0; t < trials; ++t) {
    const Vector x = random_vector();
    r.worst_spatial_ratio = std::min(r.worst_spatial_ratio, x.dot(form * x) / (p.c1 * x.squaredNorm()));

    double lhs = 0.0;
    double norm2 = 0.0;
    for (int n = 0; n < grid.nodes(); ++n) {
      const Vector u = random_vector();
      const double w = grid.weight(n);
      lhs += w * (rho * u.dot(p.eta0 * u) + (p.c0 * u).squaredNorm());
      norm2 += w * u.squaredNorm();
    }
    r.worst_temporal_ratio = std::min(r.worst_temporal_ratio, lhs / (r.c0_temporal * norm2));

    // U(t) = e^{rho t} x on [0, 1]: the weight cancels node by node.
    double ramp_lhs = 0.0;
    double ramp_norm2 = 0.0;
    for (int n = 0; n <= ramp_last; ++n) {
      const Vector u = std::exp(rho * grid.time(n)) * x;
      const double w = grid.weight(n);
      ramp_lhs += w * (rho * u.dot(p.eta0 * u) + (p.c0 * u).squaredNorm());
      ramp_norm2 += w * u.squaredNorm();
    }
    const double spatial = (rho * x.dot(p.eta0 * x) + (p.c0 * x).squaredNorm()) / x.squaredNorm();
    r.ramp_deviation = std::max(r.ramp_deviation, std::abs((ramp_lhs / ramp_norm2) / spatial - 1.0));
  }
  if (trials == 0) {
    r.worst_spatial_ratio = r.worst_temporal_ratio = 1.0;
  }
  r.pass = r.worst_spatial_ratio >= 1.0 - 1e-10 && r.worst_temporal_ratio >= 1.0 - 10.0 * grid.dt() &&
           r.ramp_deviation <= 1e-10;
  return r;
}

TimeSignal solve_reduced(const DegenerateProblem& p, const TimeSignal& f_coords) {
  require(f_coords.dim() == p.reduced_dim(), ErrorKind::Dimension, "solve_reduced: source not in H0 coordinates");
  const EvoProblem evo = p.evo_problem(f_coords.grid().rho());
  return solve(evo, f_coords);
}

RecoveredPair recover_pair(const DegenerateProblem& p, const TimeSignal& u_coords, const TimeSignal& f_coords) {
  const TimeSignal u = p.lift(u_coords);
  const TimeSignal f = p.lift(f_coords);
  const TimeSignal cu = apply(p.c, u);
  TimeSignal v = -1.0 * apply(p.c, d0_inverse(u));
  const TimeSignal dv = d0(v);
  const TimeSignal eta_u = apply(p.eta, u);
  const TimeSignal ct_v = apply(Matrix(p.c.transpose()), v);
  const TimeSignal f_int = d0_inverse(f);

  RecoveredPair out{std::move(v), 0.0, 0.0};
  out.residual_first = rel(weighted_norm(dv + cu), weighted_norm(dv) + weighted_norm(cu));
  out.residual_second = rel(weighted_norm(eta_u - ct_v - f_int),
                            weighted_norm(eta_u) + weighted_norm(ct_v) + weighted_norm(f_int));
  return out;
}

EnergyBalance energy_balance(const DegenerateProblem& p, const TimeSignal& u_coords, const TimeSignal& f_coords,
                             double t0, double t1) {
  const TimeGrid& grid = u_coords.grid();
  require(f_coords.grid() == grid, ErrorKind::Dimension, "energy balance: U and F on different grids");
  const int n0 = node_of(grid, t0, "t0");
  const int n1 = node_of(grid, t1, "t1");
  require(n0 < n1, ErrorKind::Argument, "energy balance: need t0 < t1");
  for (int n = n0 + 1; n <= n1; ++n)
    require(f_coords.at(n).isZero(0.0), ErrorKind::Argument,
            "energy balance precondition: F must vanish on the window (t0, t1]");

  auto energy = [&](int n) { return 0.5 * u_coords.at(n).dot(p.eta0 * u_coords.at(n)); };
  EnergyBalance e;
  e.rhs = energy(n0);
  double dissipation = 0.0;
  for (int n = n0 + 1; n <= n1; ++n) {
    dissipation += (p.c0 * u_coords.at(n)).squaredNorm();
    const Vector du = u_coords.at(n) - u_coords.at(n - 1);
    e.defect += 0.5 * du.dot(p.eta0 * du);
  }
  e.lhs = energy(n1) + grid.dt() * dissipation;
  e.identity_residual = std::abs(e.lhs + e.defect - e.rhs);
  return e;
}

double energy_step_identity_residual(const DegenerateProblem& p, const TimeSignal& u_coords,
                                     const TimeSignal& f_coords) {
  const TimeGrid& grid = u_coords.grid();
  const double dt = grid.dt();
  double worst = 0.0;
  Vector prev = Vector::Zero(u_coords.dim());
  for (int n = 0; n < grid.nodes(); ++n) {
    const Vector u = u_coords.at(n);
    const Vector du = u - prev;
    const double terms[] = {0.5 * u.dot(p.eta0 * u), 0.5 * prev.dot(p.eta0 * prev), 0.5 * du.dot(p.eta0 * du),
                            dt * (p.c0 * u).squaredNorm(), dt * f_coords.at(n).dot(u)};
    const double res = terms[0] - terms[1] + terms[2] + terms[3] - terms[4];
    double scale = 1.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    worst = std::max(worst, std::abs(res) / scale);
    prev = u;
  }
  return worst;
}

RegularityCheck regularity_bound_check(const DegenerateProblem& p, const TimeSignal& f_coords,
                                       const TimeSignal& u_coords) {
  const TimeGrid& grid = u_coords.grid();
  RegularityCheck r;
  r.c1_tilde = 0.5 * std::min(1.0, p.c1);
  const Matrix graph = Matrix::Identity(p.reduced_dim(), p.reduced_dim()) + p.a0;
  const Eigen::LLT<Matrix> llt(graph);
  double lhs2 = 0.0;
  double dual2 = 0.0;
  for (int n = 0; n < grid.nodes(); ++n) {
    const double w = grid.weight(n);
    const Vector u = u_coords.at(n);
    lhs2 += w * (u.squaredNorm() + (p.c0 * u).squaredNorm());
    const Vector f = f_coords.at(n);
    dual2 += w * f.dot(llt.solve(f));
  }
  r.lhs = std::sqrt(grid.dt() * lhs2);
  r.rhs = std::sqrt(grid.dt() * std::max(0.0, dual2)) / r.c1_tilde;
  r.pass = r.lhs <= r.rhs * (1.0 + 10.0 * grid.dt() * grid.rho());
  return r;
}

}  // namespace degen
