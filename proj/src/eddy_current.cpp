#include "degen/eddy_current.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "degen/error.hpp"
#include "step_factorization.hpp"

namespace degen {

namespace {

void require_spd(const Matrix& m, const char* name) {
  const SymmetryCheck s = check_symmetric(m);
  require(s.symmetry_defect <= 1e-12, ErrorKind::Model, std::string(name) + " is not symmetric");
  require(s.min_eigenvalue > 0.0, ErrorKind::Model, std::string(name) + " is not positive definite");
}

double rel(double num, double scale) { return scale > 0.0 ? num / scale : num; }

Vector random_in(const Subspace& s, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector x(s.dim());
  for (Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  Vector v = s.basis() * x;
  const double nv = v.norm();
  return nv > 0.0 ? Vector(v / nv) : v;
}

Vector restrict_to(const Vector& x, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = x(idx[i]);
  return out;
}

HypothesisCheck subspace_check(std::string id, const Subspace& a, const Subspace& b, std::string detail) {
  HypothesisCheck c{std::move(id), false, std::move(detail), {}};
  const double dist = subspace_distance(a, b);
  c.values = {{"dim_a", double(a.dim())}, {"dim_b", double(b.dim())}, {"max_principal_angle", dist}};
  c.pass = dist <= 1e-10;
  return c;
}

}  // namespace

Vector EddyProblem::apply_mu_inverse(const Vector& x) const { return mu_llt.solve(x); }

TimeSignal EddyProblem::apply_mu_inverse(const TimeSignal& x) const {
  require(x.dim() == face_dim(), ErrorKind::Dimension, "mu inverse: face signal expected");
  return TimeSignal(x.grid(), mu_llt.solve(x.values()));
}

Vector EddyProblem::project_h0(const Vector& x) const { return project(degenerate.h0, x); }

bool EddyProblem::decomposition_pass() const {
  for (const auto& c : decomposition_checks)
    if (!c.pass) return false;
  return true;
}

Matrix scalar_sigma_tilde(const StaggeredMesh& mesh, double sigma) {
  require(sigma > 0.0, ErrorKind::Argument, "sigma must be positive");
  const auto m = static_cast<Index>(mesh.conducting_edges().size());
  return sigma * Matrix::Identity(m, m);
}

Matrix scalar_mu(const StaggeredMesh& mesh, double mu) {
  require(mu > 0.0, ErrorKind::Argument, "mu must be positive");
  return mu * Matrix::Identity(mesh.face_count(), mesh.face_count());
}

EddyProblem assemble_eddy(const StaggeredMesh& mesh, const Matrix& sigma_tilde, const Matrix& mu, double tol) {
  EddyProblem p;
  p.mesh = mesh;
  p.ops = build_operators(mesh);
  p.hypotheses = check_kernel_localization(p.mesh, p.ops);
  for (const auto& c : p.hypotheses.checks)
    if (!c.pass) fail(ErrorKind::Certification, "hypothesis " + c.id + " fails on this mesh: " + c.detail);

  p.conducting = mesh.conducting_edges();
  const auto nc = static_cast<Index>(p.conducting.size());
  require(sigma_tilde.rows() == nc && sigma_tilde.cols() == nc, ErrorKind::Dimension,
          "sigma_tilde must be square on the conducting edges");
  require(mu.rows() == p.face_dim() && mu.cols() == p.face_dim(), ErrorKind::Dimension,
          "mu must be square on the faces");
  if (nc > 0) require_spd(sigma_tilde, "sigma_tilde");
  require_spd(mu, "mu");
  p.sigma_tilde = sigma_tilde;
  p.mu = mu;
  p.mu_is_identity = mu.isIdentity(0.0);
  p.mu_llt.compute(mu);
  require(p.mu_llt.info() == Eigen::Success, ErrorKind::Model, "mu: Cholesky factorization failed");

  const Index d = p.edge_dim();
  p.sigma = Matrix::Zero(d, d);
  for (Index a = 0; a < nc; ++a)
    for (Index b = 0; b < nc; ++b) p.sigma(p.conducting[a], p.conducting[b]) = sigma_tilde(a, b);
  p.c = p.mu_llt.matrixL().solve(Matrix(p.ops.curl0));

  p.degenerate = build_degenerate(p.sigma, p.c, tol);
  p.diamond = build_diamond_grad(p.mesh, p.ops);

  const DecompositionReport& dec = p.degenerate.decomposition;
  {
    HypothesisCheck c{"decomposition_orthogonal", false, "H0 = R(C*) + H1 + H2, pairwise orthogonal", {}};
    c.values = {{"dim_h0", double(p.degenerate.reduced_dim())},
                {"dims_sum", double(dec.dims_sum())},
                {"max_overlap", dec.max_overlap()},
                {"reconstruction_defect", dec.reconstruction_defect}};
    c.pass = dec.dims_sum() == p.degenerate.reduced_dim() && dec.max_overlap() <= 1e-10 &&
             dec.reconstruction_defect <= 1e-10;
    p.decomposition_checks.push_back(std::move(c));
  }
  p.decomposition_checks.push_back(subspace_check("range_is_curl_range", dec.parts[0],
                                                  range(Matrix(p.ops.curl0.transpose()), tol),
                                                  "R(C*) equals the range of the weak curl"));
  {
    std::vector<Triplet> t;
    Index col = 0;
    for (std::size_t i = 0; i < mesh.node_conductor_interior.size(); ++i)
      if (mesh.node_conductor_interior[i]) t.emplace_back(static_cast<Index>(i), col++, 1.0);
    SparseMatrix sel(mesh.node_count(), col);
    sel.setFromTriplets(t.begin(), t.end());
    const Subspace grads = col > 0 ? Subspace::span(Matrix(p.ops.grad0 * sel), tol) : Subspace(d);
    p.decomposition_checks.push_back(subspace_check("conductor_kernel_is_gradients", dec.parts[1], grads,
                                                    "H1 = N(curl0) on conductor fields = gradients of "
                                                    "nodal functions vanishing on the conductor surface"));
  }
  {
    Index closure = 0;
    Index inner = 0;
    for (std::size_t i = 0; i < mesh.node_component.size(); ++i) {
      closure += mesh.node_component[i] >= 0;
      inner += mesh.node_conductor_interior[i] != 0;
    }
    const Index expected = closure - inner - mesh.components;
    HypothesisCheck c{"remainder_dimension", false, "dim H2 = surface nodes - components", {}};
    c.values = {{"dim_h2", double(dec.parts[2].dim())}, {"expected", double(expected)}};
    c.pass = dec.parts[2].dim() == expected;
    p.decomposition_checks.push_back(std::move(c));
  }
  p.decomposition_checks.push_back(subspace_check("complement_is_diamond_range", complement(p.degenerate.h0),
                                                  Subspace::span(Matrix(p.diamond.g), tol),
                                                  "orthogonal complement of H0 = R(grad_diamond)"));
  return p;
}

EddyConstants eddy_constants(const EddyProblem& p) {
  EddyConstants k;
  const double tol = p.degenerate.tol;
  {
    const Vector s = singular_values(Matrix(p.ops.curl0));
    double smallest = 0.0;
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > tol * s(0)) smallest = s(i);
    require(smallest > 0.0, ErrorKind::Internal, "curl0 vanishes");
    k.k0 = 1.0 / smallest;
  }
  const Subspace& h2 = p.degenerate.decomposition.parts[2];
  k.h2_dim = h2.dim();
  if (h2.dim() > 0) {
    Matrix z(static_cast<Index>(p.conducting.size()), h2.dim());
    for (std::size_t i = 0; i < p.conducting.size(); ++i) z.row(static_cast<Index>(i)) = h2.basis().row(p.conducting[i]);
    Eigen::JacobiSVD<Matrix> svd(z);
    const Vector& s = svd.singularValues();
    const double smin = s.size() == h2.dim() ? s(s.size() - 1) : 0.0;
    if (!(smin > tol)) {
      std::ostringstream msg;
      msg << "hypothesis key_estimate fails: conductor restriction is not injective on H2 (sigma_min = " << smin
          << ")";
      fail(ErrorKind::Certification, msg.str());
    }
    k.k1 = 1.0 / smin;
  }
  const double k1s = k.k1 * k.k1;
  k.c_star = 1.0 / std::max({2.0, 2.0 * k1s, k.k0 * k.k0 * (1.0 + 2.0 * std::max(1.0, k1s))});
  if (p.sigma_tilde.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.sigma_tilde, Eigen::EigenvaluesOnly);
    k.sigma_tilde_min = es.eigenvalues()(0);
  }
  k.c0_formula = std::min(1.0, k.sigma_tilde_min) * std::min(1.0, k.c_star);

  const Matrix& b = p.degenerate.h0.basis();
  const Matrix cc = Matrix(p.ops.curl0) * b;
  const Matrix form = b.transpose() * p.sigma * b + cc.transpose() * cc;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (form + form.transpose()), Eigen::EigenvaluesOnly);
  k.c0_direct = es.eigenvalues()(0);
  k.pass = k.c0_direct >= k.c0_formula * (1.0 - 1e-10);
  return k;
}

ConstantSamples sample_constants(const EddyProblem& p, const EddyConstants& k, int trials, unsigned seed) {
  ConstantSamples s;
  s.trials = trials;
  std::mt19937_64 rng(seed);
  const DecompositionReport& dec = p.degenerate.decomposition;
  const Matrix curl(p.ops.curl0);
  s.worst_coercivity_ratio = std::numeric_limits<double>::infinity();
  auto chi = [&](const Vector& u) { return restrict_to(u, p.conducting); };
  for (int t = 0; t < trials; ++t) {
    if (dec.parts[0].dim() > 0) {
      const Vector u = random_in(dec.parts[0], rng);
      s.worst_k0_ratio = std::max(s.worst_k0_ratio, u.norm() / (k.k0 * (curl * u).norm()));
    }
    if (dec.parts[2].dim() > 0) {
      const Vector u = random_in(dec.parts[2], rng);
      s.worst_k1_ratio = std::max(s.worst_k1_ratio, u.norm() / (k.k1 * chi(u).norm()));
    }
    const Vector u = random_in(p.degenerate.h0, rng);
    const double form = u.dot(p.sigma * u) + (curl * u).squaredNorm();
    s.worst_coercivity_ratio = std::min(s.worst_coercivity_ratio, form / (k.c0_formula * u.squaredNorm()));

    const Vector u1 = random_in(dec.parts[1], rng);
    const Vector u2 = random_in(dec.parts[2], rng);
    const double split = chi(u1 + u2).squaredNorm() - u1.squaredNorm() - chi(u2).squaredNorm();
    s.worst_split_defect = std::max(s.worst_split_defect, std::abs(split));
  }
  if (trials == 0) s.worst_coercivity_ratio = 1.0;
  return s;
}

TimeSignal eddy_rhs(const EddyProblem& p, const TimeSignal& j, const TimeSignal& k) {
  require(j.dim() == p.edge_dim(), ErrorKind::Dimension, "eddy: J must be an edge signal");
  require(k.dim() == p.face_dim(), ErrorKind::Dimension, "eddy: K must be a face signal");
  require(j.grid() == k.grid(), ErrorKind::Dimension, "eddy: J and K on different grids");
  return apply(SparseMatrix(p.ops.curl0.transpose()), p.apply_mu_inverse(d0_inverse(k))) - j;
}

EddySolution eddy_solve(const EddyProblem& p, const TimeSignal& j, const TimeSignal& k) {
  TimeSignal f = eddy_rhs(p, j, k);
  const double defect = p.degenerate.h0_defect(j);
  if (defect > kSourceAdmitTol) {
    std::ostringstream msg;
    msg << "eddy: J is not H0-valued (relative defect " << defect << " > " << kSourceAdmitTol << ")";
    fail(ErrorKind::Argument, msg.str());
  }
  const Matrix bt = p.degenerate.h0.basis().transpose();
  const TimeSignal u = solve_reduced(p.degenerate, apply(bt, f));
  TimeSignal e = d0(p.degenerate.lift(u));
  const SparseMatrix& curl = p.ops.curl0;
  TimeSignal h = -1.0 * d0_inverse(p.apply_mu_inverse(apply(curl, e) - k));

  const TimeSignal se = apply(p.sigma, e);
  const TimeSignal cth = apply(SparseMatrix(curl.transpose()), h);
  const TimeSignal muh = apply(p.mu, h);
  const TimeSignal ce = apply(curl, e);
  const TimeSignal dmuh = d0(muh);
  EddySolution out{u, std::move(e), std::move(h), 0.0, 0.0, defect};
  out.residual_first =
      rel(weighted_norm(se - cth + j), weighted_norm(se) + weighted_norm(cth) + weighted_norm(j));
  out.residual_second =
      rel(weighted_norm(dmuh + ce - k), weighted_norm(dmuh) + weighted_norm(ce) + weighted_norm(k));
  return out;
}

SaddleSystem::SaddleSystem(const EddyProblem& p, const TimeGrid& grid) : problem_(&p), grid_(grid) {
  require(p.mu_is_identity, ErrorKind::Argument, "saddle formulation requires mu = identity");
  require(grid.dt() <= 1.0 / grid.rho() * (1.0 + 1e-12), ErrorKind::Argument, "saddle: dt exceeds 1/rho");
  const Index d = p.edge_dim();
  const Index m = p.diamond.multiplier_dim();
  sigma_over_dt_ = SparseMatrix(p.sigma.sparseView()) / grid.dt();
  const SparseMatrix a = sigma_over_dt_ + SparseMatrix(p.ops.curl0.transpose()) * p.ops.curl0;
  std::vector<Triplet> t;
  for (Index c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Index c = 0; c < p.diamond.g.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(p.diamond.g, c); it; ++it) {
      t.emplace_back(it.row(), d + it.col(), it.value());
      t.emplace_back(d + it.col(), it.row(), it.value());
    }
  SparseMatrix block(d + m, d + m);
  block.setFromTriplets(t.begin(), t.end());
  lu_ = std::make_unique<detail::StepFactorization>(block);
  probe_residual_ = lu_->residual_probe(7);
  if (!(probe_residual_ <= 1e-10)) {
    std::ostringstream msg;
    msg << "saddle block matrix failed the residual probe (" << probe_residual_ << ")";
    fail(ErrorKind::Internal, msg.str());
  }
}

SaddleSystem::~SaddleSystem() = default;
SaddleSystem::SaddleSystem(SaddleSystem&&) noexcept = default;

SaddleSolution SaddleSystem::solve(const TimeSignal& f) const {
  const EddyProblem& p = *problem_;
  require(f.grid() == grid_, ErrorKind::Dimension, "saddle: source on a different grid");
  require(f.dim() == p.edge_dim(), ErrorKind::Dimension, "saddle: f must be an edge signal");
  const Index d = p.edge_dim();
  const Index m = p.diamond.multiplier_dim();
  SaddleSolution out{TimeSignal(grid_, d), TimeSignal(grid_, m), 0.0, 0.0, 0.0};
  Vector prev = Vector::Zero(d);
  Vector rhs = Vector::Zero(d + m);
  double e_max = 0.0;
  double c_max = 0.0;
  for (int n = 0; n < grid_.nodes(); ++n) {
    rhs.head(d) = f.at(n) + sigma_over_dt_ * prev;
    Vector x = rhs.isZero(0.0) ? Vector::Zero(d + m) : lu_->solve(rhs);
    out.e.at(n) = x.head(d);
    out.p.at(n) = x.tail(m);
    prev = x.head(d);
    e_max = std::max(e_max, prev.norm());
    c_max = std::max(c_max, (p.diamond.g.transpose() * prev).norm());
  }
  out.constraint_residual = rel(c_max, e_max);
  out.p_norm = weighted_norm(out.p);
  out.f_norm = weighted_norm(f);
  return out;
}

SaddleSolution saddle_solve(const EddyProblem& p, const TimeSignal& f) { return SaddleSystem(p, f.grid()).solve(f); }

}  // namespace degen
