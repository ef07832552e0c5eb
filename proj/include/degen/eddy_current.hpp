#pragma once

// Degenerate eddy-current problem on the staggered complex.
//
//   sigma E - curl0^T H = -J,   d0(mu H) + curl0 E = K
//
// with sigma = i_c sigma_tilde i_c^T supported on conducting edges. The
// reduced unknown u solves (d0 sigma + curl0^T mu^{-1} curl0) u = f on H0,
// f = -J + curl0^T mu^{-1} d0^{-1} K, and E = d0 u.

#include <optional>
#include <vector>

#include "degen/degenerate_parabolic.hpp"
#include "degen/discrete_complex.hpp"

namespace degen {

struct EddyConstants {
  double k0 = 0.0;  // 1 / smallest nonzero singular value of curl0
  double k1 = 0.0;  // 1 / sigma_min of the conductor restriction on H2 (0 if H2 = {0})
  double c_star = 0.0;
  double sigma_tilde_min = 1.0;  // lambda_min(sigma_tilde), 1 without conductor
  double c0_formula = 0.0;       // min{1, sigma_tilde_min} * min{1, c_star}
  double c0_direct = 0.0;        // lambda_min(sigma + curl0^T curl0) on H0
  Index h2_dim = 0;
  bool pass = false;  // c0_direct >= c0_formula (1 - 1e-10)
};

class EddyProblem {
public:
  StaggeredMesh mesh;
  ComplexOperators ops;
  KernelLocalizationReport hypotheses;
  DiamondGrad diamond;
  std::vector<Index> conducting;  // conducting edge indices
  Matrix sigma_tilde;             // on conducting edges, SPD
  Matrix mu;                      // on faces, SPD
  Matrix sigma;                   // on all edges
  Matrix c;                       // L^{-1} curl0 with mu = L L^T
  bool mu_is_identity = false;
  DegenerateProblem degenerate;
  /// Subspace identities of the H0 decomposition (range, conductor
  /// gradients, remainder dimension, diamond range).
  std::vector<HypothesisCheck> decomposition_checks;

  Index edge_dim() const noexcept { return ops.curl0.cols(); }
  Index face_dim() const noexcept { return ops.curl0.rows(); }
  Vector apply_mu_inverse(const Vector& x) const;
  TimeSignal apply_mu_inverse(const TimeSignal& x) const;
  /// P_H0 x, ambient edge vector.
  Vector project_h0(const Vector& x) const;
  bool decomposition_pass() const;

  Eigen::LLT<Matrix> mu_llt;
};

/// Scalar materials: sigma_tilde = s I, mu = m I.
Matrix scalar_sigma_tilde(const StaggeredMesh& mesh, double sigma);
Matrix scalar_mu(const StaggeredMesh& mesh, double mu);

/// Throws Certification naming the failed hypothesis if the localization
/// checks fail or the reduced problem is not coercive; Model if sigma_tilde
/// or mu is not symmetric positive definite.
EddyProblem assemble_eddy(const StaggeredMesh& mesh, const Matrix& sigma_tilde, const Matrix& mu,
                          double tol = kDefaultRankTol);

/// Throws Certification if the conductor restriction is not injective on H2.
EddyConstants eddy_constants(const EddyProblem& p);

struct ConstantSamples {
  int trials = 0;
  double worst_k0_ratio = 0.0;        // max |U| / (k0 |curl0 U|), U in R(curl0^T)
  double worst_k1_ratio = 0.0;        // max |U| / (k1 |chi U|), U in H2
  double worst_coercivity_ratio = 0;  // min (|sigma^1/2 U|^2 + |curl0 U|^2) / (c0_formula |U|^2), U in H0
  double worst_split_defect = 0.0;    // max ||chi(U1+U2)|^2 - |U1|^2 - |chi U2|^2|, U1 in H1, U2 in H2
};

ConstantSamples sample_constants(const EddyProblem& p, const EddyConstants& k, int trials, unsigned seed);

struct EddySolution {
  TimeSignal u;  // H0 coordinates
  TimeSignal e;
  TimeSignal h;
  double residual_first = 0.0;   // sigma E - curl0^T H + J, relative
  double residual_second = 0.0;  // d0(mu H) + curl0 E - K, relative
  double source_defect = 0.0;    // relative H0 defect of J
};

inline constexpr double kSourceAdmitTol = 1e-8;

/// Throws Argument if J is not H0-valued within kSourceAdmitTol.
EddySolution eddy_solve(const EddyProblem& p, const TimeSignal& j, const TimeSignal& k);

/// f = -J + curl0^T mu^{-1} d0^{-1} K.
TimeSignal eddy_rhs(const EddyProblem& p, const TimeSignal& j, const TimeSignal& k);

struct SaddleSolution {
  TimeSignal e;  // solves (d0 sigma + curl0^T curl0) E + G p = f, G^T E = 0
  TimeSignal p;
  double constraint_residual = 0.0;  // max_n |G^T E_n| / max_n |E_n|
  double p_norm = 0.0;               // |p|_{rho,0,0}
  double f_norm = 0.0;
};

class SaddleSystem {
public:
  /// Requires mu = identity. Throws Internal if the block step matrix fails
  /// the random residual probe.
  SaddleSystem(const EddyProblem& p, const TimeGrid& grid);
  ~SaddleSystem();
  SaddleSystem(SaddleSystem&&) noexcept;

  SaddleSolution solve(const TimeSignal& f) const;
  double probe_residual() const noexcept { return probe_residual_; }

private:
  const EddyProblem* problem_;
  TimeGrid grid_;
  SparseMatrix sigma_over_dt_;
  std::unique_ptr<detail::StepFactorization> lu_;
  double probe_residual_ = 0.0;
};

SaddleSolution saddle_solve(const EddyProblem& p, const TimeSignal& f);

}  // namespace degen
