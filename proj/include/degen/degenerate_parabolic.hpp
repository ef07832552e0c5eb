#pragma once

// Degenerate parabolic problems (d0 eta + C^T C) U = F.
//
// The state space is reduced to H0 = (N(eta) ∩ N(C))^⊥; on H0 the problem is
// an evo-system with M0 = eta0 = i^T eta i, M1 = 0 and A = C0^T C0, C0 = C i,
// where i is the orthonormal basis of H0. Signals "in H0 coordinates" are
// coefficient vectors with respect to that basis.

#include <string>

#include "degen/evo_core.hpp"
#include "degen/subspaces.hpp"
#include "degen/weighted_time.hpp"

namespace degen {

struct DegenerateProblem {
  Matrix eta;  // d x d, symmetric PSD
  Matrix c;    // m x d
  Subspace h0{0};
  Matrix eta0;  // r x r
  Matrix c0;    // m x r
  Matrix a0;    // C0^T C0
  double c1 = 0.0;
  DecompositionReport decomposition;  // R(C^T), N(C) ∩ R(eta), remainder (ambient coordinates)
  /// Does eta map R(C^T) into itself.
  bool eta_preserves_range_cstar = false;
  double tol = kDefaultRankTol;

  Index ambient_dim() const noexcept { return eta.rows(); }
  Index reduced_dim() const noexcept { return h0.dim(); }

  Vector lift(const Vector& coords) const { return h0.basis() * coords; }
  TimeSignal lift(const TimeSignal& coords) const;
  /// Coordinates of an H0-valued ambient signal. Throws Argument if the
  /// relative projection defect exceeds admit_tol.
  TimeSignal reduce(const TimeSignal& ambient, double admit_tol = 1e-10) const;
  /// max_n |F_n - P_H0 F_n| / max_n |F_n| (0 for the zero signal)
  double h0_defect(const TimeSignal& ambient) const;

  /// Evo-system on H0 with the given rho, certified.
  EvoProblem evo_problem(double rho) const;
};

/// Throws Certification if c1 = lambda_min(eta0 + C0^T C0) <= tol.
DegenerateProblem build_degenerate(const Matrix& eta, const Matrix& c, double tol = kDefaultRankTol);

struct SpacetimeReport {
  int trials = 0;
  /// min over random x in H0 of (<x|eta x> + |Cx|^2) / (c1 |x|^2)
  double worst_spatial_ratio = 0.0;
  /// min over random H0-valued signals of
  /// (rho |eta^1/2 U|^2 + |CU|^2) / (min{rho,1} c1 |U|^2), weighted norms
  double worst_temporal_ratio = 0.0;
  /// Ramp U(t) = e^{rho t} x on [0,1]: temporal ratio over spatial ratio
  /// (rho <x|eta x> + |Cx|^2)/|x|^2, worst deviation from 1.
  double ramp_deviation = 0.0;
  double c0_temporal = 0.0;
  bool pass = false;
};

SpacetimeReport check_spacetime_equivalence(const DegenerateProblem& p, const TimeGrid& grid, int trials,
                                            unsigned seed);

/// U (H0 coordinates) solving (d0 eta0 + C0^T C0) U = F, F in H0 coordinates.
TimeSignal solve_reduced(const DegenerateProblem& p, const TimeSignal& f_coords);

struct RecoveredPair {
  TimeSignal v;  // V = -C d0^{-1} U, X-valued
  /// |d0 V + C U|_rho / scale and |eta U - C^T V - d0^{-1} F|_rho / scale
  double residual_first = 0.0;
  double residual_second = 0.0;
};

/// u_coords and f_coords in H0 coordinates.
RecoveredPair recover_pair(const DegenerateProblem& p, const TimeSignal& u_coords, const TimeSignal& f_coords);

struct EnergyBalance {
  double lhs = 0.0;     // 1/2 <U|eta U>(t1) + dt sum_{(t0,t1]} |C U_n|^2
  double rhs = 0.0;     // 1/2 <U|eta U>(t0)
  double defect = 0.0;  // 1/2 sum_{(t0,t1]} <dU|eta dU>, lhs + defect = rhs
  double identity_residual = 0.0;  // |lhs + defect - rhs|
};

/// Requires F = 0 on (t0, t1] (Argument otherwise); t0 < t1 grid nodes.
EnergyBalance energy_balance(const DegenerateProblem& p, const TimeSignal& u_coords, const TimeSignal& f_coords,
                             double t0, double t1);

/// max_n of the per-step identity residual
///   1/2<U_n|eta U_n> - 1/2<U_{n-1}|eta U_{n-1}> + 1/2<dU|eta dU> + dt|C U_n|^2 - dt<F_n|U_n>
/// divided by max(1, largest term).
double energy_step_identity_residual(const DegenerateProblem& p, const TimeSignal& u_coords,
                                     const TimeSignal& f_coords);

struct RegularityCheck {
  double lhs = 0.0;  // (|U|^2 + |C0 U|^2)^{1/2}, weighted
  double rhs = 0.0;  // |F|_{-1} / c1_tilde
  double c1_tilde = 0.0;
  bool pass = false;
};

/// Graph-norm bound with c1_tilde = min{1, c1}/2. The -1 norm of F is the
/// dual of the graph norm of C0: |F|_{-1}^2 = dt sum_n w_n <F_n|(I + C0^T C0)^{-1} F_n>.
RegularityCheck regularity_bound_check(const DegenerateProblem& p, const TimeSignal& f_coords,
                                       const TimeSignal& u_coords);

// Bidomain preset: eta = [[I, I], [I, I]], C = diag(sqrt(s1) grad, sqrt(s2) grad)
// with the nodal gradient on a uniform grid of the unit interval/square and no
// boundary condition.

struct BidomainPreset {
  int dimension = 1;
  int size = 0;  // nodes per axis
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  SparseMatrix grad;  // edges x nodes, scaled by 1/h
  Matrix eta;
  Matrix c;

  Index nodes() const noexcept { return grad.cols(); }
};

BidomainPreset make_bidomain(int dimension, int size, double sigma1, double sigma2);

/// c^2 = min{s1, s2} * min over mean-zero u of |grad u|^2 / |u|^2.
double bidomain_poincare_c_squared(const BidomainPreset& b);

/// The unit vector (chi, -chi)/|.| spanning N(eta) ∩ N(C) for connected grids.
Vector bidomain_kernel_direction(const BidomainPreset& b);

}  // namespace degen
