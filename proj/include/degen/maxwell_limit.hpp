#pragma once

// Full Maxwell system with displacement current and the eddy-current limit.
//
//   d0(eps E) + sigma E - curl0^T H = -J,   d0(mu H) + curl0 E = K
//
// S_eps f is the E component for J = -f, K = 0; S_0 f is the eddy-current E.

#include <functional>
#include <optional>
#include <vector>

#include "degen/eddy_current.hpp"

namespace degen {

/// Evo-system on edges x faces: M0 = diag(eps I, mu), M1 = diag(sigma, 0),
/// A = [[0, -curl0^T], [curl0, 0]]. Certified. Throws Argument if eps <= 0.
EvoProblem maxwell_evo_problem(const EddyProblem& p, double epsilon, double rho);

struct MaxwellSolution {
  TimeSignal e;
  TimeSignal h;
  double residual_first = 0.0;   // d0(eps E) + sigma E - curl0^T H + J, relative
  double residual_second = 0.0;  // d0(mu H) + curl0 E - K, relative
};

MaxwellSolution maxwell_solve(const EddyProblem& p, double epsilon, const TimeSignal& j, const TimeSignal& k);

/// Discrete energy 1/2 (eps |E_n|^2 + <H_n|mu H_n>) per node.
std::vector<double> maxwell_energy(const EddyProblem& p, double epsilon, const MaxwellSolution& s);

struct LimitPoint {
  double epsilon = 0.0;
  double error = 0.0;              // |S_eps f - S_0 f|_{rho,k-2,0}
  double ratio = 0.0;              // error / epsilon
  double identity_residual = 0.0;  // |diff - S_eps(-eps d0 S_0 f)| / |diff| in the same norm
  double bound = 0.0;              // eps |d0 S_0 f|_{rho,k,0} (1 + 10 dt rho) / (rho min{rho,1} c1)
  double b_meas = 0.0;             // error / (eps |d0 f|_{rho,k,0})
};

struct LimitStudyOptions {
  std::vector<double> epsilons;  // strictly decreasing, positive
  int k = 0;                     // norm index, -1..1
  int max_halvings = 3;          // dt pilot refinements
  int threads = 1;
};

struct LimitStudyReport {
  std::vector<LimitPoint> points;
  std::optional<double> fitted_order;  // undefined for < 2 points or zero errors
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  double dt = 0.0;
  int n = 0;
  double rho = 0.0;
  int k = 0;
  int dt_halvings = 0;
  bool dt_pilot_satisfied = false;  // eps_min dt <= 0.1 e(eps_min)
  bool pass_order = false;          // fitted order >= 0.9
  bool pass_ratio = false;          // max ratio <= 10 median ratio
  bool pass_identity = false;       // all identity residuals <= 1e-8
  bool pass_bound = false;          // all errors <= bound

  bool pass() const noexcept { return pass_order && pass_ratio; }
};

/// Least-squares slope of log y against log x; empty for < 2 points or any
/// nonpositive value.
std::optional<double> fit_loglog_order(const std::vector<double>& x, const std::vector<double>& y);

/// f_on_grid produces the H0-valued source on a given grid (it is called
/// again on refined grids by the dt pilot). Throws Argument if f is not
/// H0-valued or the epsilon list is not strictly decreasing and positive.
LimitStudyReport limit_study(const EddyProblem& p, const std::function<TimeSignal(const TimeGrid&)>& f_on_grid,
                             const TimeGrid& grid, const LimitStudyOptions& options);

}  // namespace degen
