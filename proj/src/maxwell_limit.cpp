#include "degen/maxwell_limit.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "degen/error.hpp"

namespace degen {

namespace {

double rel(double num, double scale) { return scale > 0.0 ? num / scale : num; }

TimeSignal stack(const TimeSignal& a, const TimeSignal& b) {
  Matrix v(a.dim() + b.dim(), a.nodes());
  v.topRows(a.dim()) = a.values();
  v.bottomRows(b.dim()) = b.values();
  return TimeSignal(a.grid(), std::move(v));
}

double norm_k(const TimeSignal& f, int k) { return std::sqrt(std::max(0.0, weighted_inner(f, f, k))); }

}  // namespace

EvoProblem maxwell_evo_problem(const EddyProblem& p, double epsilon, double rho) {
  require(std::isfinite(epsilon) && epsilon > 0.0, ErrorKind::Argument,
          "maxwell: epsilon must be positive (use the eddy-current solver for epsilon = 0)");
  const Index d = p.edge_dim();
  const Index m = p.face_dim();
  std::vector<Triplet> m0;
  std::vector<Triplet> m1;
  std::vector<Triplet> a;
  for (Index i = 0; i < d; ++i) m0.emplace_back(i, i, epsilon);
  for (Index c = 0; c < m; ++c)
    for (Index r = 0; r < m; ++r)
      if (p.mu(r, c) != 0.0) m0.emplace_back(d + r, d + c, p.mu(r, c));
  for (Index c : p.conducting)
    for (Index r : p.conducting) m1.emplace_back(r, c, p.sigma(r, c));
  const SparseMatrix& curl = p.ops.curl0;
  for (Index c = 0; c < curl.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(curl, c); it; ++it) {
      a.emplace_back(d + it.row(), it.col(), it.value());
      a.emplace_back(it.col(), d + it.row(), -it.value());
    }
  EvoProblem evo;
  evo.m0.resize(d + m, d + m);
  evo.m0.setFromTriplets(m0.begin(), m0.end());
  evo.m1.resize(d + m, d + m);
  evo.m1.setFromTriplets(m1.begin(), m1.end());
  evo.a.resize(d + m, d + m);
  evo.a.setFromTriplets(a.begin(), a.end());
  evo.rho = rho;
  certify_positivity(evo);
  return evo;
}

MaxwellSolution maxwell_solve(const EddyProblem& p, double epsilon, const TimeSignal& j, const TimeSignal& k) {
  require(j.dim() == p.edge_dim() && k.dim() == p.face_dim(), ErrorKind::Dimension,
          "maxwell: J must live on edges and K on faces");
  require(j.grid() == k.grid(), ErrorKind::Dimension, "maxwell: J and K on different grids");
  const EvoProblem evo = maxwell_evo_problem(p, epsilon, j.grid().rho());
  const TimeSignal u = solve(evo, stack(-1.0 * j, k));
  const Index d = p.edge_dim();
  MaxwellSolution s{TimeSignal(j.grid(), Matrix(u.values().topRows(d))),
                    TimeSignal(j.grid(), Matrix(u.values().bottomRows(p.face_dim()))), 0.0, 0.0};

  const SparseMatrix& curl = p.ops.curl0;
  const TimeSignal de = d0(epsilon * s.e);
  const TimeSignal se = apply(p.sigma, s.e);
  const TimeSignal cth = apply(SparseMatrix(curl.transpose()), s.h);
  const TimeSignal dmuh = d0(apply(p.mu, s.h));
  const TimeSignal ce = apply(curl, s.e);
  s.residual_first = rel(weighted_norm(de + se - cth + j),
                         weighted_norm(de) + weighted_norm(se) + weighted_norm(cth) + weighted_norm(j));
  s.residual_second =
      rel(weighted_norm(dmuh + ce - k), weighted_norm(dmuh) + weighted_norm(ce) + weighted_norm(k));
  return s;
}

std::vector<double> maxwell_energy(const EddyProblem& p, double epsilon, const MaxwellSolution& s) {
  std::vector<double> out;
  for (int n = 0; n < s.e.nodes(); ++n)
    out.push_back(0.5 * (epsilon * s.e.at(n).squaredNorm() + s.h.at(n).dot(p.mu * s.h.at(n))));
  return out;
}

std::optional<double> fit_loglog_order(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  const double denom = m * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return std::nullopt;
  return (m * sxy - sx * sy) / denom;
}

LimitStudyReport limit_study(const EddyProblem& p, const std::function<TimeSignal(const TimeGrid&)>& f_on_grid,
                             const TimeGrid& grid, const LimitStudyOptions& options) {
  const std::vector<double>& eps = options.epsilons;
  require(!eps.empty(), ErrorKind::Argument, "limit study: empty epsilon list");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    require(std::isfinite(eps[i]) && eps[i] > 0.0, ErrorKind::Argument, "limit study: epsilons must be positive");
    require(i == 0 || eps[i] < eps[i - 1], ErrorKind::Argument, "limit study: epsilons must be strictly decreasing");
  }
  require(options.k >= -1 && options.k <= 1, ErrorKind::Argument, "limit study: k must be in -1..1");
  const int k = options.k;

  struct Base {
    TimeGrid grid;
    TimeSignal f;
    TimeSignal e0;
  };
  auto base_on = [&](const TimeGrid& g) {
    TimeSignal f = f_on_grid(g);
    require(f.dim() == p.edge_dim(), ErrorKind::Dimension, "limit study: source must be an edge signal");
    const double defect = p.degenerate.h0_defect(f);
    if (defect > kSourceAdmitTol) {
      std::ostringstream msg;
      msg << "limit study: source is not H0-valued (relative defect " << defect << ")";
      fail(ErrorKind::Argument, msg.str());
    }
    const TimeSignal zero(g, p.face_dim());
    TimeSignal e0 = eddy_solve(p, -1.0 * f, zero).e;
    return Base{g, std::move(f), std::move(e0)};
  };
  auto error_at = [&](const Base& b, double epsilon) {
    const TimeSignal zero(b.grid, p.face_dim());
    const TimeSignal diff = maxwell_solve(p, epsilon, -1.0 * b.f, zero).e - b.e0;
    return diff;
  };

  LimitStudyReport r;
  r.n = p.mesh.n;
  r.rho = grid.rho();
  r.k = k;

  // Pilot: refine dt until the time-discretization surrogate eps_min dt is
  // small against the smallest measured error.
  Base base = base_on(grid);
  for (;;) {
    const double e_min = norm_k(error_at(base, eps.back()), k - 2);
    r.dt_pilot_satisfied = eps.back() * base.grid.dt() <= 0.1 * e_min;
    if (r.dt_pilot_satisfied || r.dt_halvings >= options.max_halvings) break;
    base = base_on(TimeGrid(base.grid.horizon(), 2 * base.grid.steps(), base.grid.rho()));
    ++r.dt_halvings;
  }
  r.dt = base.grid.dt();

  const double d0e0 = weighted_norm(d0(base.e0), k);
  const double d0f = weighted_norm(d0(base.f), k);
  const double rho = base.grid.rho();
  const double slack = 1.0 + 10.0 * base.grid.dt() * rho;
  r.points.resize(eps.size());
  auto run_point = [&](std::size_t i) {
    const double epsilon = eps[i];
    const TimeSignal diff = error_at(base, epsilon);
    const TimeSignal zero(base.grid, p.face_dim());
    const TimeSignal via_identity = maxwell_solve(p, epsilon, epsilon * d0(base.e0), zero).e;
    LimitPoint& pt = r.points[i];
    pt.epsilon = epsilon;
    pt.error = norm_k(diff, k - 2);
    pt.ratio = pt.error / epsilon;
    pt.identity_residual = rel(norm_k(via_identity - diff, k - 2), pt.error);
    pt.bound = epsilon * d0e0 * slack / (rho * std::min(rho, 1.0) * p.degenerate.c1);
    pt.b_meas = d0f > 0.0 ? pt.error / (epsilon * d0f) : 0.0;
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, eps.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < eps.size(); ++i) run_point(i);
  } else {
    std::vector<std::exception_ptr> errors(eps.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < eps.size(); i += workers) {
          try {
            run_point(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<double> xs, ys, ratios;
  r.pass_identity = true;
  r.pass_bound = true;
  for (const LimitPoint& pt : r.points) {
    xs.push_back(pt.epsilon);
    ys.push_back(pt.error);
    ratios.push_back(pt.ratio);
    r.max_ratio = std::max(r.max_ratio, pt.ratio);
    r.pass_identity = r.pass_identity && pt.identity_residual <= 1e-8;
    r.pass_bound = r.pass_bound && pt.error <= pt.bound;
  }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t h = ratios.size() / 2;
  r.median_ratio = ratios.size() % 2 == 1 ? ratios[h] : 0.5 * (ratios[h - 1] + ratios[h]);
  r.fitted_order = fit_loglog_order(xs, ys);
  r.pass_order = r.fitted_order.has_value() && *r.fitted_order >= 0.9;
  r.pass_ratio = r.median_ratio > 0.0 && r.max_ratio <= 10.0 * r.median_ratio;
  return r;
}

}  // namespace degen
