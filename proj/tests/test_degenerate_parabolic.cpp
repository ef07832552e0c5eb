#include <doctest.h>

#include <cmath>
#include <vector>

#include "degen/degenerate_parabolic.hpp"
#include "degen/error.hpp"
#include "degen/maxwell_limit.hpp"
#include "helpers.hpp"

using namespace degen;
using testutil::random_matrix;
using testutil::random_signal;

namespace {

DegenerateProblem scalar_heat(double lambda) {
  return build_degenerate(Matrix::Identity(1, 1), Matrix::Constant(1, 1, std::sqrt(lambda)));
}

// eta = diag(1, 1, 0, 0) and a random 2x4 C: H0 is the whole space.
DegenerateProblem mixed_instance(unsigned seed) {
  Matrix eta = Matrix::Zero(4, 4);
  eta(0, 0) = eta(1, 1) = 1.0;
  return build_degenerate(eta, random_matrix(2, 4, seed));
}

}  // namespace

TEST_CASE("eta = I gives c1 >= 1") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const DegenerateProblem p = build_degenerate(Matrix::Identity(5, 5), random_matrix(3, 5, seed));
    CHECK(p.reduced_dim() == 5);
    CHECK(p.c1 >= 1.0 - 1e-12);
  }
}

TEST_CASE("eta = 0 with injective C: H0 = R(C^T) and c1 = sigma_min^2") {
  const Matrix c = random_matrix(6, 4, 3);
  const DegenerateProblem p = build_degenerate(Matrix::Zero(4, 4), c);
  const double s = Eigen::JacobiSVD<Matrix>(c).singularValues().minCoeff();
  CHECK(same_subspace(p.h0, range(Matrix(c.transpose()))));
  CHECK(p.c1 == doctest::Approx(s * s).epsilon(1e-10));
}

TEST_CASE("eta = 0 and C with a kernel: the kernel is removed") {
  Matrix c = random_matrix(2, 5, 4);
  const DegenerateProblem p = build_degenerate(Matrix::Zero(5, 5), c);
  CHECK(p.reduced_dim() == 2);
  CHECK(p.c1 > 0.0);
}

TEST_CASE("a problem with no coercive part is rejected") {
  Matrix eta = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(build_degenerate(eta, Matrix::Zero(1, 2)), Error);
  CHECK_THROWS_AS(build_degenerate(-Matrix::Identity(2, 2), Matrix::Zero(1, 2)), Error);
}

TEST_CASE("reduction consistency of eta0 and C0") {
  const DegenerateProblem p = mixed_instance(7);
  const Matrix& b = p.h0.basis();
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Vector phi = testutil::random_vector(p.reduced_dim(), seed);
    const Vector psi = testutil::random_vector(p.reduced_dim(), seed + 10);
    CHECK(std::abs(phi.dot(p.a0 * psi) - (p.c * b * phi).dot(p.c * b * psi)) <= 1e-12);
    CHECK(std::abs(phi.dot(p.eta0 * psi) - (b * phi).dot(p.eta * b * psi)) <= 1e-12);
  }
}

TEST_CASE("bidomain preset") {
  for (int dim : {1, 2}) {
    const BidomainPreset b = make_bidomain(dim, dim == 1 ? 12 : 5, 1.0, 3.0);
    const DegenerateProblem p = build_degenerate(b.eta, b.c);
    const double c2 = bidomain_poincare_c_squared(b);
    CHECK(p.c1 >= std::min(1.0, c2) * (1.0 - 1e-10));
    REQUIRE(p.decomposition.parts.size() == 3);
    CHECK(p.decomposition.parts[2].dim() == 0);
    const Subspace k = intersect(kernel(b.eta), kernel(b.c));
    REQUIRE(k.dim() == 1);
    const Vector dir = bidomain_kernel_direction(b);
    CHECK(same_subspace(k, Subspace(dir.size(), Matrix(dir))));
    // H0 = {(W1, W2) : sum W1 = sum W2}
    const Index n = b.nodes();
    for (Index c = 0; c < p.h0.dim(); ++c)
      CHECK(std::abs(p.h0.basis().col(c).head(n).sum() - p.h0.basis().col(c).tail(n).sum()) <= 1e-10);
    CHECK(p.reduced_dim() == 2 * n - 1);
  }
}

TEST_CASE("bidomain Poincare constant of the 1-D path") {
  // Mean-zero Neumann Laplacian on m nodes with spacing h: smallest nonzero
  // eigenvalue (2 - 2 cos(pi/m)) / h^2.
  const int m = 10;
  const BidomainPreset b = make_bidomain(1, m, 2.0, 5.0);
  const double h = 1.0 / (m - 1);
  const double lam = (2.0 - 2.0 * std::cos(M_PI / m)) / (h * h);
  CHECK(bidomain_poincare_c_squared(b) == doctest::Approx(2.0 * lam).epsilon(1e-10));
}

TEST_CASE("space-time equivalence") {
  const TimeGrid g(2.0, 40, 1.0);
  const DegenerateProblem p = mixed_instance(2);
  const SpacetimeReport r = check_spacetime_equivalence(p, g, 100, 1);
  CHECK(r.pass);
  CHECK(r.worst_temporal_ratio >= 1.0 - 10.0 * g.dt());
  CHECK(r.ramp_deviation <= 1e-10);
  const BidomainPreset b = make_bidomain(1, 8, 1.0, 1.0);
  CHECK(check_spacetime_equivalence(build_degenerate(b.eta, b.c), g, 100, 3).pass);
}

TEST_CASE("scalar heat step response") {
  const double lambda = 2.0;
  const DegenerateProblem p = scalar_heat(lambda);
  for (int steps : {200, 400}) {
    const TimeGrid g(4.0, steps, 1.0);
    const TimeSignal u = solve_reduced(p, testutil::constant_signal(g, 1, 1.0));
    double err = 0.0;
    for (int n = 0; n < g.nodes(); ++n)
      err = std::max(err, std::abs(u.at(n)(0) - (1.0 - std::exp(-lambda * g.time(n))) / lambda));
    CHECK(err <= g.dt());
  }
  const TimeGrid g(1.0, 10, 1.0);
  CHECK(solve_reduced(p, TimeSignal(g, 1)).is_zero());
}

TEST_CASE("reduced solve agrees with a dense space-time solve") {
  const DegenerateProblem p = mixed_instance(5);
  const TimeGrid g(1.0, 8, 1.0);
  const Index d = 4;
  const Index nodes = g.nodes();
  const TimeSignal f_amb = random_signal(g, d, 9);
  const TimeSignal u = p.lift(solve_reduced(p, p.reduce(f_amb)));

  // Block lower-bidiagonal system: eta (U_n - U_{n-1})/dt + C^T C U_n = F_n.
  const Matrix a = p.c.transpose() * p.c;
  Matrix big = Matrix::Zero(d * nodes, d * nodes);
  for (Index n = 0; n < nodes; ++n) {
    big.block(d * n, d * n, d, d) = p.eta / g.dt() + a;
    if (n > 0) big.block(d * n, d * (n - 1), d, d) = -p.eta / g.dt();
  }
  const Vector rhs = Eigen::Map<const Vector>(f_amb.values().data(), d * nodes);
  const Vector x = big.fullPivLu().solve(rhs);
  const Matrix oracle = Eigen::Map<const Matrix>(x.data(), d, nodes);
  CHECK((u.values() - oracle).cwiseAbs().maxCoeff() <= 1e-9 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("reduced solutions stay in H0") {
  Matrix eta = Matrix::Zero(4, 4);
  eta(0, 0) = 1.0;
  Matrix c = Matrix::Zero(1, 4);
  c(0, 1) = 2.0;
  const DegenerateProblem p = build_degenerate(eta, c);
  CHECK(p.reduced_dim() == 2);
  const TimeGrid g(1.0, 10, 1.0);
  const TimeSignal u = p.lift(solve_reduced(p, random_signal(g, 2, 1)));
  const Subspace k = intersect(kernel(eta), kernel(c));
  CHECK((k.basis().transpose() * u.values()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(p.reduce(random_signal(g, 4, 2)), Error);
}

TEST_CASE("first-order pair recovery") {
  const TimeGrid g(2.0, 40, 1.0);
  const DegenerateProblem heat = scalar_heat(3.0);
  const TimeSignal zero(g, 1);
  const RecoveredPair z = recover_pair(heat, zero, zero);
  CHECK(z.v.is_zero());
  CHECK(z.residual_first == 0.0);
  CHECK(z.residual_second == 0.0);
  const TimeSignal f = random_signal(g, 1, 4);
  const RecoveredPair r = recover_pair(heat, solve_reduced(heat, f), f);
  CHECK(r.residual_first <= 1e-10);
  CHECK(r.residual_second <= 1e-10);
}

TEST_CASE("energy identity per step") {
  const TimeGrid g(2.0, 40, 1.0);
  for (unsigned seed = 0; seed < 3; ++seed) {
    const DegenerateProblem p = mixed_instance(seed);
    const TimeSignal f = random_signal(g, p.reduced_dim(), seed + 3);
    CHECK(energy_step_identity_residual(p, solve_reduced(p, f), f) <= 1e-12);
  }
  const DegenerateProblem heat = scalar_heat(1.0);
  const TimeSignal zero(g, 1);
  const EnergyBalance e = energy_balance(heat, zero, zero, 0.5, 1.5);
  CHECK(e.lhs == 0.0);
  CHECK(e.rhs == 0.0);
}

TEST_CASE("energy window balance converges at first order for scalar heat") {
  const DegenerateProblem heat = scalar_heat(1.0);
  std::vector<double> dts;
  std::vector<double> gaps;
  for (int e = 4; e <= 8; ++e) {
    const TimeGrid g(2.0, 2 << e, 1.0);
    const TimeSignal f = truncate(testutil::constant_signal(g, 1, 1.0), 1.0);
    const EnergyBalance b = energy_balance(heat, solve_reduced(heat, f), f, 1.0, 2.0);
    CHECK(b.identity_residual <= 1e-12);
    dts.push_back(g.dt());
    gaps.push_back(std::abs(b.lhs - b.rhs));
  }
  const auto order = fit_loglog_order(dts, gaps);
  REQUIRE(order.has_value());
  CHECK(*order >= 0.9);
}

TEST_CASE("energy balance needs a source-free window") {
  const DegenerateProblem heat = scalar_heat(1.0);
  const TimeGrid g(2.0, 20, 1.0);
  const TimeSignal f = testutil::constant_signal(g, 1, 1.0);
  CHECK_THROWS_AS(energy_balance(heat, solve_reduced(heat, f), f, 1.0, 2.0), Error);
}

TEST_CASE("regularity bound") {
  const TimeGrid g(2.0, 40, 1.0);
  const DegenerateProblem heat = scalar_heat(2.0);
  const TimeSignal zero(g, 1);
  const RegularityCheck z = regularity_bound_check(heat, zero, zero);
  CHECK(z.lhs == 0.0);
  CHECK(z.pass);
  const TimeSignal f = testutil::constant_signal(g, 1, 1.0);
  CHECK(regularity_bound_check(heat, f, solve_reduced(heat, f)).pass);

  const BidomainPreset b = make_bidomain(1, 10, 1.0, 2.0);
  const DegenerateProblem p = build_degenerate(b.eta, b.c);
  for (unsigned seed = 0; seed < 50; ++seed) {
    const TimeSignal fr = random_signal(g, p.reduced_dim(), 100 + seed);
    CHECK(regularity_bound_check(p, fr, solve_reduced(p, fr)).pass);
  }
}
