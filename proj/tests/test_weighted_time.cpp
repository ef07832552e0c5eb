#include <doctest.h>

#include <cmath>

#include "degen/error.hpp"
#include "degen/weighted_time.hpp"
#include "helpers.hpp"

using namespace degen;
using testutil::constant_signal;
using testutil::random_signal;

TEST_CASE("grid construction enforces dt <= 1/rho") {
  CHECK_NOTHROW(TimeGrid(1.0, 10, 10.0));
  CHECK_THROWS_AS(TimeGrid(1.0, 10, 10.5), Error);
  CHECK_THROWS_AS(TimeGrid(0.0, 10, 1.0), Error);
  CHECK_THROWS_AS(TimeGrid(1.0, 0, 1.0), Error);
  CHECK_THROWS_AS(TimeGrid(1.0, 4, -1.0), Error);
  const TimeGrid g(2.0, 8, 1.0);
  CHECK(g.nodes() == 9);
  CHECK(g.time(8) == doctest::Approx(2.0));
  CHECK(g.last_node_at_or_before(0.3) == 1);
}

TEST_CASE("signals reject non-finite values") {
  const TimeGrid g(1.0, 2, 1.0);
  Matrix v = Matrix::Zero(2, 3);
  v(1, 1) = std::nan("");
  CHECK_THROWS_AS(TimeSignal(g, v), Error);
  CHECK_THROWS_AS(TimeSignal(g, Matrix::Zero(2, 4)), Error);
}

TEST_CASE("weighted inner of the constant one, rho -> 0") {
  const TimeGrid g(1.0, 1000, 1e-12);
  const TimeSignal one = constant_signal(g, 1, 1.0);
  // Rectangle rule over nodes 0..N: (N+1) dt = 1 + dt.
  CHECK(weighted_inner(one, one, 0) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("weighted inner of the constant one, rho = 1, T = 20") {
  for (int steps : {2000, 4000}) {
    const TimeGrid g(20.0, steps, 1.0);
    const TimeSignal one = constant_signal(g, 1, 1.0);
    const double dt = g.dt();
    // Left rectangle rule of e^{-2t}: dt / (1 - e^{-2 dt}) -> 1/2 + dt/2.
    CHECK(std::abs(weighted_inner(one, one, 0) - 0.5) <= 1e-8 + dt);
  }
}

TEST_CASE("zero signal has zero inner product for every k") {
  const TimeGrid g(1.0, 10, 1.0);
  const TimeSignal z(g, 3);
  const TimeSignal r = random_signal(g, 3, 4);
  for (int k = -3; k <= 1; ++k) CHECK(weighted_inner(z, r, k) == 0.0);
  CHECK_THROWS_AS(weighted_inner(r, r, 2), Error);
  CHECK_THROWS_AS(weighted_inner(r, r, -4), Error);
}

TEST_CASE("d0 of the linear ramp") {
  const TimeGrid g(1.0, 10, 1.0);
  Matrix v(1, g.nodes());
  for (int n = 0; n < g.nodes(); ++n) v(0, n) = g.time(n);
  const TimeSignal d = d0(TimeSignal(g, v));
  CHECK(d.at(0)(0) == 0.0);
  for (int n = 1; n < g.nodes(); ++n) CHECK(d.at(n)(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d0(TimeSignal(g, 2)).is_zero());
}

TEST_CASE("d0_inverse of the constant one") {
  const TimeGrid g(1.0, 10, 1.0);
  const TimeSignal u = d0_inverse(constant_signal(g, 1, 1.0));
  for (int n = 0; n < g.nodes(); ++n) CHECK(u.at(n)(0) == doctest::Approx((n + 1) * g.dt()).epsilon(1e-13));
}

TEST_CASE("d0 and d0_inverse are mutually inverse") {
  const TimeGrid g(3.0, 30, 2.0);
  const TimeSignal f = random_signal(g, 4, 11);
  const TimeSignal a = d0(d0_inverse(f));
  const TimeSignal b = d0_inverse(d0(f));
  CHECK((a.values() - f.values()).cwiseAbs().maxCoeff() <= 1e-12 * f.values().cwiseAbs().maxCoeff());
  CHECK((b.values() - f.values()).cwiseAbs().maxCoeff() <= 1e-12 * f.values().cwiseAbs().maxCoeff());
}

TEST_CASE("causality of d0 and d0_inverse") {
  const TimeGrid g(2.0, 20, 1.0);
  TimeSignal f = random_signal(g, 2, 5);
  const int n0 = 7;
  for (int n = 0; n < n0; ++n) f.at(n).setZero();
  const TimeSignal a = d0(f);
  const TimeSignal b = d0_inverse(f);
  const TimeSignal c = d0_power(f, -3);
  for (int n = 0; n < n0; ++n) {
    CHECK(a.at(n).isZero(0.0));
    CHECK(b.at(n).isZero(0.0));
    CHECK(c.at(n).isZero(0.0));
  }
}

TEST_CASE("truncate") {
  const TimeGrid g(1.0, 10, 1.0);
  const TimeSignal f = random_signal(g, 2, 8);
  CHECK(truncate(f, 1.0).values() == f.values());
  const TimeSignal t0 = truncate(f, 0.0);
  CHECK(t0.at(0) == f.at(0));
  for (int n = 1; n < g.nodes(); ++n) CHECK(t0.at(n).isZero(0.0));
  const TimeSignal once = truncate(f, 0.45);
  CHECK(truncate(once, 0.45).values() == once.values());
  CHECK_THROWS_AS(truncate(f, 1.5), Error);
}

TEST_CASE("positivity, monotonicity in rho and discrete accretivity") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const TimeGrid g(2.0, 25, 1.0);
    const TimeSignal f = random_signal(g, 3, seed);
    CHECK(weighted_inner(f, f, 0) > 0.0);
    CHECK(weighted_inner(f, d0(f), 0) >= 0.0);
    const TimeGrid g2(2.0, 25, 3.0);
    const TimeSignal f2(g2, f.values());
    CHECK(weighted_inner(f2, f2, 0) < weighted_inner(f, f, 0));
  }
}
