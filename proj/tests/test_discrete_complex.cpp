#include <doctest.h>

#include "degen/discrete_complex.hpp"
#include "degen/error.hpp"
#include "degen/subspaces.hpp"
#include "helpers.hpp"

using namespace degen;

namespace {

bool check_passes(const KernelLocalizationReport& r, const std::string& id) {
  for (const auto& c : r.checks)
    if (c.id == id) return c.pass;
  FAIL("missing check " << id);
  return false;
}

double value_of(const KernelLocalizationReport& r, const std::string& id, const std::string& key) {
  for (const auto& c : r.checks)
    if (c.id == id)
      for (const auto& [k, v] : c.values)
        if (k == key) return v;
  FAIL("missing value " << id << "." << key);
  return 0.0;
}

}  // namespace

TEST_CASE("n = 2 without conductor") {
  const StaggeredMesh m = build_mesh(2);
  CHECK(m.node_count() == 1);
  CHECK(m.edge_count() == 6);
  CHECK(m.face_count() == 12);
  CHECK(m.components == 0);
  CHECK(m.conducting_edges().empty());
}

TEST_CASE("entity counts follow the enumeration formulas") {
  for (int n = 2; n <= 7; ++n) {
    const StaggeredMesh m = build_mesh(n);
    CHECK(m.node_count() == Index(n - 1) * (n - 1) * (n - 1));
    CHECK(m.edge_count() == Index(3) * n * (n - 1) * (n - 1));
    CHECK(m.face_count() == Index(3) * n * n * (n - 1));
    const ComplexOperators ops = build_operators(m);
    CHECK(ops.grad0.rows() == m.edge_count());
    CHECK(ops.grad0.cols() == m.node_count());
    CHECK(ops.curl0.rows() == m.face_count());
  }
}

TEST_CASE("n = 3 with the central cell conducting") {
  const StaggeredMesh m = build_mesh(3, {{1, 2, 1, 2, 1, 2}});
  CHECK(m.components == 1);
  // The 12 edges of the unit cell [1,2]^3 are all interior edges.
  CHECK(m.conducting_edges().size() == 12);
  int interior_edges = 0;
  for (char c : m.edge_conductor_interior) interior_edges += c;
  CHECK(interior_edges == 0);
  int interior_nodes = 0;
  int closure_nodes = 0;
  for (Index v = 0; v < m.node_count(); ++v) {
    interior_nodes += m.node_conductor_interior[v];
    closure_nodes += m.node_component[v] >= 0;
  }
  CHECK(interior_nodes == 0);
  CHECK(closure_nodes == 8);
  int inner_faces = 0;
  for (char c : m.face_conductor_interior) inner_faces += c;
  CHECK(inner_faces == 0);
}

TEST_CASE("conductor margins and component separation") {
  CHECK_THROWS_AS(build_mesh(6, {{0, 3, 2, 4, 2, 4}}), Error);
  CHECK_THROWS_AS(build_mesh(6, {{2, 4, 2, 6, 2, 4}}), Error);
  CHECK_THROWS_AS(build_mesh(1), Error);
  CHECK_THROWS_AS(build_mesh(6, {{3, 2, 2, 4, 2, 4}}), Error);
  try {
    build_mesh(6, {{1, 3, 1, 3, 1, 3}, {3, 5, 3, 5, 3, 5}});
    FAIL("touching closures accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Certification);
    CHECK(std::string(e.what()).find("conductor_components") != std::string::npos);
  }
  // Overlapping boxes form one component.
  CHECK(build_mesh(6, {{1, 3, 1, 3, 1, 3}, {2, 4, 2, 4, 2, 4}}).components == 1);
}

TEST_CASE("conducting edges lie in the closed conductor") {
  const StaggeredMesh m = build_mesh(6, {{1, 3, 1, 4, 2, 4}});
  for (Index e : m.conducting_edges()) {
    const EdgeInfo& info = m.edges[e];
    int hi[3] = {info.i, info.j, info.k};
    hi[info.axis] += 1;
    const Index a = m.node_index(info.i, info.j, info.k);
    const Index b = m.node_index(hi[0], hi[1], hi[2]);
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    CHECK(m.node_component[a] >= 0);
    CHECK(m.node_component[b] >= 0);
  }
}

TEST_CASE("complex identities") {
  for (int n = 3; n <= 6; ++n) {
    const StaggeredMesh m = build_mesh(n);
    const ComplexOperators ops = build_operators(m);
    const Matrix x = testutil::random_matrix(m.node_count(), 100, n);
    CHECK(SparseMatrix(ops.curl0 * ops.grad0).norm() == 0.0);
    // entries of curl0 grad0 are sums of +-1/h^2
    CHECK(Matrix(ops.curl0 * (ops.grad0 * x)).cwiseAbs().maxCoeff() <= 1e-14 * n * n * x.cwiseAbs().maxCoeff());
    CHECK(SparseMatrix(ops.div_full * ops.curl_full).norm() == 0.0);
    CHECK(ops.curl_kernel_dim == ops.grad_rank);
    CHECK(ops.grad_rank == m.node_count());
  }
}

TEST_CASE("transpose is the adjoint of curl0") {
  const StaggeredMesh m = build_mesh(4);
  const ComplexOperators ops = build_operators(m);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Vector e = testutil::random_vector(m.edge_count(), seed);
    const Vector g = testutil::random_vector(m.face_count(), seed + 9);
    const double lhs = (ops.curl0 * e).dot(g);
    const double rhs = e.dot(ops.curl0.transpose() * g);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("kernel localization without conductor") {
  const StaggeredMesh m = build_mesh(4);
  const KernelLocalizationReport r = check_kernel_localization(m, build_operators(m));
  CHECK(r.pass());
}

TEST_CASE("kernel localization with one central box") {
  const StaggeredMesh m = build_mesh(6, {{2, 4, 2, 4, 2, 4}});
  const KernelLocalizationReport r = check_kernel_localization(m, build_operators(m));
  CHECK(r.pass());
  CHECK(check_passes(r, "exact_sequence"));
  CHECK(value_of(r, "kernel_localization_outside", "harmonic_dim") == 1.0);
}

TEST_CASE("kernel localization with two separated boxes") {
  const StaggeredMesh m = build_mesh(6, {{1, 2, 1, 2, 1, 2}, {3, 5, 3, 5, 3, 5}});
  CHECK(m.components == 2);
  const KernelLocalizationReport r = check_kernel_localization(m, build_operators(m));
  CHECK(r.pass());
  CHECK(value_of(r, "kernel_localization_outside", "components") == 2.0);
}

TEST_CASE("diamond gradient without conductor is grad0") {
  const StaggeredMesh m = build_mesh(4);
  const ComplexOperators ops = build_operators(m);
  const DiamondGrad d = build_diamond_grad(m, ops);
  CHECK(d.multiplier_dim() == m.node_count());
  CHECK(same_subspace(range(Matrix(d.g)), range(Matrix(ops.grad0))));
}

TEST_CASE("diamond gradient multiplier count") {
  const StaggeredMesh m = build_mesh(6, {{2, 4, 2, 4, 2, 4}});
  const DiamondGrad d = build_diamond_grad(m, build_operators(m));
  Index free = 0;
  for (Index v = 0; v < m.node_count(); ++v) free += m.node_component[v] < 0;
  CHECK(free == 98);
  CHECK(d.free_nodes == free);
  CHECK(d.multiplier_dim() == free + 1);
  CHECK(numerical_rank(Matrix(d.g)) == d.multiplier_dim());
}
