#include <doctest.h>

#include <cmath>

#include "degen/degenerate_parabolic.hpp"
#include "degen/error.hpp"
#include "degen/subspaces.hpp"
#include "helpers.hpp"

using namespace degen;
using testutil::random_matrix;
using testutil::random_vector;

namespace {

Matrix columns(std::initializer_list<std::initializer_list<double>> cols, Index rows) {
  Matrix m(rows, static_cast<Index>(cols.size()));
  Index j = 0;
  for (const auto& c : cols) {
    Index i = 0;
    for (double x : c) m(i++, j) = x;
    ++j;
  }
  return m;
}

double gram_defect(const Subspace& s) {
  if (s.dim() == 0) return 0.0;
  return (s.basis().transpose() * s.basis() - Matrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("kernel of the all-ones 2x2 matrix") {
  const Subspace k = kernel(Matrix::Ones(2, 2));
  REQUIRE(k.dim() == 1);
  const Subspace expected = Subspace::span(columns({{1.0, -1.0}}, 2));
  CHECK(same_subspace(k, expected));
  CHECK(gram_defect(k) <= 1e-12);
}

TEST_CASE("kernel of the identity is trivial") { CHECK(kernel(Matrix::Identity(5, 5)).dim() == 0); }

TEST_CASE("kernel of a path-graph gradient is the constants") {
  const BidomainPreset b = make_bidomain(1, 9, 1.0, 1.0);
  const Subspace k = kernel(Matrix(b.grad));
  REQUIRE(k.dim() == 1);
  CHECK(same_subspace(k, Subspace::span(Matrix::Ones(9, 1))));
}

TEST_CASE("range of a column of ones") {
  const Subspace r = range(Matrix::Ones(2, 1));
  REQUIRE(r.dim() == 1);
  CHECK(std::abs(std::abs(r.basis()(0, 0)) - 1.0 / std::sqrt(2.0)) <= 1e-14);
}

TEST_CASE("range(A^T) is orthogonal to kernel(A) and they reconstruct the space") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    Matrix a = random_matrix(6, 9, seed);
    a.row(5) = a.row(0) + a.row(1);  // rank 5
    const Subspace r = range(Matrix(a.transpose()));
    const Subspace k = kernel(a);
    CHECK(r.dim() == 5);
    CHECK(k.dim() == 4);
    CHECK((r.basis().transpose() * k.basis()).cwiseAbs().maxCoeff() <= 1e-10);
    const Matrix sum = r.projector() + k.projector();
    CHECK((sum - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("kernel and range are stable under column permutation") {
  Matrix a = random_matrix(5, 8, 3);
  a.col(7) = a.col(0) - 2.0 * a.col(3);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(8);
  perm.indices() << 3, 0, 7, 5, 1, 6, 2, 4;
  const Matrix ap = a * perm;
  CHECK(same_subspace(range(a), range(ap)));
  // Permuting columns permutes kernel coordinates.
  const Subspace k = kernel(a);
  const Subspace kp = kernel(ap);
  CHECK(same_subspace(k, Subspace(8, Matrix(perm * kp.basis()))));
}

TEST_CASE("intersect") {
  const Matrix e = Matrix::Identity(3, 3);
  const Subspace u = Subspace::span(e.leftCols(2));
  const Subspace v = Subspace::span(e.rightCols(2));
  const Subspace w = intersect(u, v);
  REQUIRE(w.dim() == 1);
  CHECK(same_subspace(w, Subspace::span(e.col(1))));
  const Subspace r = Subspace::span(random_matrix(7, 3, 9));
  CHECK(intersect(r, complement(r)).dim() == 0);
}

TEST_CASE("complement") {
  CHECK(complement(Subspace(4)).dim() == 4);
  const Subspace u = Subspace::span(random_matrix(8, 3, 2));
  CHECK(same_subspace(complement(complement(u)), u));
  CHECK(complement(Subspace::full(5)).dim() == 0);
}

TEST_CASE("projection") {
  const Vector x = random_vector(6, 1);
  const Vector y = random_vector(6, 2);
  CHECK((project(Subspace::full(6), x) - x).norm() <= 1e-14);
  CHECK(project(Subspace(6), x).norm() == 0.0);
  const Subspace u = Subspace::span(random_matrix(6, 2, 3));
  CHECK(std::abs(project(u, x).dot(y) - x.dot(project(u, y))) <= 1e-12);
  const Matrix p = u.projector();
  CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("three-way decomposition, C = 0 and eta = I") {
  const DecompositionReport r = three_way_decompose(Matrix::Zero(2, 4), Matrix::Identity(4, 4));
  REQUIRE(r.parts.size() == 3);
  CHECK(r.parts[0].dim() == 0);
  CHECK(r.parts[1].dim() == 4);
  CHECK(r.parts[2].dim() == 0);
  CHECK(r.dims_sum() == 4);
}

TEST_CASE("three-way decomposition is orthogonal and complete for random data") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    Matrix c = random_matrix(3, 8, 10 + seed);
    Matrix l = random_matrix(8, 4, 20 + seed);
    const Matrix eta = l * l.transpose();
    const DecompositionReport r = three_way_decompose(c, eta);
    CHECK(r.max_overlap() <= 1e-10);
    CHECK(r.dims_sum() == r.decomposed_dim);
    CHECK(r.reconstruction_defect <= 1e-10);
  }
}

TEST_CASE("three-way decomposition rejects indefinite eta") {
  Matrix eta = Matrix::Identity(3, 3);
  eta(2, 2) = -1.0;
  CHECK_THROWS_AS(three_way_decompose(Matrix::Zero(1, 3), eta), Error);
}

TEST_CASE("numerical rank and singular values") {
  Matrix a = random_matrix(7, 5, 4);
  a.col(4) = a.col(1);
  CHECK(numerical_rank(a) == 4);
  CHECK(sparse_rank(SparseMatrix(a.sparseView())) == 4);
  const Vector s = singular_values(a);
  CHECK(s.size() == 5);
  CHECK(s(4) <= 1e-12 * s(0));
}

TEST_CASE("sparse rank of signed patterns matches the dense rank") {
  // Cycle graph incidence scaled by 1/h: rank n - 1.
  const Index n = 30;
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = -7.0;
    d(i, (i + 1) % n) = 7.0;
  }
  CHECK(sparse_rank(SparseMatrix(d.sparseView())) == n - 1);
  CHECK(numerical_rank(d) == n - 1);
  // Random +-1 patterns, with duplicated and negated rows.
  for (unsigned seed = 1; seed <= 20; ++seed) {
    Matrix a = random_matrix(12, 9, seed).unaryExpr([](double x) { return x > 0.6 ? 1.0 : (x < -0.6 ? -1.0 : 0.0); });
    a.row(3) = -a.row(0);
    a.row(5) = a.row(1);
    CHECK(sparse_rank(SparseMatrix(a.sparseView())) == numerical_rank(a));
  }
  // Mixed magnitudes fall back to sparse QR.
  Matrix m = Matrix::Zero(3, 3);
  m << 1, 2, 0, 0, 1, 0, 1, 3, 0;
  CHECK(sparse_rank(SparseMatrix(m.sparseView())) == 2);
  CHECK(sparse_rank(SparseMatrix(3, 4)) == 0);
}

TEST_CASE("singular vectors are finite on incidence matrices with repeated singular values") {
  // Cycle graph incidence: singular values come in exact pairs.
  const Index n = 40;
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = -1.0;
    d(i, (i + 1) % n) = 1.0;
  }
  const Subspace k = kernel(d);
  REQUIRE(k.dim() == 1);
  CHECK(k.basis().allFinite());
  CHECK(range(d).dim() == n - 1);
}
