#include <cmath>
#include <vector>

#include "degen/degenerate_parabolic.hpp"
#include "degen/error.hpp"

namespace degen {

BidomainPreset make_bidomain(int dimension, int size, double sigma1, double sigma2) {
  require(dimension == 1 || dimension == 2, ErrorKind::Argument, "bidomain: dimension must be 1 or 2");
  require(size >= 2, ErrorKind::Argument, "bidomain: need at least 2 nodes per axis");
  require(sigma1 > 0.0 && sigma2 > 0.0, ErrorKind::Argument, "bidomain: sigma1, sigma2 must be positive");

  BidomainPreset b;
  b.dimension = dimension;
  b.size = size;
  b.sigma1 = sigma1;
  b.sigma2 = sigma2;

  const double inv_h = static_cast<double>(size - 1);
  const Index nodes = dimension == 1 ? size : Index(size) * size;
  auto id = [size](int i, int j) { return Index(j) * size + i; };
  std::vector<Triplet> t;
  Index edge = 0;
  if (dimension == 1) {
    for (int i = 0; i + 1 < size; ++i, ++edge) {
      t.emplace_back(edge, i, -inv_h);
      t.emplace_back(edge, i + 1, inv_h);
    }
  } else {
    for (int j = 0; j < size; ++j)
      for (int i = 0; i + 1 < size; ++i, ++edge) {
        t.emplace_back(edge, id(i, j), -inv_h);
        t.emplace_back(edge, id(i + 1, j), inv_h);
      }
    for (int j = 0; j + 1 < size; ++j)
      for (int i = 0; i < size; ++i, ++edge) {
        t.emplace_back(edge, id(i, j), -inv_h);
        t.emplace_back(edge, id(i, j + 1), inv_h);
      }
  }
  b.grad.resize(edge, nodes);
  b.grad.setFromTriplets(t.begin(), t.end());

  const Matrix g(b.grad);
  const Matrix id_n = Matrix::Identity(nodes, nodes);
  b.eta.resize(2 * nodes, 2 * nodes);
  b.eta << id_n, id_n, id_n, id_n;
  b.c = Matrix::Zero(2 * edge, 2 * nodes);
  b.c.topLeftCorner(edge, nodes) = std::sqrt(sigma1) * g;
  b.c.bottomRightCorner(edge, nodes) = std::sqrt(sigma2) * g;
  return b;
}

double bidomain_poincare_c_squared(const BidomainPreset& b) {
  const Index n = b.nodes();
  const Subspace constants = Subspace::span(Matrix::Ones(n, 1));
  const Matrix q = complement(constants).basis();
  const Matrix g(b.grad);
  const Matrix form = q.transpose() * (g.transpose() * g) * q;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (form + form.transpose()), Eigen::EigenvaluesOnly);
  return std::min(b.sigma1, b.sigma2) * es.eigenvalues()(0);
}

Vector bidomain_kernel_direction(const BidomainPreset& b) {
  const Index n = b.nodes();
  Vector v(2 * n);
  v.head(n).setOnes();
  v.tail(n).setConstant(-1.0);
  return v / v.norm();
}

}  // namespace degen
