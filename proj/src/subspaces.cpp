#include "degen/subspaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/SparseQR>
#include <lapacke.h>

#include "degen/error.hpp"

namespace degen {

namespace {

void require_dense_cap(Index rows, Index cols) {
  require(rows <= kMaxDenseDim && cols <= kMaxDenseDim, ErrorKind::Argument,
          "dense subspace construction capped at dimension 20000");
}

// Rank of a matrix whose nonzeros are all +-c, by exact row elimination over
// GF(p). The rank over GF(p) never exceeds the rational rank and equals it
// unless p divides every maximal nonzero minor; the larger of two primes is
// returned. Empty if the entries are not of that form.
std::optional<Index> signed_pattern_rank(const SparseMatrix& a) {
  double c = 0.0;
  for (Index j = 0; j < a.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      if (it.value() == 0.0) continue;
      if (c == 0.0) c = std::abs(it.value());
      if (std::abs(it.value()) != c) return std::nullopt;
    }
  if (c == 0.0) return Index(0);

  using Row = std::vector<std::pair<Index, std::uint64_t>>;
  const SparseMatrix t = a.transpose();  // column-major transpose: rows of a as columns
  auto rank_mod = [&](std::uint64_t p) {
    auto inverse = [p](std::uint64_t x) {
      std::uint64_t r = 1, e = p - 2;
      while (e) {
        if (e & 1) r = r * x % p;
        x = x * x % p;
        e >>= 1;
      }
      return r;
    };
    std::vector<Row> pivot(static_cast<std::size_t>(a.cols()));
    Index rank = 0;
    Row row, merged;
    for (Index i = 0; i < t.outerSize(); ++i) {
      row.clear();
      for (SparseMatrix::InnerIterator it(t, i); it; ++it)
        if (it.value() != 0.0) row.emplace_back(it.index(), it.value() > 0.0 ? 1 : p - 1);
      while (!row.empty()) {
        const Row& piv = pivot[static_cast<std::size_t>(row.front().first)];
        if (piv.empty()) {
          const std::uint64_t s = inverse(row.front().second);
          for (auto& e : row) e.second = e.second * s % p;
          pivot[static_cast<std::size_t>(row.front().first)] = row;
          ++rank;
          break;
        }
        // row -= row.lead * piv
        const std::uint64_t f = p - row.front().second;
        merged.clear();
        std::size_t x = 0, y = 0;
        while (x < row.size() || y < piv.size()) {
          if (y == piv.size() || (x < row.size() && row[x].first < piv[y].first)) {
            merged.push_back(row[x++]);
          } else if (x == row.size() || piv[y].first < row[x].first) {
            merged.emplace_back(piv[y].first, piv[y].second * f % p);
            ++y;
          } else {
            const std::uint64_t v = (row[x].second + piv[y].second * f) % p;
            if (v) merged.emplace_back(row[x].first, v);
            ++x;
            ++y;
          }
        }
        row.swap(merged);
      }
    }
    return rank;
  };
  return std::max(rank_mod(2147483647ull), rank_mod(2147483629ull));
}

struct Svd {
  Vector s;
  Matrix u;  // thin or full, as requested
  Matrix v;  // full when requested
};

// Dense SVD through LAPACK: divide and conquer first, QR iteration if it does
// not converge. Eigen's own BDCSVD breaks down (NaN) on incidence matrices
// with exactly repeated singular values.
Svd svd_of(const Matrix& a, bool want_u, bool want_v) {
  const auto m = static_cast<lapack_int>(a.rows());
  const auto n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  out.s.resize(k);
  if (want_u) out.u.resize(m, k);
  if (want_v) out.v.resize(n, n);
  Matrix vt(want_v ? n : 1, want_v ? n : 1);

  Matrix work = a;
  lapack_int info = 0;
  if (want_u && !want_v) {
    Matrix vt_thin(std::max<lapack_int>(1, k), n);
    info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.s.data(), out.u.data(), m,
                          vt_thin.data(), std::max<lapack_int>(1, k));
    if (info > 0) {
      work = a;
      Vector superb(std::max<lapack_int>(1, k));
      info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'S', 'N', m, n, work.data(), m, out.s.data(), out.u.data(), m,
                            vt_thin.data(), std::max<lapack_int>(1, k), superb.data());
    }
  } else if (want_v) {
    Matrix u_full(m, m);
    info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'A', m, n, work.data(), m, out.s.data(), u_full.data(), m, vt.data(), n);
    if (info > 0) {
      work = a;
      Vector superb(std::max<lapack_int>(1, k));
      info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'N', 'A', m, n, work.data(), m, out.s.data(), u_full.data(), m,
                            vt.data(), n, superb.data());
    }
    if (info == 0) out.v = vt.transpose();
  } else {
    Matrix dummy(1, 1);
    info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, out.s.data(), dummy.data(), 1, dummy.data(),
                          1);
  }
  require(info == 0, ErrorKind::Internal, "SVD did not converge");
  require(out.s.allFinite() && out.u.allFinite() && out.v.allFinite(), ErrorKind::Internal,
          "SVD produced non-finite values");
  return out;
}

}  // namespace

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Vector(0);
  require_dense_cap(a.rows(), a.cols());
  return svd_of(a, false, false).s;
}

Subspace::Subspace(Index ambient) : ambient_(ambient), basis_(ambient, 0) {
  require(ambient >= 0, ErrorKind::Argument, "subspace: negative ambient dimension");
}

Subspace::Subspace(Index ambient, Matrix basis) : ambient_(ambient), basis_(std::move(basis)) {
  require(basis_.rows() == ambient_, ErrorKind::Dimension, "subspace: basis rows != ambient dimension");
  require(basis_.cols() <= ambient_, ErrorKind::Dimension, "subspace: more basis vectors than ambient dimension");
  require(basis_.allFinite(), ErrorKind::Internal, "subspace: basis has non-finite entries");
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.transpose() * basis_;
    const double defect = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    const double allowed = 1e-12 * std::max<double>(1.0, static_cast<double>(basis_.cols()));
    if (defect > allowed) {
      std::ostringstream msg;
      msg << "subspace: basis not orthonormal (Gram defect " << defect << ")";
      fail(ErrorKind::Model, msg.str());
    }
  }
}

Subspace Subspace::full(Index ambient) { return Subspace(ambient, Matrix::Identity(ambient, ambient)); }

Subspace Subspace::span(const Matrix& columns, double tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return Subspace(columns.rows());
  return range(columns, tol);
}

Matrix Subspace::projector() const { return basis_ * basis_.transpose(); }

Subspace kernel(const Matrix& a, double tol) {
  require(a.cols() > 0, ErrorKind::Argument, "kernel: empty operator matrix");
  require(tol > 0.0, ErrorKind::Argument, "kernel: tolerance must be positive");
  require_dense_cap(a.rows(), a.cols());
  const Index d = a.cols();
  if (a.rows() == 0) return Subspace::full(d);
  const Svd svd = svd_of(a, false, true);
  const Vector& s = svd.s;
  const double norm = s.size() > 0 ? s(0) : 0.0;
  if (norm == 0.0) return Subspace::full(d);
  Index rank = 0;
  while (rank < s.size() && s(rank) > tol * norm) ++rank;
  return Subspace(d, svd.v.rightCols(d - rank));
}

Subspace range(const Matrix& a, double tol) {
  require(a.cols() > 0 && a.rows() > 0, ErrorKind::Argument, "range: empty operator matrix");
  require(tol > 0.0, ErrorKind::Argument, "range: tolerance must be positive");
  require_dense_cap(a.rows(), a.cols());
  const Svd svd = svd_of(a, true, false);
  const Vector& s = svd.s;
  const double norm = s.size() > 0 ? s(0) : 0.0;
  if (norm == 0.0) return Subspace(a.rows());
  Index rank = 0;
  while (rank < s.size() && s(rank) > tol * norm) ++rank;
  return Subspace(a.rows(), svd.u.leftCols(rank));
}

Index numerical_rank(const Matrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  require_dense_cap(a.rows(), a.cols());
  const Vector s = svd_of(a, false, false).s;
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index rank = 0;
  while (rank < s.size() && s(rank) > tol * s(0)) ++rank;
  return rank;
}

Index sparse_rank(const SparseMatrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  if (const auto r = signed_pattern_rank(a)) return *r;
  SparseMatrix m = a;
  m.makeCompressed();
  double max_col = 0.0;
  for (Index j = 0; j < m.outerSize(); ++j) max_col = std::max(max_col, m.col(j).norm());
  if (max_col == 0.0) return 0;
  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(tol * max_col);
  qr.compute(m);
  require(qr.info() == Eigen::Success, ErrorKind::Internal, "sparse_rank: QR factorization failed");
  return qr.rank();
}

Subspace intersect(const Subspace& u, const Subspace& v, double tol) {
  require(u.ambient() == v.ambient(), ErrorKind::Dimension, "intersect: ambient dimensions differ");
  if (u.dim() == 0 || v.dim() == 0) return Subspace(u.ambient());
  // Directions of U left unchanged by the projector onto V.
  const Matrix residual = u.basis() - v.basis() * (v.basis().transpose() * u.basis());
  const Svd svd = svd_of(residual, false, true);
  const Vector& s = svd.s;
  std::vector<Index> keep;
  for (Index i = 0; i < u.dim(); ++i) {
    const double sigma = i < s.size() ? s(i) : 0.0;
    if (sigma <= tol) keep.push_back(i);
  }
  if (keep.empty()) return Subspace(u.ambient());
  Matrix coeffs(u.dim(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) coeffs.col(static_cast<Index>(j)) = svd.v.col(keep[j]);
  // Symmetric average of both representations, then re-orthonormalize.
  Matrix w = u.basis() * coeffs;
  w = 0.5 * (w + v.basis() * (v.basis().transpose() * w));
  Eigen::HouseholderQR<Matrix> qr(w);
  Matrix q = qr.householderQ() * Matrix::Identity(w.rows(), w.cols());
  return Subspace(u.ambient(), std::move(q));
}

Subspace complement(const Subspace& u) {
  const Index d = u.ambient();
  if (u.dim() == 0) return Subspace::full(d);
  if (u.dim() == d) return Subspace(d);
  Eigen::HouseholderQR<Matrix> qr(u.basis());
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return Subspace(d, q.rightCols(d - u.dim()));
}

Subspace orthogonal_difference(const Subspace& u, const Subspace& v, double tol) {
  return intersect(u, complement(v), tol);
}

Vector project(const Subspace& u, const Vector& x) {
  require(x.size() == u.ambient(), ErrorKind::Dimension, "project: vector dimension mismatch");
  if (u.dim() == 0) return Vector::Zero(x.size());
  return u.basis() * (u.basis().transpose() * x);
}

Vector principal_angles(const Subspace& u, const Subspace& v) {
  require(u.ambient() == v.ambient(), ErrorKind::Dimension, "principal_angles: ambient dimensions differ");
  const Subspace& small = u.dim() <= v.dim() ? u : v;
  const Subspace& large = u.dim() <= v.dim() ? v : u;
  if (small.dim() == 0) return Vector(0);
  // Sines from the residual keep small angles accurate; cosines cover the rest.
  const Matrix residual = small.basis() - large.basis() * (large.basis().transpose() * small.basis());
  Vector sines = singular_values(residual);
  Vector angles(small.dim());
  for (Index i = 0; i < small.dim(); ++i) {
    const double s = std::clamp(i < sines.size() ? sines(i) : 0.0, 0.0, 1.0);
    angles(i) = std::asin(s);
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

double subspace_distance(const Subspace& u, const Subspace& v) {
  if (u.dim() != v.dim()) return std::numeric_limits<double>::infinity();
  if (u.dim() == 0) return 0.0;
  return principal_angles(u, v).maxCoeff();
}

bool same_subspace(const Subspace& u, const Subspace& v, double angle_tol) {
  return subspace_distance(u, v) <= angle_tol;
}

Subspace coordinate_subspace(Index ambient, const std::vector<Index>& axes) {
  Matrix b = Matrix::Zero(ambient, static_cast<Index>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    require(axes[j] >= 0 && axes[j] < ambient, ErrorKind::Dimension, "coordinate_subspace: axis out of range");
    b(axes[j], static_cast<Index>(j)) = 1.0;
  }
  return Subspace(ambient, std::move(b));
}

SymmetryCheck check_symmetric(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorKind::Dimension, "symmetry check: matrix not square");
  SymmetryCheck out;
  if (a.size() == 0) return out;
  out.norm = a.cwiseAbs().maxCoeff();
  const double scale = std::max(out.norm, std::numeric_limits<double>::min());
  out.symmetry_defect = (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues()(0);
  return out;
}

void require_symmetric_psd(const Matrix& a, double tol, const std::string& name) {
  const SymmetryCheck c = check_symmetric(a);
  if (c.symmetry_defect > tol) {
    std::ostringstream msg;
    msg << name << " is not symmetric (relative defect " << c.symmetry_defect << ")";
    fail(ErrorKind::Model, msg.str());
  }
  if (c.min_eigenvalue < -tol * std::max(1.0, c.norm)) {
    std::ostringstream msg;
    msg << name << " is not positive semidefinite (smallest eigenvalue " << c.min_eigenvalue << ")";
    fail(ErrorKind::Model, msg.str());
  }
}

double DecompositionReport::max_overlap() const { return overlaps.size() ? overlaps.maxCoeff() : 0.0; }

Index DecompositionReport::dims_sum() const {
  Index s = 0;
  for (const auto& p : parts) s += p.dim();
  return s;
}

DecompositionReport make_decomposition_report(std::vector<std::string> names,
                                              std::vector<Subspace> parts,
                                              const Subspace& whole) {
  require(names.size() == parts.size(), ErrorKind::Argument, "decomposition report: names/parts mismatch");
  DecompositionReport r;
  r.names = std::move(names);
  r.parts = std::move(parts);
  r.decomposed_dim = whole.dim();
  const auto k = static_cast<Index>(r.parts.size());
  r.overlaps = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (i == j || r.parts[i].dim() == 0 || r.parts[j].dim() == 0) continue;
      r.overlaps(i, j) = (r.parts[i].basis().transpose() * r.parts[j].basis()).cwiseAbs().maxCoeff();
    }
  }
  Matrix sum = Matrix::Zero(whole.ambient(), whole.ambient());
  for (const auto& p : r.parts) {
    require(p.ambient() == whole.ambient(), ErrorKind::Dimension, "decomposition report: ambient mismatch");
    if (p.dim() > 0) sum += p.projector();
  }
  if (whole.dim() > 0) sum -= whole.projector();
  r.reconstruction_defect = sum.size() ? sum.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

DecompositionReport three_way_decompose(const Matrix& c, const Matrix& eta, double tol) {
  require(eta.rows() == eta.cols(), ErrorKind::Dimension, "three_way_decompose: eta not square");
  require(c.cols() == eta.cols(), ErrorKind::Dimension, "three_way_decompose: C and eta act on different spaces");
  require_symmetric_psd(eta, tol, "eta");
  const Index d = eta.cols();
  const Subspace n_eta = kernel(eta, tol);
  const Subspace n_c = c.rows() > 0 ? kernel(c, tol) : Subspace::full(d);
  const Subspace h0 = complement(intersect(n_eta, n_c));
  const Subspace r_cstar = c.rows() > 0 ? range(c.transpose(), tol) : Subspace(d);
  const Subspace r_eta = range(eta, tol);
  const Subspace h1 = intersect(n_c, r_eta);
  const Subspace h2 = orthogonal_difference(intersect(n_c, h0), h1);
  return make_decomposition_report({"range_Cstar", "kernel_C_cap_range_eta", "remainder"},
                                   {r_cstar, h1, h2}, h0);
}

}  // namespace degen
