#pragma once

// Subspace algebra on R^d with orthonormal bases.
//
// All constructions go through dense rank-revealing factorizations (SVD or
// column-pivoted QR). Subspaces are compared through principal angles; two
// bases of the same subspace are never compared entry-wise.

#include <string>
#include <vector>

#include "degen/linalg.hpp"

namespace degen {

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr Index kMaxDenseDim = 20000;

class Subspace {
public:
  /// The zero subspace of R^ambient.
  explicit Subspace(Index ambient);
  /// Throws Model if basis columns are not orthonormal to 1e-12 (scaled by
  /// the column count).
  Subspace(Index ambient, Matrix basis);

  static Subspace full(Index ambient);
  /// Orthonormalizes arbitrary spanning columns (rank decided at tol).
  static Subspace span(const Matrix& columns, double tol = kDefaultRankTol);

  Index ambient() const noexcept { return ambient_; }
  Index dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

  /// Orthogonal projector basis * basis^T (dense, ambient x ambient).
  Matrix projector() const;

private:
  Index ambient_;
  Matrix basis_;
};

/// Orthonormal basis of {x : |Ax| <= tol*|A|*|x|}.
Subspace kernel(const Matrix& a, double tol = kDefaultRankTol);
/// Orthonormal basis of the column space of A (singular values > tol*|A|).
Subspace range(const Matrix& a, double tol = kDefaultRankTol);
/// Singular values in decreasing order.
Vector singular_values(const Matrix& a);
/// Numerical rank with the same relative cutoff as kernel/range.
Index numerical_rank(const Matrix& a, double tol = kDefaultRankTol);
/// Rank of a sparse matrix. Matrices whose nonzeros are all +-c (scaled
/// incidence matrices) are ranked exactly by modular elimination, anything
/// else by a column-pivoted sparse QR.
Index sparse_rank(const SparseMatrix& a, double tol = kDefaultRankTol);

/// U ∩ V. Directions whose principal-angle sine is below tol are kept.
Subspace intersect(const Subspace& u, const Subspace& v, double tol = 1e-8);
Subspace complement(const Subspace& u);
/// (U ∩ V^⊥) for V ⊆ U: the orthogonal difference U ⊖ V.
Subspace orthogonal_difference(const Subspace& u, const Subspace& v, double tol = 1e-8);

Vector project(const Subspace& u, const Vector& x);

/// Principal angles in ascending order (min(dim U, dim V) of them).
Vector principal_angles(const Subspace& u, const Subspace& v);
/// Largest principal angle if the dimensions agree, +infinity otherwise.
double subspace_distance(const Subspace& u, const Subspace& v);
bool same_subspace(const Subspace& u, const Subspace& v, double angle_tol = 1e-10);

/// Subspace spanned by selected coordinate axes.
Subspace coordinate_subspace(Index ambient, const std::vector<Index>& axes);

/// Largest symmetric-part defect |A - A^T| / max(1, |A|) and smallest eigenvalue.
struct SymmetryCheck {
  double symmetry_defect = 0.0;
  double min_eigenvalue = 0.0;
  double norm = 0.0;
};
SymmetryCheck check_symmetric(const Matrix& a);
/// Throws Model unless A is symmetric PSD at tolerance tol (relative to |A|).
void require_symmetric_psd(const Matrix& a, double tol, const std::string& name);

struct DecompositionReport {
  std::vector<std::string> names;
  std::vector<Subspace> parts;
  /// overlaps(i, j) = max |<u_i | v_j>| over basis vectors of parts i and j.
  Matrix overlaps;
  /// max-entry defect of sum of part projectors minus the projector of the
  /// decomposed space
  double reconstruction_defect = 0.0;
  Index decomposed_dim = 0;

  double max_overlap() const;
  Index dims_sum() const;
};

/// Builds the report for given parts of a given space.
DecompositionReport make_decomposition_report(std::vector<std::string> names,
                                              std::vector<Subspace> parts,
                                              const Subspace& whole);

/// H0 = (N(eta) ∩ N(C))^⊥ split into R(C^T), N(C) ∩ R(eta), and the
/// remainder (N(C) ∩ H0) ⊖ (N(C) ∩ R(eta)). Throws Model if eta is not
/// symmetric PSD at tol.
DecompositionReport three_way_decompose(const Matrix& c, const Matrix& eta,
                                        double tol = kDefaultRankTol);

}  // namespace degen
