#pragma once

// Staggered grad/curl/div complex on the unit cube with n cells per axis.
//
// Unknowns: nodal values at interior nodes, tangential components on edges
// that are not tangential to the boundary, normal components on faces whose
// normal index is interior. Every operator is incidence/h; all entity
// volumes are h^3 on a uniform grid, so Euclidean transposes are the L2
// adjoints.
//
// Conducting region: union of cell boxes [lo, hi) per axis, each at least
// one cell away from the boundary. An edge is conducting if it lies in the
// closed conductor (some adjacent cell conducts).

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "degen/linalg.hpp"

namespace degen {

/// Cell index ranges {lo_x, hi_x, lo_y, hi_y, lo_z, hi_z}, half-open.
using CellBox = std::array<int, 6>;

struct EdgeInfo {
  int axis;     // 0, 1, 2
  int i, j, k;  // lower endpoint
};

struct FaceInfo {
  int axis;     // normal direction
  int i, j, k;  // lower corner
};

class StaggeredMesh {
public:
  int n = 0;
  double h = 0.0;
  std::vector<CellBox> boxes;

  std::vector<EdgeInfo> edges;  // interior edges in DOF order
  std::vector<FaceInfo> faces;  // faces with interior normal index
  /// Component label of each cell (-1 outside the conductor).
  std::vector<int> cell_component;
  int components = 0;

  /// Per interior node: component whose closure contains it, or -1.
  std::vector<int> node_component;
  /// Per interior node: all 8 adjacent cells conduct.
  std::vector<char> node_conductor_interior;
  /// Per edge: lies in the closed conductor.
  std::vector<char> edge_conducting;
  /// Per edge: all 4 adjacent cells conduct.
  std::vector<char> edge_conductor_interior;
  /// Per face: both adjacent cells conduct / neither does.
  std::vector<char> face_conductor_interior;
  std::vector<char> face_outside;

  Index node_count() const noexcept { return Index(n - 1) * (n - 1) * (n - 1); }
  Index edge_count() const noexcept { return static_cast<Index>(edges.size()); }
  Index face_count() const noexcept { return static_cast<Index>(faces.size()); }
  Index cell_count() const noexcept { return Index(n) * n * n; }

  /// Interior node (1..n-1)^3 to DOF index, -1 for boundary nodes.
  Index node_index(int i, int j, int k) const noexcept;
  Index cell_index(int i, int j, int k) const noexcept { return (Index(k) * n + j) * n + i; }
  bool cell_conducting(int i, int j, int k) const noexcept;

  /// Conducting edge DOF indices in increasing order.
  std::vector<Index> conducting_edges() const;

  std::array<double, 3> node_position(Index node) const;
  std::array<double, 3> edge_midpoint(Index e) const;
  std::array<double, 3> face_center(Index f) const;
};

/// Throws Argument for n < 2 or malformed boxes; Certification (naming
/// conductor_interior or conductor_components) if a box touches the
/// boundary layer or two components have intersecting closures.
StaggeredMesh build_mesh(int n, const std::vector<CellBox>& boxes = {});

struct ComplexOperators {
  SparseMatrix grad0;  // edges x nodes
  SparseMatrix curl0;  // faces x edges
  SparseMatrix div;    // cells x faces
  // Unconstrained operators on all nodes/edges/faces of the grid.
  SparseMatrix grad_full;
  SparseMatrix curl_full;
  SparseMatrix div_full;
  Index grad_rank = 0;
  Index curl_kernel_dim = 0;
};

ComplexOperators build_operators(const StaggeredMesh& mesh);

struct HypothesisCheck {
  std::string id;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> values;
};

struct KernelLocalizationReport {
  std::vector<HypothesisCheck> checks;
  bool pass() const;
};

/// Rank checks of the localized complexes: exactness on the box, kernel
/// localization outside and inside the conductor, the extension property
/// of nodal functions on the closed conductor, and closed ranges.
KernelLocalizationReport check_kernel_localization(const StaggeredMesh& mesh, const ComplexOperators& ops);

/// G = grad0 * Ext: gradients of nodal functions vanishing on the boundary
/// and constant on each conductor component.
struct DiamondGrad {
  SparseMatrix ext;  // nodes x multipliers
  SparseMatrix g;    // edges x multipliers
  Index free_nodes = 0;
  int components = 0;

  Index multiplier_dim() const noexcept { return g.cols(); }
};

/// Throws Internal if G is not injective.
DiamondGrad build_diamond_grad(const StaggeredMesh& mesh, const ComplexOperators& ops);

}  // namespace degen
