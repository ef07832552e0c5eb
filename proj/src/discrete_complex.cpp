#include "degen/discrete_complex.hpp"

#include <algorithm>
#include <sstream>

#include "degen/error.hpp"
#include "degen/subspaces.hpp"

namespace degen {

namespace {

using Point = std::array<int, 3>;

// Numbering of the unconstrained grid: nodes (n+1)^3, edges of axis a with
// n cells along a and n+1 nodes across, faces the other way round.
struct Lattice {
  int n;

  Index node(const Point& p) const { return (Index(p[2]) * (n + 1) + p[1]) * (n + 1) + p[0]; }
  Index nodes() const { return Index(n + 1) * (n + 1) * (n + 1); }

  Point edge_dims(int a) const { return {a == 0 ? n : n + 1, a == 1 ? n : n + 1, a == 2 ? n : n + 1}; }
  Point face_dims(int a) const { return {a == 0 ? n + 1 : n, a == 1 ? n + 1 : n, a == 2 ? n + 1 : n}; }
  static Index count(const Point& d) { return Index(d[0]) * d[1] * d[2]; }
  static Index local(const Point& d, const Point& p) { return (Index(p[2]) * d[1] + p[1]) * d[0] + p[0]; }

  Index edge(int a, const Point& p) const {
    Index off = 0;
    for (int b = 0; b < a; ++b) off += count(edge_dims(b));
    return off + local(edge_dims(a), p);
  }
  Index edges() const { return 3 * count(edge_dims(0)); }
  Index face(int a, const Point& p) const {
    Index off = 0;
    for (int b = 0; b < a; ++b) off += count(face_dims(b));
    return off + local(face_dims(a), p);
  }
  Index faces() const { return 3 * count(face_dims(0)); }
  Index cell(const Point& p) const { return (Index(p[2]) * n + p[1]) * n + p[0]; }
};

template <class F>
void for_each_point(const Point& dims, F&& f) {
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) f(Point{i, j, k});
}

Point shifted(Point p, int axis, int by = 1) {
  p[axis] += by;
  return p;
}

SparseMatrix select_rows(const SparseMatrix& a, const std::vector<Index>& rows) {
  SparseMatrix s(static_cast<Index>(rows.size()), a.rows());
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows.size(); ++r) t.emplace_back(static_cast<Index>(r), rows[r], 1.0);
  s.setFromTriplets(t.begin(), t.end());
  return s * a;
}

SparseMatrix select_cols(const SparseMatrix& a, const std::vector<Index>& cols) {
  SparseMatrix s(a.cols(), static_cast<Index>(cols.size()));
  std::vector<Triplet> t;
  for (std::size_t c = 0; c < cols.size(); ++c) t.emplace_back(cols[c], static_cast<Index>(c), 1.0);
  s.setFromTriplets(t.begin(), t.end());
  return a * s;
}

std::vector<Index> where(const std::vector<char>& mask, bool value = true) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (static_cast<bool>(mask[i]) == value) out.push_back(static_cast<Index>(i));
  return out;
}

Index kernel_dim(const SparseMatrix& a) { return a.cols() - sparse_rank(a); }

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (Index j = 0; j < a.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace

Index StaggeredMesh::node_index(int i, int j, int k) const noexcept {
  if (i < 1 || j < 1 || k < 1 || i > n - 1 || j > n - 1 || k > n - 1) return -1;
  return (Index(k - 1) * (n - 1) + (j - 1)) * (n - 1) + (i - 1);
}

bool StaggeredMesh::cell_conducting(int i, int j, int k) const noexcept {
  if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return false;
  return cell_component[static_cast<std::size_t>(cell_index(i, j, k))] >= 0;
}

std::vector<Index> StaggeredMesh::conducting_edges() const { return where(edge_conducting); }

std::array<double, 3> StaggeredMesh::node_position(Index node) const {
  const Index m = n - 1;
  return {double(node % m + 1) * h, double((node / m) % m + 1) * h, double(node / (m * m) + 1) * h};
}

std::array<double, 3> StaggeredMesh::edge_midpoint(Index e) const {
  const EdgeInfo& x = edges[static_cast<std::size_t>(e)];
  std::array<double, 3> p{x.i * h, x.j * h, x.k * h};
  p[static_cast<std::size_t>(x.axis)] += 0.5 * h;
  return p;
}

std::array<double, 3> StaggeredMesh::face_center(Index f) const {
  const FaceInfo& x = faces[static_cast<std::size_t>(f)];
  std::array<double, 3> p{(x.i + 0.5) * h, (x.j + 0.5) * h, (x.k + 0.5) * h};
  p[static_cast<std::size_t>(x.axis)] -= 0.5 * h;
  return p;
}

StaggeredMesh build_mesh(int n, const std::vector<CellBox>& boxes) {
  require(n >= 2, ErrorKind::Argument, "mesh: need at least 2 cells per axis");
  StaggeredMesh m;
  m.n = n;
  m.h = 1.0 / n;
  m.boxes = boxes;
  m.cell_component.assign(static_cast<std::size_t>(m.cell_count()), -1);

  std::vector<char> in_box(static_cast<std::size_t>(m.cell_count()), 0);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const CellBox& box = boxes[b];
    for (int a = 0; a < 3; ++a) {
      const int lo = box[2 * a];
      const int hi = box[2 * a + 1];
      if (!(0 <= lo && lo < hi && hi <= n)) {
        std::ostringstream msg;
        msg << "mesh: conducting box " << b << " has an empty or out-of-range extent on axis " << a;
        fail(ErrorKind::Argument, msg.str());
      }
      if (lo < 1 || hi > n - 1) {
        std::ostringstream msg;
        msg << "hypothesis conductor_interior violated: closure of conducting box " << b
            << " is not strictly inside the domain (needs 1 <= lo and hi <= " << n - 1 << " on axis " << a << ")";
        fail(ErrorKind::Certification, msg.str());
      }
    }
    for (int k = box[4]; k < box[5]; ++k)
      for (int j = box[2]; j < box[3]; ++j)
        for (int i = box[0]; i < box[1]; ++i) in_box[static_cast<std::size_t>(m.cell_index(i, j, k))] = 1;
  }

  // Components of the open conductor: cells joined through shared faces.
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const auto start = static_cast<std::size_t>(m.cell_index(i, j, k));
        if (!in_box[start] || m.cell_component[start] >= 0) continue;
        const int label = m.components++;
        std::vector<Point> stack{{i, j, k}};
        m.cell_component[start] = label;
        while (!stack.empty()) {
          const Point p = stack.back();
          stack.pop_back();
          for (int a = 0; a < 3; ++a)
            for (int s : {-1, 1}) {
              const Point q = shifted(p, a, s);
              if (q[a] < 0 || q[a] >= n) continue;
              const auto id = static_cast<std::size_t>(m.cell_index(q[0], q[1], q[2]));
              if (in_box[id] && m.cell_component[id] < 0) {
                m.cell_component[id] = label;
                stack.push_back(q);
              }
            }
        }
      }

  const int nm = n - 1;
  m.node_component.assign(static_cast<std::size_t>(m.node_count()), -1);
  m.node_conductor_interior.assign(static_cast<std::size_t>(m.node_count()), 0);
  for (int k = 1; k <= nm; ++k)
    for (int j = 1; j <= nm; ++j)
      for (int i = 1; i <= nm; ++i) {
        const auto id = static_cast<std::size_t>(m.node_index(i, j, k));
        int all = 1;
        for (int dk = -1; dk <= 0; ++dk)
          for (int dj = -1; dj <= 0; ++dj)
            for (int di = -1; di <= 0; ++di) {
              if (!m.cell_conducting(i + di, j + dj, k + dk)) {
                all = 0;
                continue;
              }
              const int c = m.cell_component[static_cast<std::size_t>(m.cell_index(i + di, j + dj, k + dk))];
              if (m.node_component[id] >= 0 && m.node_component[id] != c) {
                std::ostringstream msg;
                msg << "hypothesis conductor_components violated: closures of conductor components "
                    << m.node_component[id] << " and " << c << " meet at node (" << i << "," << j << "," << k << ")";
                fail(ErrorKind::Certification, msg.str());
              }
              m.node_component[id] = c;
            }
        m.node_conductor_interior[id] = static_cast<char>(all);
      }

  // Interior edges: both transverse indices in 1..n-1.
  for (int a = 0; a < 3; ++a) {
    Point dims{n + 1, n + 1, n + 1};
    dims[a] = n;
    for_each_point(dims, [&](const Point& p) {
      for (int b = 0; b < 3; ++b)
        if (b != a && (p[b] < 1 || p[b] > nm)) return;
      m.edges.push_back({a, p[0], p[1], p[2]});
      int any = 0;
      int all = 1;
      const int b = (a + 1) % 3;
      const int c = (a + 2) % 3;
      for (int db = -1; db <= 0; ++db)
        for (int dc = -1; dc <= 0; ++dc) {
          Point q = p;
          q[b] += db;
          q[c] += dc;
          const bool on = m.cell_conducting(q[0], q[1], q[2]);
          any |= on;
          all &= on;
        }
      m.edge_conducting.push_back(static_cast<char>(any));
      m.edge_conductor_interior.push_back(static_cast<char>(all));
    });
  }

  // Faces with interior normal index.
  for (int a = 0; a < 3; ++a) {
    Point dims{n, n, n};
    dims[a] = n + 1;
    for_each_point(dims, [&](const Point& p) {
      if (p[a] < 1 || p[a] > nm) return;
      m.faces.push_back({a, p[0], p[1], p[2]});
      const Point lower = shifted(p, a, -1);
      const bool c0 = m.cell_conducting(lower[0], lower[1], lower[2]);
      const bool c1 = m.cell_conducting(p[0], p[1], p[2]);
      m.face_conductor_interior.push_back(static_cast<char>(c0 && c1));
      m.face_outside.push_back(static_cast<char>(!c0 && !c1));
    });
  }
  return m;
}

ComplexOperators build_operators(const StaggeredMesh& mesh) {
  const int n = mesh.n;
  const Lattice lat{n};
  const double s = 1.0 / mesh.h;
  ComplexOperators ops;

  std::vector<Triplet> t;
  for (int a = 0; a < 3; ++a)
    for_each_point(lat.edge_dims(a), [&](const Point& p) {
      const Index e = lat.edge(a, p);
      t.emplace_back(e, lat.node(shifted(p, a)), s);
      t.emplace_back(e, lat.node(p), -s);
    });
  ops.grad_full.resize(lat.edges(), lat.nodes());
  ops.grad_full.setFromTriplets(t.begin(), t.end());

  t.clear();
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    for_each_point(lat.face_dims(a), [&](const Point& p) {
      const Index f = lat.face(a, p);
      t.emplace_back(f, lat.edge(c, shifted(p, b)), s);
      t.emplace_back(f, lat.edge(c, p), -s);
      t.emplace_back(f, lat.edge(b, shifted(p, c)), -s);
      t.emplace_back(f, lat.edge(b, p), s);
    });
  }
  ops.curl_full.resize(lat.faces(), lat.edges());
  ops.curl_full.setFromTriplets(t.begin(), t.end());

  t.clear();
  for_each_point({n, n, n}, [&](const Point& p) {
    const Index cell = lat.cell(p);
    for (int a = 0; a < 3; ++a) {
      t.emplace_back(cell, lat.face(a, shifted(p, a)), s);
      t.emplace_back(cell, lat.face(a, p), -s);
    }
  });
  ops.div_full.resize(Index(n) * n * n, lat.faces());
  ops.div_full.setFromTriplets(t.begin(), t.end());

  std::vector<Index> node_sel(static_cast<std::size_t>(mesh.node_count()));
  for (int k = 1; k < n; ++k)
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        node_sel[static_cast<std::size_t>(mesh.node_index(i, j, k))] = lat.node({i, j, k});
  std::vector<Index> edge_sel;
  for (const EdgeInfo& e : mesh.edges) edge_sel.push_back(lat.edge(e.axis, {e.i, e.j, e.k}));
  std::vector<Index> face_sel;
  for (const FaceInfo& f : mesh.faces) face_sel.push_back(lat.face(f.axis, {f.i, f.j, f.k}));

  ops.grad0 = select_cols(select_rows(ops.grad_full, edge_sel), node_sel);
  ops.curl0 = select_cols(select_rows(ops.curl_full, face_sel), edge_sel);
  ops.div = select_cols(ops.div_full, face_sel);
  ops.grad0.prune(0.0);
  ops.curl0.prune(0.0);
  ops.div.prune(0.0);

  ops.grad_rank = sparse_rank(ops.grad0);
  ops.curl_kernel_dim = kernel_dim(ops.curl0);
  return ops;
}

bool KernelLocalizationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass; });
}

KernelLocalizationReport check_kernel_localization(const StaggeredMesh& mesh, const ComplexOperators& ops) {
  KernelLocalizationReport r;

  {
    HypothesisCheck c{"exact_sequence", false, "", {}};
    const double cg = max_abs(SparseMatrix(ops.curl0 * ops.grad0));
    const double dc = max_abs(SparseMatrix(ops.div_full * ops.curl_full));
    const double dc0 = max_abs(SparseMatrix(ops.div * ops.curl0));
    c.values = {{"max_curl0_grad0", cg},
                {"max_div_curl", std::max(dc, dc0)},
                {"rank_grad0", double(ops.grad_rank)},
                {"dim_kernel_curl0", double(ops.curl_kernel_dim)}};
    c.pass = cg <= 1e-14 && dc <= 1e-14 && dc0 <= 1e-14 && ops.grad_rank == ops.curl_kernel_dim;
    c.detail = "curl0 grad0 = 0, div curl = 0, no harmonic Dirichlet fields on the box";
    r.checks.push_back(std::move(c));
  }

  const std::vector<Index> out_edges = where(mesh.edge_conducting, false);
  std::vector<Index> outside_nodes;
  std::vector<Index> closure_nodes;
  for (std::size_t i = 0; i < mesh.node_component.size(); ++i)
    (mesh.node_component[i] < 0 ? outside_nodes : closure_nodes).push_back(static_cast<Index>(i));

  {
    HypothesisCheck c{"kernel_localization_outside", false, "", {}};
    const SparseMatrix restricted = select_cols(ops.curl0, out_edges);
    const SparseMatrix sub = select_rows(restricted, where(mesh.face_outside));
    const SparseMatrix grad_out = select_cols(select_rows(ops.grad0, out_edges), outside_nodes);
    const Index k_global = kernel_dim(restricted);
    const Index k_sub = kernel_dim(sub);
    const Index r_grad = sparse_rank(grad_out);
    c.values = {{"dim_kernel_curl0_on_outside_fields", double(k_global)},
                {"dim_kernel_outside_curl", double(k_sub)},
                {"rank_outside_grad", double(r_grad)},
                {"harmonic_dim", double(k_sub - r_grad)},
                {"components", double(mesh.components)}};
    c.pass = k_global == k_sub && k_sub - r_grad == mesh.components;
    c.detail = "curl-free fields vanishing on the conductor = kernel of the exterior curl; "
               "exterior harmonic fields, one per conductor component";
    r.checks.push_back(std::move(c));
  }

  {
    HypothesisCheck c{"kernel_localization_conductor", false, "", {}};
    const std::vector<Index> in_edges = where(mesh.edge_conductor_interior);
    const SparseMatrix restricted = select_cols(ops.curl0, in_edges);
    const SparseMatrix sub = select_rows(restricted, where(mesh.face_conductor_interior));
    const SparseMatrix grad_in = select_cols(select_rows(ops.grad0, in_edges), where(mesh.node_conductor_interior));
    const Index k_global = kernel_dim(restricted);
    const Index k_sub = kernel_dim(sub);
    const Index r_grad = sparse_rank(grad_in);
    c.values = {{"dim_kernel_curl0_on_conductor_fields", double(k_global)},
                {"dim_kernel_conductor_curl", double(k_sub)},
                {"rank_conductor_grad", double(r_grad)}};
    c.pass = k_global == k_sub && k_sub == r_grad;
    c.detail = "curl-free fields inside the conductor = kernel of the conductor curl = gradients";
    r.checks.push_back(std::move(c));
  }

  {
    HypothesisCheck c{"extension", false, "", {}};
    SparseMatrix restriction = select_rows(SparseMatrix(Matrix::Identity(mesh.node_count(), mesh.node_count()).sparseView()),
                                           closure_nodes);
    const Index rank = sparse_rank(restriction);
    c.values = {{"closure_nodes", double(closure_nodes.size())}, {"restriction_rank", double(rank)}};
    c.pass = rank == static_cast<Index>(closure_nodes.size());
    c.detail = "every nodal function on the closed conductor extends to an interior nodal function";
    r.checks.push_back(std::move(c));
  }

  r.checks.push_back({"closed_range", true, "finite dimensional: every range is closed", {}});
  return r;
}

DiamondGrad build_diamond_grad(const StaggeredMesh& mesh, const ComplexOperators& ops) {
  DiamondGrad d;
  d.components = mesh.components;
  std::vector<Index> column(mesh.node_component.size());
  for (std::size_t i = 0; i < mesh.node_component.size(); ++i)
    if (mesh.node_component[i] < 0) column[i] = d.free_nodes++;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < mesh.node_component.size(); ++i) {
    const int c = mesh.node_component[i];
    t.emplace_back(static_cast<Index>(i), c < 0 ? column[i] : d.free_nodes + c, 1.0);
  }
  d.ext.resize(mesh.node_count(), d.free_nodes + d.components);
  d.ext.setFromTriplets(t.begin(), t.end());
  d.g = ops.grad0 * d.ext;
  d.g.prune(0.0);
  const Index rank = sparse_rank(d.g);
  if (rank != d.g.cols()) {
    std::ostringstream msg;
    msg << "diamond gradient is not injective: rank " << rank << " < " << d.g.cols();
    fail(ErrorKind::Internal, msg.str());
  }
  return d;
}

}  // namespace degen
