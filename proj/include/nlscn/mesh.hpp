#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nlscn/types.hpp"

namespace nlscn {

enum class BoundaryKind { dirichlet, periodic };

const char* to_string(BoundaryKind kind);
BoundaryKind boundary_kind_from_string(const std::string& s);

struct Bounds {
  double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
  double width() const { return bx - ax; }
  double height() const { return by - ay; }
  bool operator==(const Bounds&) const = default;
};

struct Point {
  double x = 0.0, y = 0.0;
};

/// Structured P1 triangulation of a rectangle. Every cell is split along its
/// lower-left to upper-right diagonal. Nodes are numbered i + j (nx + 1).
///
/// Degrees of freedom: interior nodes for Dirichlet ((nx-1)(ny-1) of them),
/// or nodes modulo the period for periodic meshes (nx ny of them; corners
/// are identified four-way).
class RectMesh {
 public:
  RectMesh(Bounds bounds, int nx, int ny, BoundaryKind bc);

  const Bounds& bounds() const { return bounds_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  /// max(dx, dy)
  double h() const { return std::max(dx_, dy_); }
  BoundaryKind bc() const { return bc_; }

  int num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  int num_elements() const { return 2 * nx_ * ny_; }
  int num_dofs() const { return num_dofs_; }
  /// Width of the dof grid along x (nx - 1 for Dirichlet, nx for periodic).
  int dof_nx() const { return bc_ == BoundaryKind::dirichlet ? nx_ - 1 : nx_; }
  int dof_ny() const { return bc_ == BoundaryKind::dirichlet ? ny_ - 1 : ny_; }

  int node_index(int i, int j) const { return i + j * (nx_ + 1); }
  Point node(int node) const;
  /// -1 for Dirichlet boundary nodes.
  int dof_of_node(int node) const { return dof_of_node_[node]; }
  std::span<const int> dof_map() const { return dof_of_node_; }
  /// Representative node (i, j) with the smallest indices for a dof.
  int node_of_dof(int dof) const;
  Point dof_point(int dof) const { return node(node_of_dof(dof)); }

  std::span<const std::array<int, 3>> elements() const { return elements_; }
  /// All triangles are congruent; this is the common area dx dy / 2.
  double element_area() const { return 0.5 * dx_ * dy_; }
  double signed_area(int element) const;

 private:
  Bounds bounds_;
  int nx_, ny_;
  double dx_, dy_;
  BoundaryKind bc_;
  int num_dofs_ = 0;
  std::vector<int> dof_of_node_;
  std::vector<std::array<int, 3>> elements_;
};

RectMesh build_mesh(Bounds bounds, int nx, int ny, BoundaryKind bc);

/// Value of the P1 function with dof vector U at p. Periodic meshes wrap p
/// into the box; Dirichlet meshes reject points outside it (DomainError).
cplx eval_p1(const RectMesh& mesh, std::span<const cplx> U, Point p);

/// Nodal interpolant (f sampled at dof nodes).
CVector interpolate(const RectMesh& mesh, const std::function<cplx(double, double)>& f);

/// Coarse dof values taken at the coincident fine nodes.
CVector restrict_nested(const RectMesh& fine, std::span<const cplx> U_fine,
                        const RectMesh& coarse);

/// Fine dof values of the coarse P1 function (exact for equal refinement
/// ratios in x and y).
CVector prolong_nested(const RectMesh& coarse, std::span<const cplx> U_coarse,
                       const RectMesh& fine);

/// Throws ConfigError unless `fine` refines `coarse` by integer factors on
/// the same rectangle with the same boundary kind.
void check_nested(const RectMesh& coarse, const RectMesh& fine);

/// Nested-dissection elimination order on the dof grid: entry k is the dof
/// eliminated k-th. Grid lines serve as separators.
std::vector<int> dissection_order(const RectMesh& mesh);

}  // namespace nlscn
