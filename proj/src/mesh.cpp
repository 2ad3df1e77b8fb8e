#include "nlscn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlscn/errors.hpp"

namespace nlscn {

const char* to_string(BoundaryKind kind) {
  return kind == BoundaryKind::dirichlet ? "dirichlet" : "periodic";
}

BoundaryKind boundary_kind_from_string(const std::string& s) {
  if (s == "dirichlet") return BoundaryKind::dirichlet;
  if (s == "periodic") return BoundaryKind::periodic;
  throw ConfigError("unknown boundary kind '" + s + "'");
}

RectMesh::RectMesh(Bounds bounds, int nx, int ny, BoundaryKind bc)
    : bounds_(bounds), nx_(nx), ny_(ny), bc_(bc) {
  if (!(bounds.bx > bounds.ax) || !(bounds.by > bounds.ay)) {
    throw ConfigError("mesh: rectangle must have positive extent");
  }
  if (nx < 2 || ny < 2) {
    throw ConfigError("mesh: need at least 2 cells per axis");
  }
  dx_ = bounds.width() / nx;
  dy_ = bounds.height() / ny;

  dof_of_node_.assign(num_nodes(), -1);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      int dof = -1;
      if (bc == BoundaryKind::dirichlet) {
        if (i > 0 && i < nx && j > 0 && j < ny) {
          dof = (i - 1) + (j - 1) * (nx - 1);
        }
      } else {
        dof = (i % nx) + (j % ny) * nx;
      }
      dof_of_node_[node_index(i, j)] = dof;
    }
  }
  num_dofs_ = bc == BoundaryKind::dirichlet ? (nx - 1) * (ny - 1) : nx * ny;

  elements_.reserve(num_elements());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = node_index(i, j);
      const int n10 = n00 + 1;
      const int n01 = node_index(i, j + 1);
      const int n11 = n01 + 1;
      elements_.push_back({n00, n10, n11});
      elements_.push_back({n00, n11, n01});
    }
  }
}

Point RectMesh::node(int node) const {
  const int i = node % (nx_ + 1);
  const int j = node / (nx_ + 1);
  return {bounds_.ax + i * dx_, bounds_.ay + j * dy_};
}

int RectMesh::node_of_dof(int dof) const {
  if (bc_ == BoundaryKind::dirichlet) {
    return node_index(dof % (nx_ - 1) + 1, dof / (nx_ - 1) + 1);
  }
  return node_index(dof % nx_, dof / nx_);
}

double RectMesh::signed_area(int element) const {
  const auto& t = elements_[element];
  const Point a = node(t[0]), b = node(t[1]), c = node(t[2]);
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

RectMesh build_mesh(Bounds bounds, int nx, int ny, BoundaryKind bc) {
  return RectMesh(bounds, nx, ny, bc);
}

namespace {

double wrap(double v, double lo, double len) {
  double w = std::fmod(v - lo, len);
  if (w < 0.0) w += len;
  return lo + w;
}

cplx node_value(const RectMesh& mesh, std::span<const cplx> U, int node) {
  const int dof = mesh.dof_of_node(node);
  return dof < 0 ? cplx{} : U[dof];
}

}  // namespace

cplx eval_p1(const RectMesh& mesh, std::span<const cplx> U, Point p) {
  if (static_cast<int>(U.size()) != mesh.num_dofs()) {
    throw DimensionError("eval_p1: vector length does not match the mesh");
  }
  const Bounds& b = mesh.bounds();
  if (mesh.bc() == BoundaryKind::periodic) {
    p.x = wrap(p.x, b.ax, b.width());
    p.y = wrap(p.y, b.ay, b.height());
  } else {
    const double tol_x = 1e-12 * b.width();
    const double tol_y = 1e-12 * b.height();
    if (p.x < b.ax - tol_x || p.x > b.bx + tol_x || p.y < b.ay - tol_y || p.y > b.by + tol_y) {
      throw DomainError("eval_p1: point outside the mesh");
    }
  }
  // snap to grid lines so that nodal evaluation is exact
  auto snap = [](double f) {
    const double r = std::nearbyint(f);
    return std::abs(f - r) <= 1e-10 * std::max(1.0, std::abs(f)) ? r : f;
  };
  const double fx = snap((p.x - b.ax) / mesh.dx());
  const double fy = snap((p.y - b.ay) / mesh.dy());
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, mesh.nx() - 1);
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, mesh.ny() - 1);
  const double s = std::clamp(fx - i, 0.0, 1.0);
  const double t = std::clamp(fy - j, 0.0, 1.0);

  const int n00 = mesh.node_index(i, j);
  const int n11 = mesh.node_index(i + 1, j + 1);
  const cplx u00 = node_value(mesh, U, n00);
  const cplx u11 = node_value(mesh, U, n11);
  if (s >= t) {
    const cplx u10 = node_value(mesh, U, mesh.node_index(i + 1, j));
    return (1.0 - s) * u00 + (s - t) * u10 + t * u11;
  }
  const cplx u01 = node_value(mesh, U, mesh.node_index(i, j + 1));
  return (1.0 - t) * u00 + s * u11 + (t - s) * u01;
}

CVector interpolate(const RectMesh& mesh, const std::function<cplx(double, double)>& f) {
  CVector U(mesh.num_dofs());
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    const Point p = mesh.dof_point(d);
    U[d] = f(p.x, p.y);
  }
  return U;
}

void check_nested(const RectMesh& coarse, const RectMesh& fine) {
  if (coarse.bc() != fine.bc()) {
    throw ConfigError("nested meshes must share the boundary kind");
  }
  const Bounds& a = coarse.bounds();
  const Bounds& b = fine.bounds();
  const double tol = 1e-12 * std::max(a.width(), a.height());
  if (std::abs(a.ax - b.ax) > tol || std::abs(a.bx - b.bx) > tol ||
      std::abs(a.ay - b.ay) > tol || std::abs(a.by - b.by) > tol) {
    throw ConfigError("nested meshes must cover the same rectangle");
  }
  if (fine.nx() % coarse.nx() != 0 || fine.ny() % coarse.ny() != 0) {
    throw ConfigError("fine mesh cell counts must be multiples of the coarse ones");
  }
}

CVector restrict_nested(const RectMesh& fine, std::span<const cplx> U_fine,
                        const RectMesh& coarse) {
  check_nested(coarse, fine);
  if (static_cast<int>(U_fine.size()) != fine.num_dofs()) {
    throw DimensionError("restrict_nested: vector length does not match the fine mesh");
  }
  const int rx = fine.nx() / coarse.nx();
  const int ry = fine.ny() / coarse.ny();
  CVector out(coarse.num_dofs());
  for (int d = 0; d < coarse.num_dofs(); ++d) {
    const int cn = coarse.node_of_dof(d);
    const int I = cn % (coarse.nx() + 1);
    const int J = cn / (coarse.nx() + 1);
    out[d] = U_fine[fine.dof_of_node(fine.node_index(I * rx, J * ry))];
  }
  return out;
}

CVector prolong_nested(const RectMesh& coarse, std::span<const cplx> U_coarse,
                       const RectMesh& fine) {
  check_nested(coarse, fine);
  CVector out(fine.num_dofs());
  for (int d = 0; d < fine.num_dofs(); ++d) {
    out[d] = eval_p1(coarse, U_coarse, fine.dof_point(d));
  }
  return out;
}

namespace {

struct Dissector {
  int width;
  std::vector<int>& order;

  void emit(int i, int j) { order.push_back(i + j * width); }

  void box(int i0, int i1, int j0, int j1) {
    const int w = i1 - i0;
    const int h = j1 - j0;
    if (w <= 0 || h <= 0) return;
    if (w * h <= 16) {
      for (int j = j0; j < j1; ++j)
        for (int i = i0; i < i1; ++i) emit(i, j);
      return;
    }
    if (w >= h) {
      const int m = i0 + w / 2;
      box(i0, m, j0, j1);
      box(m + 1, i1, j0, j1);
      for (int j = j0; j < j1; ++j) emit(m, j);
    } else {
      const int m = j0 + h / 2;
      box(i0, i1, j0, m);
      box(i0, i1, m + 1, j1);
      for (int i = i0; i < i1; ++i) emit(i, m);
    }
  }
};

}  // namespace

std::vector<int> dissection_order(const RectMesh& mesh) {
  const int w = mesh.dof_nx();
  const int h = mesh.dof_ny();
  std::vector<int> order;
  order.reserve(mesh.num_dofs());
  Dissector d{w, order};
  if (mesh.bc() == BoundaryKind::dirichlet) {
    d.box(0, w, 0, h);
  } else {
    // Column 0 and row 0 cut the torus open into a plain box.
    d.box(1, w, 1, h);
    for (int i = 1; i < w; ++i) d.emit(i, 0);
    for (int j = 0; j < h; ++j) d.emit(0, j);
  }
  return order;
}

}  // namespace nlscn
