#include "nlscn/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "nlscn/errors.hpp"

namespace nlscn {

namespace {

// Edge-midpoint rule: point q sits on the edge (q, q+1 mod 3).
constexpr std::array<std::array<int, 2>, 3> kEdge{{{0, 1}, {1, 2}, {2, 0}}};

cplx dof_value(std::span<const cplx> U, int dof) { return dof < 0 ? cplx{} : U[dof]; }

}  // namespace

QuadratureRule edge_midpoint_rule() {
  QuadratureRule r;
  r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  r.degree = 2;
  return r;
}

Assembler::Assembler(const RectMesh& mesh) : mesh_(&mesh) {
  const int n = mesh.num_dofs();
  const auto elems = mesh.elements();
  element_dofs_.resize(elems.size());
  std::vector<std::vector<int>> rows(n);
  for (std::size_t e = 0; e < elems.size(); ++e) {
    for (int a = 0; a < 3; ++a) element_dofs_[e][a] = mesh.dof_of_node(elems[e][a]);
    for (int a = 0; a < 3; ++a) {
      const int da = element_dofs_[e][a];
      if (da < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int db = element_dofs_[e][b];
        if (db >= 0) rows[da].push_back(db);
      }
    }
  }
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  pattern_ = SparseMatrix::from_pattern(rows);

  element_slots_.resize(elems.size());
  for (std::size_t e = 0; e < elems.size(); ++e) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int da = element_dofs_[e][a];
        const int db = element_dofs_[e][b];
        element_slots_[e][3 * a + b] = (da < 0 || db < 0) ? -1 : pattern_.find(da, db);
      }
    }
  }
}

SparseMatrix Assembler::zero_matrix() const { return pattern_; }

SparseMatrix Assembler::mass() const {
  SparseMatrix M = pattern_;
  auto vals = M.values();
  const double area = mesh_->element_area();
  for (const auto& slots : element_slots_) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int p = slots[3 * a + b];
        if (p >= 0) vals[p] += area / 12.0 * (a == b ? 2.0 : 1.0);
      }
    }
  }
  return M;
}

SparseMatrix Assembler::stiffness() const {
  SparseMatrix A = pattern_;
  auto vals = A.values();
  const auto elems = mesh_->elements();
  for (std::size_t e = 0; e < elems.size(); ++e) {
    std::array<Point, 3> v;
    for (int a = 0; a < 3; ++a) v[a] = mesh_->node(elems[e][a]);
    const double area2 =
        (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
    // grad phi_a = (y_{a+1} - y_{a+2}, x_{a+2} - x_{a+1}) / (2 |T|)
    std::array<double, 3> gx, gy;
    for (int a = 0; a < 3; ++a) {
      const Point& p1 = v[(a + 1) % 3];
      const Point& p2 = v[(a + 2) % 3];
      gx[a] = (p1.y - p2.y) / area2;
      gy[a] = (p2.x - p1.x) / area2;
    }
    const double area = 0.5 * area2;
    const auto& slots = element_slots_[e];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int p = slots[3 * a + b];
        if (p >= 0) vals[p] += area * (gx[a] * gx[b] + gy[a] * gy[b]);
      }
    }
  }
  return A;
}

template <class CoeffFn>
void Assembler::scatter_coefficient_mass(SparseMatrix& out, CoeffFn&& coeff) const {
  if (!out.same_pattern(pattern_)) {
    throw DimensionError("assembly: target matrix does not carry the mesh pattern");
  }
  auto vals = out.values();
  std::fill(vals.begin(), vals.end(), cplx{});
  // phi_a phi_b at an edge midpoint is 1/4 when both a and b lie on the edge.
  const double w4 = quad_weight() / 4.0;
  for (std::size_t e = 0; e < element_slots_.size(); ++e) {
    const auto c = coeff(e);
    const std::array<double, 3> diag{c[0] + c[2], c[0] + c[1], c[1] + c[2]};
    const auto& s = element_slots_[e];
    for (int a = 0; a < 3; ++a) {
      if (s[4 * a] >= 0) vals[s[4 * a]] += w4 * diag[a];
    }
    for (int q = 0; q < 3; ++q) {
      const int a = kEdge[q][0];
      const int b = kEdge[q][1];
      if (s[3 * a + b] >= 0) vals[s[3 * a + b]] += w4 * c[q];
      if (s[3 * b + a] >= 0) vals[s[3 * b + a]] += w4 * c[q];
    }
  }
}

SparseMatrix Assembler::coefficient_mass(std::span<const double> coeff) const {
  if (static_cast<int>(coeff.size()) != num_quad_points()) {
    throw DimensionError("coefficient_mass: one coefficient per quadrature point expected");
  }
  SparseMatrix out = pattern_;
  scatter_coefficient_mass(out, [&](std::size_t e) {
    return std::array<double, 3>{coeff[3 * e], coeff[3 * e + 1], coeff[3 * e + 2]};
  });
  return out;
}

std::vector<Point> Assembler::quad_points() const {
  const auto elems = mesh_->elements();
  std::vector<Point> pts(elems.size() * 3);
  for (std::size_t e = 0; e < elems.size(); ++e) {
    for (int q = 0; q < 3; ++q) {
      const Point a = mesh_->node(elems[e][kEdge[q][0]]);
      const Point b = mesh_->node(elems[e][kEdge[q][1]]);
      pts[3 * e + q] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }
  }
  return pts;
}

namespace {

using Local = std::array<double, 9>;
using Bary = std::array<double, 3>;

struct AdaptiveMass {
  const PotentialFn& V;
  Point p0, p1, p2;
  double area;  // physical area of the element
  int max_depth;
  double jump_tol = 0.0;

  double eval(const Bary& l) const {
    const double v = V(l[0] * p0.x + l[1] * p1.x + l[2] * p2.x, l[0] * p0.y + l[1] * p1.y + l[2] * p2.y);
    if (!(v >= 0.0)) throw ModelError("potential is negative or NaN at a quadrature point");
    return v;
  }

  static Bary mid(const Bary& a, const Bary& b) {
    return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  }

  // edge-midpoint rule on a sub-triangle of relative area `frac`
  void rule(const std::array<Bary, 3>& m, const std::array<double, 3>& vm, double frac, Local& out) const {
    for (int q = 0; q < 3; ++q) {
      const double wv = area * frac / 3.0 * vm[q];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[3 * i + j] += wv * m[q][i] * m[q][j];
    }
  }

  // Sub-triangle (a, b, c) with vertex values va, vb, vc. Refines while the
  // midpoint values stray from the vertex averages (a jump crossing the
  // triangle always separates its vertices) or while the children's rule
  // disagrees with the parent's.
  void integrate(const std::array<Bary, 3>& t, const std::array<double, 3>& vt, double frac, int depth,
                 Local& out) const {
    const std::array<Bary, 3> m{mid(t[0], t[1]), mid(t[1], t[2]), mid(t[2], t[0])};
    const std::array<double, 3> vm{eval(m[0]), eval(m[1]), eval(m[2])};
    Local coarse{};
    rule(m, vm, frac, coarse);
    double dev = 0.0;
    for (int q = 0; q < 3; ++q) dev = std::max(dev, std::abs(vm[q] - 0.5 * (vt[q] + vt[(q + 1) % 3])));

    const std::array<std::array<Bary, 3>, 4> kids{
        {{t[0], m[0], m[2]}, {m[0], t[1], m[1]}, {m[2], m[1], t[2]}, {m[0], m[1], m[2]}}};
    const std::array<std::array<double, 3>, 4> vk{
        {{vt[0], vm[0], vm[2]}, {vm[0], vt[1], vm[1]}, {vm[2], vm[1], vt[2]}, {vm[0], vm[1], vm[2]}}};
    if (depth >= max_depth) {
      for (int k = 0; k < 9; ++k) out[k] += coarse[k];
      return;
    }
    if (dev <= jump_tol) {
      Local fine{};
      for (int c = 0; c < 4; ++c) {
        const std::array<Bary, 3> km{mid(kids[c][0], kids[c][1]), mid(kids[c][1], kids[c][2]),
                                     mid(kids[c][2], kids[c][0])};
        rule(km, {eval(km[0]), eval(km[1]), eval(km[2])}, 0.25 * frac, fine);
      }
      double diff = 0.0, scale = 0.0;
      for (int k = 0; k < 9; ++k) {
        diff = std::max(diff, std::abs(fine[k] - coarse[k]));
        scale = std::max(scale, std::abs(fine[k]));
      }
      if (diff <= 1e-6 * scale) {
        for (int k = 0; k < 9; ++k) out[k] += fine[k];
        return;
      }
    }
    for (int c = 0; c < 4; ++c) integrate(kids[c], vk[c], 0.25 * frac, depth + 1, out);
  }
};

}  // namespace

SparseMatrix Assembler::potential_mass(const PotentialFn& V, int adaptive_levels) const {
  if (adaptive_levels < 0) throw ConfigError("potential_mass: adaptive_levels must be >= 0");
  if (adaptive_levels > 0) {
    const auto elems = mesh_->elements();
    SparseMatrix out = pattern_;
    auto vals = out.values();
    for (std::size_t e = 0; e < elems.size(); ++e) {
      AdaptiveMass am{V, mesh_->node(elems[e][0]), mesh_->node(elems[e][1]), mesh_->node(elems[e][2]),
                       mesh_->element_area(), adaptive_levels};
      const std::array<Bary, 3> t{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
      const std::array<double, 3> vt{am.eval(t[0]), am.eval(t[1]), am.eval(t[2])};
      // smooth variation settles within a few levels; jumps are O(1) of the range
      am.jump_tol = 1e-3 * std::max({1.0, vt[0], vt[1], vt[2]});
      Local local{};
      am.integrate(t, vt, 1.0, 1, local);
      const auto& slots = element_slots_[e];
      for (int k = 0; k < 9; ++k)
        if (slots[k] >= 0) vals[slots[k]] += local[k];
    }
    return out;
  }
  const std::vector<Point> pts = quad_points();
  std::vector<double> coeff(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    coeff[k] = V(pts[k].x, pts[k].y);
    if (!(coeff[k] >= 0.0)) {
      throw ModelError("potential is negative or NaN at a quadrature point");
    }
  }
  return coefficient_mass(coeff);
}

void Assembler::quad_values(std::span<const cplx> U, std::span<cplx> out) const {
  if (static_cast<int>(U.size()) != num_dofs() || static_cast<int>(out.size()) != num_quad_points()) {
    throw DimensionError("quad_values: dimension mismatch");
  }
  for (std::size_t e = 0; e < element_dofs_.size(); ++e) {
    const auto& d = element_dofs_[e];
    const cplx u0 = dof_value(U, d[0]), u1 = dof_value(U, d[1]), u2 = dof_value(U, d[2]);
    out[3 * e] = 0.5 * (u0 + u1);
    out[3 * e + 1] = 0.5 * (u1 + u2);
    out[3 * e + 2] = 0.5 * (u2 + u0);
  }
}

double Assembler::nonlinear_mass_into(SparseMatrix& out, const NonlinearityModel& model,
                                      std::span<const cplx> U_next,
                                      std::span<const cplx> U_cur) const {
  if (static_cast<int>(U_next.size()) != num_dofs() || static_cast<int>(U_cur.size()) != num_dofs()) {
    throw DimensionError("nonlinear_mass: vector length does not match the mesh");
  }
  double cmax = 0.0;
  if (model.identically_zero) {
    auto vals = out.values();
    std::fill(vals.begin(), vals.end(), cplx{});
    return cmax;
  }
  scatter_coefficient_mass(out, [&](std::size_t e) {
    const auto& d = element_dofs_[e];
    const cplx n0 = dof_value(U_next, d[0]), n1 = dof_value(U_next, d[1]),
               n2 = dof_value(U_next, d[2]);
    const cplx c0 = dof_value(U_cur, d[0]), c1 = dof_value(U_cur, d[1]),
               c2 = dof_value(U_cur, d[2]);
    const std::array<cplx, 3> qn{0.5 * (n0 + n1), 0.5 * (n1 + n2), 0.5 * (n2 + n0)};
    const std::array<cplx, 3> qc{0.5 * (c0 + c1), 0.5 * (c1 + c2), 0.5 * (c2 + c0)};
    std::array<double, 3> coeff;
    for (int q = 0; q < 3; ++q) {
      coeff[q] = gamma_quotient(std::norm(qc[q]), std::norm(qn[q]), model);
      cmax = std::max(cmax, coeff[q]);
    }
    return coeff;
  });
  return cmax;
}

SparseMatrix Assembler::nonlinear_mass(const NonlinearityModel& model, std::span<const cplx> U_next,
                                       std::span<const cplx> U_cur) const {
  SparseMatrix out = pattern_;
  nonlinear_mass_into(out, model, U_next, U_cur);
  return out;
}

double Assembler::Gamma_integral(const NonlinearityModel& model, std::span<const cplx> U) const {
  if (model.identically_zero) return 0.0;
  CVector q(num_quad_points());
  quad_values(U, q);
  double s = 0.0;
  for (const cplx& v : q) s += model.Gamma(std::norm(v));
  return quad_weight() * s;
}

double Assembler::density_l1_distance(std::span<const cplx> U, std::span<const cplx> V) const {
  CVector qu(num_quad_points()), qv(num_quad_points());
  quad_values(U, qu);
  quad_values(V, qv);
  double s = 0.0;
  for (std::size_t k = 0; k < qu.size(); ++k) s += std::abs(std::norm(qu[k]) - std::norm(qv[k]));
  return quad_weight() * s;
}

SparseMatrix assemble_mass(const RectMesh& mesh) { return Assembler(mesh).mass(); }

SparseMatrix assemble_stiffness(const RectMesh& mesh) { return Assembler(mesh).stiffness(); }

SparseMatrix assemble_potential_mass(const RectMesh& mesh, const PotentialFn& V,
                                     int adaptive_levels) {
  return Assembler(mesh).potential_mass(V, adaptive_levels);
}

SparseMatrix assemble_nonlinear_mass(const RectMesh& mesh, const NonlinearityModel& model,
                                     std::span<const cplx> U_next, std::span<const cplx> U_cur) {
  return Assembler(mesh).nonlinear_mass(model, U_next, U_cur);
}

}  // namespace nlscn
