#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "nlscn/mesh.hpp"
#include "nlscn/nonlinearity.hpp"
#include "nlscn/sparse.hpp"
#include "nlscn/types.hpp"

namespace nlscn {

/// Quadrature on a triangle in barycentric coordinates; weights are
/// fractions of the triangle area.
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Three edge midpoints with weight 1/3 each; exact up to degree 2.
QuadratureRule edge_midpoint_rule();


using PotentialFn = std::function<double(double, double)>;

/// Finite element assembly over the reduced dofs of a RectMesh.
///
/// The sparsity pattern and the element-to-CSR scatter map are computed once;
/// every matrix produced here shares that pattern. Mass and stiffness are
/// integrated exactly. Coefficient-weighted masses (potential, nonlinearity)
/// and the nonlinear energy use the edge-midpoint rule, with the solution
/// interpolated to the midpoint before squaring.
class Assembler {
 public:
  explicit Assembler(const RectMesh& mesh);

  const RectMesh& mesh() const { return *mesh_; }
  int num_dofs() const { return mesh_->num_dofs(); }
  static constexpr int kQuadPerElement = 3;
  int num_quad_points() const { return kQuadPerElement * mesh_->num_elements(); }

  /// Zero-valued matrix with the shared pattern.
  SparseMatrix zero_matrix() const;
  SparseMatrix mass() const;
  SparseMatrix stiffness() const;
  /// Throws ModelError if V is negative (or NaN) at a quadrature point.
  ///
  /// With `adaptive_levels` > 0 the edge-midpoint rule is applied adaptively:
  /// a triangle is split into its four midpoint children while the children
  /// disagree with the parent, up to that many levels. This resolves jumps in
  /// V that cut through elements. Only M_V uses it; the nonlinear terms and
  /// the energy keep the basic rule, so conservation is unaffected.
  SparseMatrix potential_mass(const PotentialFn& V, int adaptive_levels = 0) const;
  /// Mass weighted by one coefficient per quadrature point, laid out
  /// element-major (element e, point q at index 3 e + q).
  SparseMatrix coefficient_mass(std::span<const double> coeff) const;

  /// M_Gamma(U_next, U_cur) written into `out` (which must carry the shared
  /// pattern). Returns the largest coefficient; 0 means the matrix is zero.
  double nonlinear_mass_into(SparseMatrix& out, const NonlinearityModel& model,
                             std::span<const cplx> U_next, std::span<const cplx> U_cur) const;
  SparseMatrix nonlinear_mass(const NonlinearityModel& model, std::span<const cplx> U_next,
                              std::span<const cplx> U_cur) const;

  /// Interpolated values of U at every quadrature point (element-major).
  void quad_values(std::span<const cplx> U, std::span<cplx> out) const;
  /// Coordinates of every quadrature point (element-major).
  std::vector<Point> quad_points() const;
  /// Quadrature weight (absolute) shared by every point.
  double quad_weight() const { return mesh_->element_area() / 3.0; }

  /// sum_q w_q Gamma(|u(q)|^2)
  double Gamma_integral(const NonlinearityModel& model, std::span<const cplx> U) const;
  /// sum_q w_q | |u(q)|^2 - |v(q)|^2 |
  double density_l1_distance(std::span<const cplx> U, std::span<const cplx> V) const;

  std::span<const std::array<int, 3>> element_dofs() const { return element_dofs_; }

 private:
  template <class CoeffFn>
  void scatter_coefficient_mass(SparseMatrix& out, CoeffFn&& coeff) const;

  const RectMesh* mesh_;
  SparseMatrix pattern_;
  std::vector<std::array<int, 3>> element_dofs_;  // -1 for Dirichlet nodes
  std::vector<std::array<int, 9>> element_slots_;  // CSR positions, -1 if absent
};

SparseMatrix assemble_mass(const RectMesh& mesh);
SparseMatrix assemble_stiffness(const RectMesh& mesh);
SparseMatrix assemble_potential_mass(const RectMesh& mesh, const PotentialFn& V,
                                     int adaptive_levels = 0);
SparseMatrix assemble_nonlinear_mass(const RectMesh& mesh, const NonlinearityModel& model,
                                     std::span<const cplx> U_next, std::span<const cplx> U_cur);

}  // namespace nlscn
