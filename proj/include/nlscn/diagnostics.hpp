#pragma once

#include <span>
#include <string>

#include "nlscn/assembly.hpp"
#include "nlscn/mesh.hpp"
#include "nlscn/nonlinearity.hpp"
#include "nlscn/sparse.hpp"
#include "nlscn/types.hpp"

namespace nlscn {

/// One row of a run log.
struct ObservableRecord {
  long step = 0;
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  int iters = 0;
  double residual = 0.0;
};

/// conj(U)^T M U. Throws DimensionError on mismatch and Error if the form
/// has a non-negligible imaginary part (M not Hermitian).
double mass(const SparseMatrix& M, std::span<const cplx> U);

/// 1/2 (conj(U)^T A U + conj(U)^T M_V U) + 1/2 sum_q w_q Gamma(|u(q)|^2), with
/// the same quadrature the assembler uses for the nonlinear mass matrix.
double energy(const SparseMatrix& A, const SparseMatrix& MV, const Assembler& assembler,
              const NonlinearityModel& model, std::span<const cplx> U);
double energy(const SparseMatrix& A, const SparseMatrix& MV, const RectMesh& mesh,
              const NonlinearityModel& model, std::span<const cplx> U);

struct ErrorNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double l1_density = 0.0;
};

/// Errors of a solution against a reference on a nested (or equal) finer
/// mesh. The coarse solution is prolonged to the reference mesh and all
/// integrals are evaluated there. Caches the reference mesh matrices.
class ErrorEvaluator {
 public:
  explicit ErrorEvaluator(const RectMesh& ref_mesh);
  ErrorNorms operator()(const RectMesh& mesh, std::span<const cplx> U,
                        std::span<const cplx> U_ref) const;
  /// Both vectors already live on the reference mesh.
  ErrorNorms on_reference(std::span<const cplx> U, std::span<const cplx> U_ref) const;
  const RectMesh& reference_mesh() const { return *ref_mesh_; }

 private:
  const RectMesh* ref_mesh_;
  Assembler assembler_;
  SparseMatrix M_;
  SparseMatrix A_;
};

ErrorNorms error_norms(const RectMesh& mesh, std::span<const cplx> U, const RectMesh& ref_mesh,
                       std::span<const cplx> U_ref);

/// "step,t,mass,energy,iters,residual"
std::string observable_csv_header();
std::string observable_csv_row(const ObservableRecord& r);

}  // namespace nlscn
