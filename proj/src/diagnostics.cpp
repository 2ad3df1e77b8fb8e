#include "nlscn/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "nlscn/errors.hpp"

namespace nlscn {

double mass(const SparseMatrix& M, std::span<const cplx> U) {
  const cplx m = dot_form(M, U, U);
  if (std::abs(m.imag()) > 1e-10 * std::abs(m.real())) {
    throw Error("mass: conj(U)^T M U is not real; M is not Hermitian");
  }
  return m.real();
}

double energy(const SparseMatrix& A, const SparseMatrix& MV, const Assembler& assembler,
              const NonlinearityModel& model, std::span<const cplx> U) {
  const double kinetic = dot_form(A, U, U).real();
  const double potential = dot_form(MV, U, U).real();
  return 0.5 * (kinetic + potential + assembler.Gamma_integral(model, U));
}

double energy(const SparseMatrix& A, const SparseMatrix& MV, const RectMesh& mesh,
              const NonlinearityModel& model, std::span<const cplx> U) {
  return energy(A, MV, Assembler(mesh), model, U);
}

ErrorEvaluator::ErrorEvaluator(const RectMesh& ref_mesh)
    : ref_mesh_(&ref_mesh), assembler_(ref_mesh), M_(assembler_.mass()), A_(assembler_.stiffness()) {}

ErrorNorms ErrorEvaluator::on_reference(std::span<const cplx> U, std::span<const cplx> U_ref) const {
  if (U.size() != U_ref.size() || static_cast<int>(U.size()) != ref_mesh_->num_dofs()) {
    throw DimensionError("error_norms: vectors do not match the reference mesh");
  }
  CVector e(U.size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = U[k] - U_ref[k];
  ErrorNorms out;
  out.l2 = std::sqrt(std::max(0.0, dot_form(M_, e, e).real()));
  out.h1_semi = std::sqrt(std::max(0.0, dot_form(A_, e, e).real()));
  out.l1_density = assembler_.density_l1_distance(U, U_ref);
  return out;
}

ErrorNorms ErrorEvaluator::operator()(const RectMesh& mesh, std::span<const cplx> U,
                                      std::span<const cplx> U_ref) const {
  if (static_cast<int>(U.size()) != mesh.num_dofs()) {
    throw DimensionError("error_norms: vector does not match its mesh");
  }
  check_nested(mesh, *ref_mesh_);
  if (mesh.nx() == ref_mesh_->nx() && mesh.ny() == ref_mesh_->ny()) {
    return on_reference(U, U_ref);
  }
  const CVector up = prolong_nested(mesh, U, *ref_mesh_);
  return on_reference(up, U_ref);
}

ErrorNorms error_norms(const RectMesh& mesh, std::span<const cplx> U, const RectMesh& ref_mesh,
                       std::span<const cplx> U_ref) {
  return ErrorEvaluator(ref_mesh)(mesh, U, U_ref);
}

std::string observable_csv_header() { return "step,t,mass,energy,iters,residual"; }

std::string observable_csv_row(const ObservableRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%d,%.6e", r.step, r.t, r.mass, r.energy,
                r.iters, r.residual);
  return buf;
}

}  // namespace nlscn
