#include "nlscn/groundstate.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nlscn/diagnostics.hpp"
#include "nlscn/errors.hpp"

namespace nlscn {

namespace {

void normalize(const SparseMatrix& M, CVector& u) {
  const double m = std::sqrt(mass(M, u));
  if (!(m > 0.0)) throw Error("ground state: iterate has zero mass");
  for (cplx& v : u) v /= m;
}

int center_dof(const RectMesh& mesh) {
  const Bounds& b = mesh.bounds();
  const Point c{0.5 * (b.ax + b.bx), 0.5 * (b.ay + b.by)};
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    const Point p = mesh.dof_point(d);
    const double dist = std::hypot(p.x - c.x, p.y - c.y);
    if (dist < best_d) {
      best_d = dist;
      best = d;
    }
  }
  return best;
}

}  // namespace

CVector gaussian_guess(const RectMesh& mesh) {
  CVector u = interpolate(mesh, [](double x, double y) { return cplx{std::exp(-0.5 * (x * x + y * y)), 0.0}; });
  const SparseMatrix M = assemble_mass(mesh);
  normalize(M, u);
  return u;
}

CVector random_positive_guess(const RectMesh& mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  CVector u(mesh.num_dofs());
  for (cplx& v : u) v = dist(rng);
  return u;
}

EigenResidual ground_state_residual(const Assembler& assembler, const SparseMatrix& M,
                                    const SparseMatrix& A,
                                    const SparseMatrix& MV, const Factorization& mass_fact,
                                    const NonlinearityModel& model, std::span<const cplx> u) {
  const SparseMatrix MG = assembler.nonlinear_mass(model, u, u);
  const std::size_t n = u.size();
  CVector Hu = spmv(A, u);
  const CVector Vu = spmv(MV, u);
  const CVector Gu = spmv(MG, u);
  for (std::size_t k = 0; k < n; ++k) Hu[k] += Vu[k] + Gu[k];
  cplx num{}, den{};
  const CVector Mu = spmv(M, u);
  for (std::size_t k = 0; k < n; ++k) {
    num += std::conj(u[k]) * Hu[k];
    den += std::conj(u[k]) * Mu[k];
  }
  EigenResidual out;
  out.lambda = num.real() / den.real();
  CVector r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = Hu[k] - out.lambda * Mu[k];
  const CVector Minv_r = mass_fact.solve(r);
  cplx rr{};
  for (std::size_t k = 0; k < n; ++k) rr += std::conj(r[k]) * Minv_r[k];
  out.residual = std::sqrt(std::max(0.0, rr.real()));
  return out;
}

GroundStateResult compute_ground_state(const Assembler& assembler, const SparseMatrix& M,
                                       const SparseMatrix& A, const SparseMatrix& MV,
                                       const NonlinearityModel& model, const GroundStateConfig& cfg,
                                       std::span<const cplx> initial, std::span<const int> order) {
  if (!(cfg.tol > 0.0) || !(cfg.dt_imag > 0.0) || cfg.max_iters < 1) {
    throw ConfigError("ground state: tol, dt_imag and max_iters must be positive");
  }
  const RectMesh& mesh = assembler.mesh();
  const std::size_t n = mesh.num_dofs();
  if (M.size() != static_cast<int>(n) || A.size() != M.size() || MV.size() != M.size()) {
    throw DimensionError("ground state: matrices do not match the mesh");
  }

  CVector u = initial.empty() ? gaussian_guess(mesh) : CVector(initial.begin(), initial.end());
  if (u.size() != n) throw DimensionError("ground state: initial guess has the wrong length");
  for (cplx& v : u) v = std::abs(v);
  normalize(M, u);

  const double dt = cfg.dt_imag;
  const std::vector<cplx> coeffs{1.0, dt, dt};
  const SparseMatrix S = axpy_combine(coeffs, {M, A, MV});
  const Factorization S_fact = factorize(S, order);
  const Factorization M_fact = factorize(M, order);
  const int center = center_dof(mesh);

  GroundStateResult out;
  SparseMatrix MG = assembler.zero_matrix();
  CVector rhs(n), Mu(n), Gu(n), Au(n), Vu(n);
  double E_prev = energy(A, MV, assembler, model, u);
  out.energy_history.push_back(E_prev);
  double last_res = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= cfg.max_iters; ++k) {
    assembler.nonlinear_mass_into(MG, model, u, u);
    spmv_into(M, u, Mu);
    spmv_into(MG, u, Gu);
    spmv_into(A, u, Au);
    spmv_into(MV, u, Vu);
    // Rayleigh quotient of the unit-mass iterate; the explicit lambda u term
    // makes fixed points exact eigenpairs instead of O(dt)-shifted ones
    double lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) lambda += (std::conj(u[i]) * (Au[i] + Vu[i] + Gu[i])).real();
    for (std::size_t i = 0; i < n; ++i) rhs[i] = (1.0 + dt * lambda) * Mu[i] - dt * Gu[i];
    S_fact.solve_in_place(rhs);
    u.swap(rhs);
    for (cplx& v : u) v = cplx{v.real(), 0.0};
    normalize(M, u);
    if (u[center].real() < 0.0) {
      if (k > 1) throw Error("ground state: sign flip detected at the domain center");
      for (cplx& v : u) v = -v;
    }

    const double E = energy(A, MV, assembler, model, u);
    out.energy_history.push_back(E);
    if (E > E_prev + 1e-12 * std::abs(E_prev)) {
      std::ostringstream msg;
      msg << "ground state: energy increased at iteration " << k << " (" << E_prev << " -> " << E
          << "); dt_imag is too large";
      throw ConvergenceError(msg.str(), last_res);
    }
    E_prev = E;

    const EigenResidual er = ground_state_residual(assembler, M, A, MV, M_fact, model, u);
    last_res = er.residual;
    if (er.residual <= cfg.tol) {
      out.u0 = std::move(u);
      out.lambda0 = er.lambda;
      out.energy0 = E;
      out.residual = er.residual;
      out.iterations = k;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "ground state: residual " << last_res << " above " << cfg.tol << " after "
      << cfg.max_iters << " iterations";
  throw ConvergenceError(msg.str(), last_res);
}

}  // namespace nlscn
