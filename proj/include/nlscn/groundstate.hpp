#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlscn/assembly.hpp"
#include "nlscn/nonlinearity.hpp"
#include "nlscn/sparse.hpp"
#include "nlscn/types.hpp"

namespace nlscn {

struct GroundStateConfig {
  double tol = 1e-10;
  double dt_imag = 0.1;
  int max_iters = 20000;
};

struct GroundStateResult {
  /// Real nodal values stored as complex, unit M-mass. Positive except for
  /// rounding-level values in the far tail (consistent mass is not monotone).
  CVector u0;
  double lambda0 = 0.0;
  double energy0 = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> energy_history;
};

/// Normalized interpolant of exp(-(x^2 + y^2) / 2).
CVector gaussian_guess(const RectMesh& mesh);
/// Positive random nodal values in [0.5, 1.5) from a fixed seed.
CVector random_positive_guess(const RectMesh& mesh, std::uint64_t seed);

/// Positive unit-mass ground state of  lambda u = -Delta u + V u + gamma(|u|^2) u
/// by the normalized semi-implicit gradient flow
///
///   (M + dt (A + M_V)) w = (1 + dt lambda_k) M u_k - dt M_gamma(u_k) u_k,
///   u_{k+1} = w / ||w||_M,
///
/// lambda_k being the Rayleigh quotient of u_k. Without the lambda_k term the
/// fixed point solves the eigenproblem only up to O(dt).
///
/// Stops once the eigen-residual ||(A + M_V + M_gamma) u - lambda M u|| in
/// the M^{-1} norm drops below cfg.tol. Throws ConvergenceError on stagnation
/// or when an iterate raises the energy (dt_imag too large).
GroundStateResult compute_ground_state(const Assembler& assembler, const SparseMatrix& M,
                                       const SparseMatrix& A, const SparseMatrix& MV,
                                       const NonlinearityModel& model,
                                       const GroundStateConfig& cfg,
                                       std::span<const cplx> initial = {},
                                       std::span<const int> order = {});

/// Eigen-residual and chemical potential of a unit-mass state.
struct EigenResidual {
  double lambda = 0.0;
  double residual = 0.0;
};
EigenResidual ground_state_residual(const Assembler& assembler, const SparseMatrix& M,
                                    const SparseMatrix& A,
                                    const SparseMatrix& MV, const Factorization& mass_fact,
                                    const NonlinearityModel& model, std::span<const cplx> u);

}  // namespace nlscn
