#include "nlscn/cn_solver.hpp"

#include <cmath>
#include <sstream>

namespace nlscn {

Predictor predictor_from_string(const std::string& s) {
  if (s == "previous" || s == "previous-step") return Predictor::previous_step;
  if (s == "linear" || s == "linear-extrapolation") return Predictor::linear_extrapolation;
  throw ConfigError("unknown predictor '" + s + "'");
}

const char* to_string(Predictor p) {
  return p == Predictor::previous_step ? "previous-step" : "linear-extrapolation";
}

void CNConfig::validate() const {
  if (!(tau != 0.0) || !std::isfinite(tau)) throw ConfigError("CNConfig: tau must be nonzero");
  if (!(fp_tol >= 1e-15)) throw ConfigError("CNConfig: fp_tol must be >= 1e-15");
  if (max_iters < 1) throw ConfigError("CNConfig: max_iters must be >= 1");
}

CNOperators build_operators(const SparseMatrix& M, const SparseMatrix& A, const SparseMatrix& MV,
                            double tau, std::span<const int> order) {
  if (!(tau != 0.0)) throw ConfigError("build_operators: tau must be nonzero");
  CNOperators ops;
  ops.M = std::make_shared<const SparseMatrix>(M);
  ops.A = std::make_shared<const SparseMatrix>(A);
  ops.MV = std::make_shared<const SparseMatrix>(MV);
  ops.tau = tau;
  const cplx half = kI * (0.5 * tau);
  const std::vector<cplx> c1{1.0, half, half};
  const std::vector<cplx> c2{1.0, -half, -half};
  ops.L1 = axpy_combine(c1, {M, A, MV});
  ops.L2 = axpy_combine(c2, {M, A, MV});
  ops.fact = std::make_shared<const Factorization>(factorize(ops.L1, order));
  return ops;
}

namespace {

double m_norm(const SparseMatrix& M, std::span<const cplx> v) {
  return std::sqrt(std::max(0.0, dot_form(M, v, v).real()));
}

}  // namespace

StepResult fixed_point_step(const CNState& state, const CNOperators& ops, const Assembler& assembler,
                            const NonlinearityModel& model, const CNConfig& cfg,
                            const CVector* previous) {
  cfg.validate();
  if (cfg.tau != ops.tau) {
    throw ConfigError("fixed_point_step: config tau differs from the operators' tau");
  }
  const std::size_t n = state.U.size();
  if (static_cast<int>(n) != assembler.num_dofs() || static_cast<int>(n) != ops.L1.size()) {
    throw DimensionError("fixed_point_step: state does not match the mesh");
  }
  const CVector& Un = state.U;

  // L1^{-1} L2 U^n, shared by every iteration of this step
  CVector base = spmv(ops.L2, Un);
  ops.fact->solve_in_place(base);

  CVector Ui = Un;
  if (cfg.predictor == Predictor::linear_extrapolation && previous != nullptr &&
      previous->size() == n) {
    for (std::size_t k = 0; k < n; ++k) Ui[k] = 2.0 * Un[k] - (*previous)[k];
  }

  StepResult out;
  SparseMatrix MG = assembler.zero_matrix();
  CVector mid(n), z(n), next(n), diff(n);
  const cplx scale = -kI * ops.tau;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const double cmax = assembler.nonlinear_mass_into(MG, model, Ui, Un);
    if (cmax == 0.0) {
      // the map no longer depends on U_i: its value is the fixed point
      out.state.U = base;
      out.iters = it;
      out.residual = 0.0;
      out.residual_history.push_back(0.0);
      out.state.t = state.t + ops.tau;
      out.state.step = state.step + 1;
      return out;
    }
    for (std::size_t k = 0; k < n; ++k) mid[k] = 0.5 * (Ui[k] + Un[k]);
    spmv_into(MG, mid, z);
    ops.fact->solve_in_place(z);
    for (std::size_t k = 0; k < n; ++k) {
      next[k] = base[k] + scale * z[k];
      diff[k] = next[k] - Ui[k];
    }
    const double norm_next = m_norm(*ops.M, next);
    const double dnorm = m_norm(*ops.M, diff);
    const double res = norm_next > 0.0 ? dnorm / norm_next : dnorm;
    out.residual_history.push_back(res);
    Ui.swap(next);
    if (res <= cfg.fp_tol) {
      out.state.U = std::move(Ui);
      out.iters = it;
      out.residual = res;
      out.state.t = state.t + ops.tau;
      out.state.step = state.step + 1;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "fixed-point iteration did not reach " << cfg.fp_tol << " within " << cfg.max_iters
      << " iterations (last residual " << out.residual_history.back()
      << "); the time step is likely too large for the contraction";
  throw ConvergenceError(msg.str(), out.residual_history.back());
}

EvolveResult evolve(const CNState& state0, long n_steps, const CNOperators& ops,
                    const Assembler& assembler, const NonlinearityModel& model, const CNConfig& cfg,
                    const StepObserver& observer) {
  cfg.validate();
  if (n_steps < 0) throw ConfigError("evolve: negative step count");
  EvolveResult out;
  out.final_state = state0;
  out.log.reserve(static_cast<std::size_t>(n_steps) + 1);

  ObservableRecord r0;
  r0.step = state0.step;
  r0.t = state0.t;
  r0.mass = mass(*ops.M, state0.U);
  r0.energy = energy(*ops.A, *ops.MV, assembler, model, state0.U);
  out.log.push_back(r0);

  CVector previous;
  for (long s = 0; s < n_steps; ++s) {
    StepResult step;
    try {
      step = fixed_point_step(out.final_state, ops, assembler, model, cfg,
                              previous.empty() ? nullptr : &previous);
    } catch (const Error& e) {
      throw EvolutionError(std::string("step ") + std::to_string(out.final_state.step + 1) +
                               " failed: " + e.what(),
                           out.log);
    }
    const auto& h = step.residual_history;
    for (std::size_t k = 1; k < h.size(); ++k) {
      if (h[k] > h[k - 1]) out.contraction_monotone = false;
    }
    if (cfg.predictor == Predictor::linear_extrapolation) previous = out.final_state.U;
    out.final_state = std::move(step.state);

    ObservableRecord r;
    r.step = out.final_state.step;
    r.t = out.final_state.t;
    r.mass = mass(*ops.M, out.final_state.U);
    r.energy = energy(*ops.A, *ops.MV, assembler, model, out.final_state.U);
    r.iters = step.iters;
    r.residual = step.residual;
    out.log.push_back(r);
    if (observer) observer(StepInfo{out.log.back(), out.final_state.U, step.residual_history});
  }
  return out;
}

}  // namespace nlscn
