#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlscn/assembly.hpp"
#include "nlscn/diagnostics.hpp"
#include "nlscn/errors.hpp"
#include "nlscn/nonlinearity.hpp"
#include "nlscn/sparse.hpp"
#include "nlscn/types.hpp"

namespace nlscn {

enum class Predictor { previous_step, linear_extrapolation };

Predictor predictor_from_string(const std::string& s);
const char* to_string(Predictor p);

struct CNConfig {
  /// Signed step; a negative value integrates backward in time.
  double tau = 1.0 / 64.0;
  /// Relative tolerance on ||U_{i+1} - U_i||_M / ||U_{i+1}||_M.
  double fp_tol = 1e-14;
  int max_iters = 50;
  Predictor predictor = Predictor::previous_step;

  /// Throws ConfigError on tau == 0, fp_tol < 1e-15 or max_iters < 1.
  void validate() const;
};

struct CNState {
  CVector U;
  double t = 0.0;
  long step = 0;
};

/// L1 = M + (i tau / 2)(A + M_V), L2 = M - (i tau / 2)(A + M_V), and the
/// factorization of L1 that every step of a run reuses.
struct CNOperators {
  std::shared_ptr<const SparseMatrix> M;
  std::shared_ptr<const SparseMatrix> A;
  std::shared_ptr<const SparseMatrix> MV;
  SparseMatrix L1;
  SparseMatrix L2;
  std::shared_ptr<const Factorization> fact;
  double tau = 0.0;
};

/// `order` is forwarded to factorize(); pass dissection_order(mesh) for
/// structured meshes.
CNOperators build_operators(const SparseMatrix& M, const SparseMatrix& A, const SparseMatrix& MV,
                            double tau, std::span<const int> order = {});

struct StepResult {
  CNState state;
  int iters = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/// One Crank-Nicolson step solved by the fixed-point iteration
///
///   U_{i+1} = L1^{-1} L2 U^n - i tau L1^{-1} M_Gamma(U_i, U^n) (U_i + U^n) / 2,
///
/// started from the configured predictor. `previous` is U^{n-1}, used by the
/// linear-extrapolation predictor when present. Throws ConvergenceError
/// after cfg.max_iters iterations.
StepResult fixed_point_step(const CNState& state, const CNOperators& ops, const Assembler& assembler,
                            const NonlinearityModel& model, const CNConfig& cfg,
                            const CVector* previous = nullptr);

struct StepInfo {
  const ObservableRecord& record;
  std::span<const cplx> U;
  std::span<const double> residual_history;
};
using StepObserver = std::function<void(const StepInfo&)>;

struct EvolveResult {
  CNState final_state;
  /// Entry 0 describes the initial state; entry k the state after step k.
  std::vector<ObservableRecord> log;
  /// Every step's residual sequence decreased after its first iteration.
  bool contraction_monotone = true;
};

/// Raised when a step fails mid-run; carries the log up to the failure.
class EvolutionError : public Error {
 public:
  EvolutionError(const std::string& what, std::vector<ObservableRecord> partial_log)
      : Error(what), partial_log_(std::move(partial_log)) {}
  const std::vector<ObservableRecord>& partial_log() const { return partial_log_; }

 private:
  std::vector<ObservableRecord> partial_log_;
};

EvolveResult evolve(const CNState& state0, long n_steps, const CNOperators& ops,
                    const Assembler& assembler, const NonlinearityModel& model, const CNConfig& cfg,
                    const StepObserver& observer = {});

}  // namespace nlscn
