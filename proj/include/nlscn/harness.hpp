#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlscn/config.hpp"
#include "nlscn/diagnostics.hpp"
#include "nlscn/errors.hpp"

namespace nlscn {

/// A library error re-raised with the run phase it came from
/// ("groundstate", "assembly", "factorization", "stepping" or "io").
class PhaseError : public Error {
 public:
  PhaseError(const std::string& phase, const std::string& what)
      : Error("phase '" + phase + "': " + what), phase_(phase) {}
  const std::string& phase() const { return phase_; }

 private:
  std::string phase_;
};

/// Wall-clock seconds per phase of a run.
struct PhaseTimings {
  double groundstate = 0.0;
  double assembly = 0.0;
  double factorization = 0.0;
  double stepping = 0.0;
  double io = 0.0;
  double total = 0.0;

  double attributed() const { return groundstate + assembly + factorization + stepping + io; }
  json to_json() const;
};

struct GroundStateSummary {
  double lambda0 = 0.0;
  /// Energy in the ground-state problem (its own potential).
  double energy0 = 0.0;
  double residual = 0.0;
  int iterations = 0;
  json to_json() const;
};

struct RunReport {
  json config;
  int n_dofs = 0;
  std::vector<ObservableRecord> log;
  /// Final nodal vector on cfg.mesh() (for sp2: the grid values, which are
  /// the dofs of the coincident periodic mesh).
  CVector final_U;
  std::string state_path;
  PhaseTimings timings;
  bool contraction_monotone = true;
  std::optional<GroundStateSummary> ground_state;

  double max_mass_drift() const;    // relative to the initial mass
  double max_energy_drift() const;  // relative to the initial energy
  json to_json() const;
};

/// Initial data of `cfg` on `mesh`. Ground states are computed here; the
/// summary is stored when `gs` is non-null.
CVector initial_state(const RunConfig& cfg, const RectMesh& mesh, GroundStateSummary* gs = nullptr);

/// Closed-form solution at time t when one is known: eigenmode initial data,
/// gamma = 0 and constant V. Returns nodal values on `mesh`.
std::optional<CVector> exact_solution(const RunConfig& cfg, const RectMesh& mesh, double t);

/// Ground state only: writes the state file and report.json below out_dir.
RunReport run_groundstate(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Ground state (if requested), then CN-FEM or SP2 time stepping. With a
/// non-empty out_dir writes the log CSV, final state, density CSV and
/// report.json. `initial` overrides the configured initial data. Errors are
/// rethrown with the failing phase named; the partial log is flushed first.
RunReport run_evolve(const RunConfig& cfg, const std::filesystem::path& out_dir = {},
                     const CVector* initial = nullptr);

/// Least-squares slope of log(err) against log(x). Undefined (nullopt) with
/// fewer than two points or any non-positive error.
std::optional<double> fit_order(std::span<const double> x, std::span<const double> err);

struct ConvergenceEntry {
  int nx = 0;
  double h = 0.0;
  double tau = 0.0;
  ErrorNorms err;
  double wall = 0.0;
};

struct OrderTriple {
  std::optional<double> l2, h1_semi, l1_density;
  json to_json() const;
};

struct ConvergenceTable {
  std::vector<ConvergenceEntry> entries;
  /// Fitted on the finest-h row across tau.
  OrderTriple tau_order;
  /// Fitted on the finest-tau column across h.
  OrderTriple h_order;
  /// Observables of the reference run (empty for a closed-form reference).
  std::vector<ObservableRecord> reference_log;
  json to_json() const;
};

/// Runs every (nx, tau) pair of the sweep plus the reference, up to `threads`
/// runs at a time. Writes errors.csv and report.json when out_dir is set.
ConvergenceTable run_convergence(const RunConfig& base, const ConvergenceSpec& spec,
                                 const std::filesystem::path& out_dir = {}, int threads = 1);

struct CompareEntry {
  Method method = Method::cn_fem;
  int resolution = 0;  // nx for CN-FEM, N for SP2
  double h = 0.0;
  double tau = 0.0;
  ErrorNorms err;
  double wall = 0.0;
};

struct CompareTable {
  std::vector<CompareEntry> entries;
  Resolution reference;
  double reference_energy = 0.0;
  json to_json() const;
};

/// CN-FEM and SP2 runs of one periodic problem against a fine CN-FEM
/// reference. The SP2 solution is taken at its grid points, which are nodes
/// of the periodic mesh with nx = N; that P1 function is compared like any
/// other coarse run. Writes compare.csv and report.json when out_dir is set.
CompareTable run_compare(const RunConfig& base, const CompareSpec& spec,
                         const std::filesystem::path& out_dir = {}, int threads = 1);

/// Calls job(i) for i in [0, n) on at most `threads` threads; rethrows the
/// first failure after all workers stop.
void parallel_for(int n, int threads, const std::function<void(int)>& job);

/// "x,y,density" per dof.
void write_density_csv(const std::filesystem::path& path, const RectMesh& mesh, std::span<const cplx> U);

}  // namespace nlscn
