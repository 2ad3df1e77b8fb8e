#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlscn/assembly.hpp"
#include "nlscn/cn_solver.hpp"
#include "nlscn/groundstate.hpp"
#include "nlscn/mesh.hpp"
#include "nlscn/nonlinearity.hpp"

namespace nlscn {

using json = nlohmann::json;

struct NonlinearitySpec {
  /// "zero", "cubic" (kappa), "power" (kappa, q) or "saturated" (kappa, alpha)
  std::string type = "zero";
  double kappa = 0.0;
  double alpha = 0.0;
  double q = 1.0;

  NonlinearityModel build() const;
  static NonlinearitySpec from_json(const json& j);
  json to_json() const;
};

struct PotentialSpec {
  /// "zero", "constant" (value), "harmonic" (nu_x, nu_y),
  /// "harmonic_barrier" (nu_x, nu_y, height, half_width) or "expression" (expr).
  /// harmonic:          (nu_x x)^2 + (nu_y y)^2
  /// harmonic_barrier:  harmonic + height (1{|x| >= w} + 1{|y| >= w})
  std::string type = "zero";
  double nu_x = 0.0, nu_y = 0.0;
  double height = 0.0, half_width = 1.0;
  double value = 0.0;
  std::string expr;
  /// Adaptive refinement depth for the potential mass matrix (0 = plain rule).
  int adaptive_levels = 0;

  PotentialFn build() const;
  /// V is a constant (zero included); `value` receives it.
  bool is_constant(double* value = nullptr) const;
  static PotentialSpec from_json(const json& j);
  json to_json() const;
};

struct InitialSpec {
  /// "ground_state", "file", "expression" (re, im) or "eigenmode" (mx, my):
  /// the unit-mass lowest-order product of sines (Dirichlet) or plane wave
  /// exp(i 2 pi (mx x / Lx + my y / Ly)) (periodic).
  std::string type = "ground_state";
  PotentialSpec potential;
  std::optional<NonlinearitySpec> nonlinearity;  // defaults to the run's
  GroundStateConfig gs;
  std::string path;
  std::string re = "0", im = "0";
  bool normalize = false;
  int mx = 1, my = 1;

  static InitialSpec from_json(const json& j, const std::filesystem::path& base_dir);
  json to_json() const;
};

struct SolverSpec {
  double fp_tol = 1e-14;
  int max_iters = 50;
  Predictor predictor = Predictor::previous_step;
};

/// File names written below the output directory; empty disables a file.
struct OutputSpec {
  std::string log = "log.csv";
  std::string state = "final_state.bin";
  std::string report = "report.json";
  std::string density = "density.csv";
};

enum class Method { cn_fem, sp2 };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct RunConfig {
  std::string name = "run";
  Method method = Method::cn_fem;
  Bounds bounds{-5.0, 5.0, -5.0, 5.0};
  int nx = 100, ny = 100;
  BoundaryKind bc = BoundaryKind::dirichlet;
  double tau = 1.0 / 64.0;
  double T_final = 1.0;
  NonlinearitySpec nonlinearity;
  PotentialSpec potential;
  InitialSpec initial;
  SolverSpec solver;
  OutputSpec output;

  /// T_final / tau, which must be an integer to within half an ulp.
  long n_steps() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
  RectMesh mesh() const { return RectMesh(bounds, nx, ny, bc); }
  CNConfig cn_config() const;

  /// Relative paths in the document (initial state file) resolve against base_dir.
  static RunConfig from_json(const json& j, const std::filesystem::path& base_dir = {});
  json to_json() const;
};

/// One entry of a sweep: a resolution and a step size.
struct Resolution {
  int nx = 0;
  double tau = 0.0;
};

struct ConvergenceSpec {
  std::vector<int> nx_list;
  std::vector<double> tau_list;
  /// Finer run used as the reference; ignored when `exact` is set.
  Resolution reference;
  /// Compare against the closed-form solution (eigenmode initial data of a
  /// linear problem), evaluated on a mesh `exact_refine` times finer than the
  /// finest entry.
  bool exact = false;
  int exact_refine = 4;

  static ConvergenceSpec from_json(const json& j);
  json to_json() const;
};

struct CompareSpec {
  std::vector<Resolution> cn_runs;
  std::vector<Resolution> sp2_runs;  // nx is the spectral N
  Resolution reference;              // CN-FEM

  static CompareSpec from_json(const json& j);
  json to_json() const;
};

/// The whole document: a run plus optional sweep sections.
struct ConfigFile {
  RunConfig run;
  std::optional<ConvergenceSpec> convergence;
  std::optional<CompareSpec> compare;
};

ConfigFile load_config(const std::filesystem::path& path);
ConfigFile parse_config(const json& j, const std::filesystem::path& base_dir = {});

}  // namespace nlscn
