#include "nlscn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include "nlscn/cn_solver.hpp"
#include "nlscn/errors.hpp"
#include "nlscn/expression.hpp"
#include "nlscn/groundstate.hpp"
#include "nlscn/spectral.hpp"
#include "nlscn/state_io.hpp"

namespace nlscn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs fn, adds its wall time to `slot`, and tags any library error with the phase.
template <class Fn>
auto timed(const char* phase, double& slot, Fn&& fn) {
  const auto t0 = Clock::now();
  struct Add {
    double& slot;
    Clock::time_point t0;
    ~Add() { slot += seconds_since(t0); }
  } add{slot, t0};
  try {
    return fn();
  } catch (const PhaseError&) {
    throw;
  } catch (const EvolutionError&) {
    throw;
  } catch (const Error& e) {
    throw PhaseError(phase, e.what());
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

void write_log_csv(const std::filesystem::path& path, const std::vector<ObservableRecord>& log) {
  std::string s = observable_csv_header() + "\n";
  for (const auto& r : log) s += observable_csv_row(r) + "\n";
  write_text(path, s);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json("undefined"); }

GroundStateResult solve_ground_state(const RunConfig& cfg, const RectMesh& mesh) {
  const Assembler as(mesh);
  const SparseMatrix M = as.mass();
  const SparseMatrix A = as.stiffness();
  const SparseMatrix MV0 = as.potential_mass(cfg.initial.potential.build(), cfg.initial.potential.adaptive_levels);
  const NonlinearityModel model =
      cfg.initial.nonlinearity ? cfg.initial.nonlinearity->build() : cfg.nonlinearity.build();
  return compute_ground_state(as, M, A, MV0, model, cfg.initial.gs, {}, dissection_order(mesh));
}

GroundStateSummary summarize(const GroundStateResult& r) {
  return {r.lambda0, r.energy0, r.residual, r.iterations};
}

// Unit-mass eigenfunction of -Laplace with the mesh's boundary condition and
// its eigenvalue.
std::pair<std::function<cplx(double, double)>, double> eigenmode(const RunConfig& cfg) {
  const Bounds b = cfg.bounds;
  const double Lx = b.width(), Ly = b.height();
  const int mx = cfg.initial.mx, my = cfg.initial.my;
  if (cfg.bc == BoundaryKind::dirichlet) {
    const double kx = mx * std::numbers::pi / Lx, ky = my * std::numbers::pi / Ly;
    const double amp = 2.0 / std::sqrt(Lx * Ly);
    return {[=](double x, double y) {
              return cplx{amp * std::sin(kx * (x - b.ax)) * std::sin(ky * (y - b.ay)), 0.0};
            },
            kx * kx + ky * ky};
  }
  const double kx = 2.0 * std::numbers::pi * mx / Lx, ky = 2.0 * std::numbers::pi * my / Ly;
  const double amp = 1.0 / std::sqrt(Lx * Ly);
  return {[=](double x, double y) { return amp * std::polar(1.0, kx * (x - b.ax) + ky * (y - b.ay)); },
          kx * kx + ky * ky};
}

int scaled_ny(const RunConfig& base, int nx) {
  const long prod = static_cast<long>(nx) * base.ny;
  if (prod % base.nx != 0) {
    throw ConfigError("nx = " + std::to_string(nx) + " does not keep the base aspect ratio " +
                      std::to_string(base.nx) + ":" + std::to_string(base.ny));
  }
  return static_cast<int>(prod / base.nx);
}

RunConfig derive(const RunConfig& base, Method method, int nx, double tau) {
  RunConfig c = base;
  c.method = method;
  c.nx = nx;
  c.ny = method == Method::sp2 ? nx : scaled_ny(base, nx);
  c.tau = tau;
  c.validate();
  return c;
}

// Initial data computed once per distinct mesh size, concurrently.
std::map<int, CVector> initial_states(const RunConfig& base, const std::set<int>& sizes, int threads) {
  const std::vector<int> list(sizes.begin(), sizes.end());
  std::vector<CVector> out(list.size());
  parallel_for(static_cast<int>(list.size()), threads, [&](int i) {
    RunConfig c = base;
    c.nx = list[i];
    c.ny = scaled_ny(base, list[i]);
    out[i] = initial_state(c, c.mesh());
  });
  std::map<int, CVector> m;
  for (std::size_t i = 0; i < list.size(); ++i) m.emplace(list[i], std::move(out[i]));
  return m;
}

}  // namespace

// ------------------------------------------------------------------- reports

json PhaseTimings::to_json() const {
  return json{{"groundstate", groundstate}, {"assembly", assembly}, {"factorization", factorization},
              {"stepping", stepping},       {"io", io},             {"total", total}};
}

json GroundStateSummary::to_json() const {
  return json{{"lambda0", lambda0}, {"energy0", energy0}, {"residual", residual}, {"iterations", iterations}};
}

double RunReport::max_mass_drift() const {
  double d = 0.0;
  for (const auto& r : log) d = std::max(d, std::abs(r.mass - log.front().mass) / std::abs(log.front().mass));
  return d;
}

double RunReport::max_energy_drift() const {
  double d = 0.0;
  for (const auto& r : log) {
    d = std::max(d, std::abs(r.energy - log.front().energy) / std::abs(log.front().energy));
  }
  return d;
}

json RunReport::to_json() const {
  json j{{"config", config}, {"n_dofs", n_dofs}, {"steps", log.empty() ? 0 : log.back().step}};
  if (!log.empty()) {
    j["initial"] = {{"mass", log.front().mass}, {"energy", log.front().energy}};
    j["final"] = {{"t", log.back().t}, {"mass", log.back().mass}, {"energy", log.back().energy}};
    j["max_relative_mass_drift"] = max_mass_drift();
    j["max_relative_energy_drift"] = max_energy_drift();
    std::vector<int> iters;
    for (std::size_t k = 1; k < log.size(); ++k) iters.push_back(log[k].iters);
    if (!iters.empty()) {
      std::sort(iters.begin(), iters.end());
      j["iterations"] = {{"min", iters.front()}, {"max", iters.back()}, {"median", iters[iters.size() / 2]}};
    }
  }
  j["contraction_monotone"] = contraction_monotone;
  if (ground_state) j["ground_state"] = ground_state->to_json();
  if (!state_path.empty()) j["state_file"] = state_path;
  j["timings_s"] = timings.to_json();
  return j;
}

json OrderTriple::to_json() const {
  return json{{"l2", opt_json(l2)}, {"h1_semi", opt_json(h1_semi)}, {"l1_density", opt_json(l1_density)}};
}

json ConvergenceTable::to_json() const {
  json rows = json::array();
  for (const auto& e : entries) {
    rows.push_back({{"nx", e.nx},
                    {"h", e.h},
                    {"tau", e.tau},
                    {"l2", e.err.l2},
                    {"h1_semi", e.err.h1_semi},
                    {"l1_density", e.err.l1_density},
                    {"wall_s", e.wall}});
  }
  return json{{"entries", rows}, {"tau_order", tau_order.to_json()}, {"h_order", h_order.to_json()}};
}

json CompareTable::to_json() const {
  json rows = json::array();
  for (const auto& e : entries) {
    rows.push_back({{"method", to_string(e.method)},
                    {"resolution", e.resolution},
                    {"h", e.h},
                    {"tau", e.tau},
                    {"l2", e.err.l2},
                    {"h1_semi", e.err.h1_semi},
                    {"l1_density", e.err.l1_density},
                    {"wall_s", e.wall}});
  }
  return json{{"entries", rows},
              {"reference", {{"nx", reference.nx}, {"tau", reference.tau}}},
              {"reference_initial_energy", reference_energy}};
}

// ------------------------------------------------------------- initial data

CVector initial_state(const RunConfig& cfg, const RectMesh& mesh, GroundStateSummary* gs) {
  const InitialSpec& in = cfg.initial;
  if (in.type == "ground_state") {
    GroundStateResult r = solve_ground_state(cfg, mesh);
    if (gs) *gs = summarize(r);
    return std::move(r.u0);
  }
  if (in.type == "file") return load_state(in.path, mesh).U;
  if (in.type == "eigenmode") return interpolate(mesh, eigenmode(cfg).first);
  if (in.type == "expression") {
    const Expression re(in.re), im(in.im);
    CVector U = interpolate(mesh, [&](double x, double y) { return cplx{re(x, y), im(x, y)}; });
    if (in.normalize) {
      const double m = std::sqrt(mass(assemble_mass(mesh), U));
      if (!(m > 0.0)) throw ConfigError("initial: cannot normalize a zero state");
      for (cplx& v : U) v /= m;
    }
    return U;
  }
  throw ConfigError("initial: unknown type '" + in.type + "'");
}

std::optional<CVector> exact_solution(const RunConfig& cfg, const RectMesh& mesh, double t) {
  double v0 = 0.0;
  const bool linear = cfg.nonlinearity.type == "zero" || cfg.nonlinearity.kappa == 0.0;
  if (cfg.initial.type != "eigenmode" || !linear || !cfg.potential.is_constant(&v0)) return std::nullopt;
  const auto [phi, lambda] = eigenmode(cfg);
  const cplx phase = std::polar(1.0, -(lambda + v0) * t);
  CVector U = interpolate(mesh, phi);
  for (cplx& v : U) v *= phase;
  return U;
}

// ------------------------------------------------------------------ drivers

RunReport run_groundstate(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  const auto t_start = Clock::now();
  cfg.validate();
  if (cfg.initial.type != "ground_state") throw ConfigError("groundstate: initial.type must be ground_state");
  RunReport rep;
  rep.config = cfg.to_json();
  const RectMesh mesh = timed("assembly", rep.timings.assembly, [&] { return cfg.mesh(); });
  const GroundStateResult gs =
      timed("groundstate", rep.timings.groundstate, [&] { return solve_ground_state(cfg, mesh); });
  rep.ground_state = summarize(gs);
  rep.n_dofs = mesh.num_dofs();
  timed("assembly", rep.timings.assembly, [&] {
    const Assembler as(mesh);
    const SparseMatrix A = as.stiffness();
    const SparseMatrix MV = as.potential_mass(cfg.potential.build(), cfg.potential.adaptive_levels);
    ObservableRecord r;
    r.mass = mass(as.mass(), gs.u0);
    r.energy = energy(A, MV, as, cfg.nonlinearity.build(), gs.u0);
    r.residual = gs.residual;
    r.iters = gs.iterations;
    rep.log.push_back(r);
    return 0;
  });
  rep.final_U = gs.u0;
  if (!out_dir.empty()) {
    timed("io", rep.timings.io, [&] {
      std::filesystem::create_directories(out_dir);
      if (!cfg.output.state.empty()) {
        rep.state_path = (out_dir / cfg.output.state).string();
        save_state(rep.state_path, mesh, gs.u0);
      }
      if (!cfg.output.density.empty()) write_density_csv(out_dir / cfg.output.density, mesh, gs.u0);
      return 0;
    });
  }
  rep.timings.total = seconds_since(t_start);
  if (!out_dir.empty() && !cfg.output.report.empty()) {
    const auto t0 = Clock::now();
    json j = rep.to_json();
    j["history"] = gs.energy_history;
    write_text(out_dir / cfg.output.report, j.dump(2) + "\n");
    rep.timings.io += seconds_since(t0);
  }
  return rep;
}

RunReport run_evolve(const RunConfig& cfg, const std::filesystem::path& out_dir, const CVector* initial) {
  const auto t_start = Clock::now();
  cfg.validate();
  const long n_steps = cfg.n_steps();
  RunReport rep;
  rep.config = cfg.to_json();
  const NonlinearityModel model = cfg.nonlinearity.build();
  const RectMesh mesh = timed("assembly", rep.timings.assembly, [&] { return cfg.mesh(); });
  rep.n_dofs = mesh.num_dofs();

  CVector U0;
  timed("groundstate", rep.timings.groundstate, [&] {
    if (initial != nullptr) {
      if (static_cast<int>(initial->size()) != mesh.num_dofs()) {
        throw DimensionError("initial vector does not match the mesh");
      }
      U0 = *initial;
    } else {
      GroundStateSummary gs;
      U0 = initial_state(cfg, mesh, &gs);
      if (cfg.initial.type == "ground_state") rep.ground_state = gs;
    }
    return 0;
  });

  auto flush_partial = [&](const std::vector<ObservableRecord>& log) {
    if (out_dir.empty() || cfg.output.log.empty()) return;
    std::filesystem::create_directories(out_dir);
    write_log_csv(out_dir / cfg.output.log, log);
  };

  if (cfg.method == Method::cn_fem) {
    struct Mats {
      Assembler as;
      SparseMatrix M, A, MV;
    };
    const auto mats = timed("assembly", rep.timings.assembly, [&] {
      Assembler as(mesh);
      SparseMatrix M = as.mass(), A = as.stiffness();
      SparseMatrix MV = as.potential_mass(cfg.potential.build(), cfg.potential.adaptive_levels);
      return std::make_unique<Mats>(Mats{std::move(as), std::move(M), std::move(A), std::move(MV)});
    });
    const CNOperators ops = timed("factorization", rep.timings.factorization, [&] {
      return build_operators(mats->M, mats->A, mats->MV, cfg.tau, dissection_order(mesh));
    });
    try {
      const EvolveResult res = timed("stepping", rep.timings.stepping, [&] {
        return evolve(CNState{U0, 0.0, 0}, n_steps, ops, mats->as, model, cfg.cn_config());
      });
      rep.log = res.log;
      rep.final_U = res.final_state.U;
      rep.contraction_monotone = res.contraction_monotone;
    } catch (const EvolutionError& e) {
      flush_partial(e.partial_log());
      throw PhaseError("stepping", e.what());
    }
  } else {
    SpectralGrid grid;
    std::vector<double> V;
    timed("assembly", rep.timings.assembly, [&] {
      grid = dofs_to_grid(mesh, U0);
      V = sample_potential(grid, cfg.potential.build());
      return 0;
    });
    const SP2Result res =
        timed("stepping", rep.timings.stepping, [&] { return evolve_sp2(grid, n_steps, V, model, cfg.tau); });
    rep.log = res.log;
    rep.final_U = grid_to_dofs(res.final_grid, mesh);
  }

  if (!out_dir.empty()) {
    timed("io", rep.timings.io, [&] {
      std::filesystem::create_directories(out_dir);
      if (!cfg.output.log.empty()) write_log_csv(out_dir / cfg.output.log, rep.log);
      if (!cfg.output.state.empty()) {
        rep.state_path = (out_dir / cfg.output.state).string();
        save_state(rep.state_path, mesh, rep.final_U, rep.log.back().t, rep.log.back().step);
      }
      if (!cfg.output.density.empty()) write_density_csv(out_dir / cfg.output.density, mesh, rep.final_U);
      return 0;
    });
  }
  rep.timings.total = seconds_since(t_start);
  if (!out_dir.empty() && !cfg.output.report.empty()) {
    const auto t0 = Clock::now();
    write_text(out_dir / cfg.output.report, rep.to_json().dump(2) + "\n");
    rep.timings.io += seconds_since(t0);
    rep.timings.total = seconds_since(t_start);
  }
  return rep;
}

// ------------------------------------------------------------------- sweeps

std::optional<double> fit_order(std::span<const double> x, std::span<const double> err) {
  if (x.size() != err.size() || x.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(err[k] > 0.0) || !(x[k] > 0.0)) return std::nullopt;
    const double lx = std::log(x[k]), ly = std::log(err[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

OrderTriple fit_triple(const std::vector<double>& x, const std::vector<const ErrorNorms*>& e) {
  std::vector<double> l2, h1, l1;
  for (const ErrorNorms* n : e) {
    l2.push_back(n->l2);
    h1.push_back(n->h1_semi);
    l1.push_back(n->l1_density);
  }
  return {fit_order(x, l2), fit_order(x, h1), fit_order(x, l1)};
}

}  // namespace

ConvergenceTable run_convergence(const RunConfig& base, const ConvergenceSpec& spec,
                                 const std::filesystem::path& out_dir, int threads) {
  base.validate();
  if (base.method != Method::cn_fem) throw ConfigError("convergence: only cn-fem runs are supported");
  if (spec.nx_list.empty() || spec.tau_list.empty()) throw ConfigError("convergence: empty sweep");
  const int nx_max = *std::max_element(spec.nx_list.begin(), spec.nx_list.end());
  const double tau_min = *std::min_element(spec.tau_list.begin(), spec.tau_list.end());

  RunConfig ref_cfg;
  if (spec.exact) {
    if (spec.exact_refine < 1) throw ConfigError("convergence: exact_refine must be >= 1");
    ref_cfg = derive(base, Method::cn_fem, nx_max * spec.exact_refine, tau_min);
    if (!exact_solution(ref_cfg, ref_cfg.mesh(), 0.0)) {
      throw ConfigError("convergence: no closed-form solution for this problem");
    }
  } else {
    ref_cfg = derive(base, Method::cn_fem, spec.reference.nx, spec.reference.tau);
    for (int nx : spec.nx_list) {
      for (double tau : spec.tau_list) {
        if (spec.reference.nx < nx || spec.reference.tau > tau) {
          throw ConfigError("convergence: the reference must be at least as fine as every entry");
        }
      }
    }
  }
  const RectMesh ref_mesh = ref_cfg.mesh();
  std::vector<RunConfig> cfgs;
  for (int nx : spec.nx_list) {
    for (double tau : spec.tau_list) {
      cfgs.push_back(derive(base, Method::cn_fem, nx, tau));
      check_nested(cfgs.back().mesh(), ref_mesh);
    }
  }

  std::set<int> sizes(spec.nx_list.begin(), spec.nx_list.end());
  if (!spec.exact) sizes.insert(ref_cfg.nx);
  const auto init = initial_states(base, sizes, threads);

  std::vector<RunReport> reports(cfgs.size() + (spec.exact ? 0 : 1));
  parallel_for(static_cast<int>(reports.size()), threads, [&](int i) {
    const RunConfig& c = i < static_cast<int>(cfgs.size()) ? cfgs[i] : ref_cfg;
    reports[i] = run_evolve(c, {}, &init.at(c.nx));
  });

  ConvergenceTable table;
  CVector U_ref;
  if (spec.exact) {
    U_ref = *exact_solution(ref_cfg, ref_mesh, base.T_final);
  } else {
    U_ref = reports.back().final_U;
    table.reference_log = reports.back().log;
  }

  const ErrorEvaluator eval(ref_mesh);
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    const RectMesh mesh = cfgs[k].mesh();
    table.entries.push_back(
        {cfgs[k].nx, mesh.h(), cfgs[k].tau, eval(mesh, reports[k].final_U, U_ref), reports[k].timings.total});
  }
  std::vector<double> xs;
  std::vector<const ErrorNorms*> es;
  for (const auto& e : table.entries) {
    if (e.nx == nx_max) {
      xs.push_back(e.tau);
      es.push_back(&e.err);
    }
  }
  table.tau_order = fit_triple(xs, es);
  xs.clear();
  es.clear();
  for (const auto& e : table.entries) {
    if (e.tau == tau_min) {
      xs.push_back(e.h);
      es.push_back(&e.err);
    }
  }
  table.h_order = fit_triple(xs, es);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::string csv = "h,tau,l2,h1_semi,l1_density\n";
    for (const auto& e : table.entries) {
      csv += fmt("%.17g", e.h) + "," + fmt("%.17g", e.tau) + "," + fmt("%.17g", e.err.l2) + "," +
             fmt("%.17g", e.err.h1_semi) + "," + fmt("%.17g", e.err.l1_density) + "\n";
    }
    write_text(out_dir / "errors.csv", csv);
    json j = table.to_json();
    j["config"] = base.to_json();
    j["convergence"] = spec.to_json();
    write_text(out_dir / "report.json", j.dump(2) + "\n");
  }
  return table;
}

CompareTable run_compare(const RunConfig& base, const CompareSpec& spec, const std::filesystem::path& out_dir,
                         int threads) {
  base.validate();
  if (base.bc != BoundaryKind::periodic) throw ConfigError("compare: the problem must be periodic");
  if (!spec.sp2_runs.empty() && base.nx != base.ny) throw ConfigError("compare: sp2 needs a square grid");
  const RunConfig ref_cfg = derive(base, Method::cn_fem, spec.reference.nx, spec.reference.tau);
  const RectMesh ref_mesh = ref_cfg.mesh();

  std::vector<RunConfig> cfgs;
  for (const auto& r : spec.cn_runs) cfgs.push_back(derive(base, Method::cn_fem, r.nx, r.tau));
  for (const auto& r : spec.sp2_runs) cfgs.push_back(derive(base, Method::sp2, r.nx, r.tau));
  std::set<int> sizes{ref_cfg.nx};
  for (const auto& c : cfgs) {
    check_nested(c.mesh(), ref_mesh);
    sizes.insert(c.nx);
  }
  const auto init = initial_states(base, sizes, threads);

  std::vector<RunReport> reports(cfgs.size() + 1);
  parallel_for(static_cast<int>(reports.size()), threads, [&](int i) {
    const RunConfig& c = i < static_cast<int>(cfgs.size()) ? cfgs[i] : ref_cfg;
    reports[i] = run_evolve(c, {}, &init.at(c.nx));
  });

  CompareTable table;
  table.reference = spec.reference;
  table.reference_energy = reports.back().log.front().energy;
  const ErrorEvaluator eval(ref_mesh);
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    const RectMesh mesh = cfgs[k].mesh();
    table.entries.push_back({cfgs[k].method, cfgs[k].nx, mesh.h(), cfgs[k].tau,
                             eval(mesh, reports[k].final_U, reports.back().final_U), reports[k].timings.total});
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    // wall times live in report.json so that the CSV is reproducible byte for byte
    std::string csv = "method,resolution,tau,l1_density,h1_semi,l2\n";
    for (const auto& e : table.entries) {
      csv += std::string(to_string(e.method)) + "," + std::to_string(e.resolution) + "," + fmt("%.17g", e.tau) +
             "," + fmt("%.17g", e.err.l1_density) + "," + fmt("%.17g", e.err.h1_semi) + "," +
             fmt("%.17g", e.err.l2) + "\n";
    }
    write_text(out_dir / "compare.csv", csv);
    json j = table.to_json();
    j["config"] = base.to_json();
    j["compare"] = spec.to_json();
    write_text(out_dir / "report.json", j.dump(2) + "\n");
  }
  return table;
}

void write_density_csv(const std::filesystem::path& path, const RectMesh& mesh, std::span<const cplx> U) {
  if (static_cast<int>(U.size()) != mesh.num_dofs()) throw DimensionError("density dump: size mismatch");
  std::string s = "x,y,density\n";
  s.reserve(s.size() + 48 * U.size());
  char buf[96];
  for (int d = 0; d < mesh.num_dofs(); ++d) {
    const Point p = mesh.dof_point(d);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, std::norm(U[d]));
    s += buf;
  }
  write_text(path, s);
}

}  // namespace nlscn
