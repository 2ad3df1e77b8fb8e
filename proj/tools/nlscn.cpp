// Command-line front end: groundstate, evolve, convergence and compare runs
// driven by a JSON config.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "nlscn/harness.hpp"

namespace {

std::string show(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crank-Nicolson FEM / Strang-spectral solver for the nonlinear Schroedinger equation"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Maximum concurrent runs in sweeps")->check(CLI::PositiveNumber);

  std::string config_path, out_dir = "out";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
  };
  CLI::App* gs = app.add_subcommand("groundstate", "Compute the ground state named by initial.*");
  CLI::App* ev = app.add_subcommand("evolve", "Time-step the configured problem");
  CLI::App* cv = app.add_subcommand("convergence", "Error/rate table over the convergence section");
  CLI::App* cp = app.add_subcommand("compare", "CN-FEM vs SP2 against a CN-FEM reference");
  for (CLI::App* s : {gs, ev, cv, cp}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  try {
    const nlscn::ConfigFile cfg = nlscn::load_config(config_path);
    const std::filesystem::path out(out_dir);
    if (gs->parsed()) {
      const auto rep = nlscn::run_groundstate(cfg.run, out);
      const auto& g = *rep.ground_state;
      std::printf("ground state: %d iterations, residual %.3e, lambda0 %.10f, energy %.10f\n", g.iterations,
                  g.residual, g.lambda0, g.energy0);
      std::printf("energy in the run potential: %.10f\n", rep.log.front().energy);
      if (!rep.state_path.empty()) std::printf("state written to %s\n", rep.state_path.c_str());
    } else if (ev->parsed()) {
      const auto rep = nlscn::run_evolve(cfg.run, out);
      const auto& last = rep.log.back();
      std::printf("%ld steps to t = %.6g on %d dofs (%s)\n", last.step, last.t, rep.n_dofs,
                  nlscn::to_string(cfg.run.method));
      std::printf("initial energy %.10f, max relative drift: mass %.3e, energy %.3e\n", rep.log.front().energy,
                  rep.max_mass_drift(), rep.max_energy_drift());
      std::printf("wall %.2fs (groundstate %.2f, assembly %.2f, factorization %.2f, stepping %.2f, io %.2f)\n",
                  rep.timings.total, rep.timings.groundstate, rep.timings.assembly, rep.timings.factorization,
                  rep.timings.stepping, rep.timings.io);
    } else if (cv->parsed()) {
      if (!cfg.convergence) throw nlscn::ConfigError("config has no 'convergence' section");
      const auto table = nlscn::run_convergence(cfg.run, *cfg.convergence, out, threads);
      std::printf("%10s %12s %12s %12s %12s\n", "h", "tau", "l2", "h1_semi", "l1_density");
      for (const auto& e : table.entries) {
        std::printf("%10.5f %12.4e %12.4e %12.4e %12.4e\n", e.h, e.tau, e.err.l2, e.err.h1_semi, e.err.l1_density);
      }
      std::printf("tau-order (finest h):   l2 %s  h1 %s  l1_density %s\n", show(table.tau_order.l2).c_str(),
                  show(table.tau_order.h1_semi).c_str(), show(table.tau_order.l1_density).c_str());
      std::printf("h-order (finest tau):   l2 %s  h1 %s  l1_density %s\n", show(table.h_order.l2).c_str(),
                  show(table.h_order.h1_semi).c_str(), show(table.h_order.l1_density).c_str());
    } else if (cp->parsed()) {
      if (!cfg.compare) throw nlscn::ConfigError("config has no 'compare' section");
      const auto table = nlscn::run_compare(cfg.run, *cfg.compare, out, threads);
      std::printf("reference initial energy %.8f\n", table.reference_energy);
      std::printf("%-7s %6s %12s %12s %12s %9s\n", "method", "res", "tau", "l1_density", "h1_semi", "wall_s");
      for (const auto& e : table.entries) {
        std::printf("%-7s %6d %12.4e %12.4e %12.4e %9.2f\n", nlscn::to_string(e.method), e.resolution, e.tau,
                    e.err.l1_density, e.err.h1_semi, e.wall);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
