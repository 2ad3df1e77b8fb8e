#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "nlscn/harness.hpp"
#include "nlscn/state_io.hpp"
#include "test_util.hpp"

using namespace nlscn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / "nlscn_test_harness" / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ConfigFile parse(const std::string& text) { return parse_config(json::parse(text)); }

const char* kHarmonic = R"({
  "domain": { "bounds": [-5, 5, -5, 5], "nx": 20, "bc": "dirichlet" },
  "time": { "tau": "2^-5", "T_final": 0.25 },
  "nonlinearity": { "type": "saturated", "kappa": 1, "alpha": 1 },
  "potential": { "type": "harmonic", "nu_x": 2, "nu_y": 3 },
  "initial": { "type": "ground_state", "potential": { "type": "harmonic", "nu_x": 1, "nu_y": 1 } }
})";

const char* kLinearMode = R"({
  "domain": { "bounds": [-5, 5, -5, 5], "nx": 10, "bc": "dirichlet" },
  "time": { "tau": "2^-7", "T_final": 0.5 },
  "initial": { "type": "eigenmode" },
  "convergence": { "nx": [10, 20, 40], "tau": ["2^-7"], "exact": true }
})";

const char* kPeriodic = R"js({
  "domain": { "bounds": [-5, 5, -5, 5], "nx": 16, "bc": "periodic" },
  "time": { "tau": "2^-6", "T_final": 0.25 },
  "nonlinearity": { "type": "saturated", "kappa": 1, "alpha": 1 },
  "potential": { "type": "harmonic", "nu_x": 1, "nu_y": 1 },
  "initial": { "type": "expression", "re": "exp(-(x^2 + y^2)/2) * cos(x)", "im": "exp(-(x^2+y^2)/2) * sin(x)",
               "normalize": true },
  "compare": {
    "cn": [ { "nx": 16, "tau": "2^-6" }, { "nx": 32, "tau": "2^-7" } ],
    "sp2": [ { "N": 16, "tau": "2^-7" }, { "N": 32, "tau": "2^-7" } ],
    "reference": { "nx": 128, "tau": "2^-8" }
  }
})js";

}  // namespace

TEST_CASE("fit_order") {
  const std::vector<double> x{0.1, 0.05, 0.025}, e{0.3, 0.075, 0.01875};
  CHECK(*fit_order(x, e) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(fit_order(std::vector<double>{0.1}, std::vector<double>{1.0}).has_value());
  CHECK_FALSE(fit_order(x, std::vector<double>{0.3, 0.0, 0.1}).has_value());
  CHECK_FALSE(fit_order(std::vector<double>{0.1, 0.1}, std::vector<double>{0.3, 0.2}).has_value());
}

TEST_CASE("parallel_for runs everything and rethrows") {
  std::atomic<int> sum{0};
  parallel_for(100, 4, [&](int i) { sum += i; });
  CHECK(sum == 4950);
  CHECK_THROWS_AS(parallel_for(10, 3, [](int i) { if (i == 7) throw ConfigError("boom"); }), ConfigError);
}

TEST_CASE("evolve run: outputs, drift, timings") {
  auto cfg = parse(kHarmonic).run;
  const auto out = scratch("evolve");
  const auto rep = run_evolve(cfg, out);
  CHECK(rep.log.size() == 9);
  REQUIRE(rep.ground_state.has_value());
  CHECK(rep.ground_state->residual <= 1e-10);
  CHECK(rep.max_mass_drift() <= 1e-12);
  CHECK(rep.max_energy_drift() <= 1e-10);
  CHECK(rep.contraction_monotone);
  CHECK(rep.timings.attributed() >= 0.95 * rep.timings.total);
  for (const char* f : {"log.csv", "final_state.bin", "report.json", "density.csv"}) CHECK(fs::exists(out / f));
  CHECK(load_state(out / "final_state.bin", cfg.mesh()).U == rep.final_U);
  const auto report = json::parse(slurp(out / "report.json"));
  CHECK(report.contains("timings_s"));
  CHECK(report.contains("config"));
  const auto log = slurp(out / "log.csv");
  CHECK(log.rfind("step,t,mass,energy,iters,residual\n", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 10);

  // identical config, identical bytes
  const auto out2 = scratch("evolve2");
  run_evolve(cfg, out2);
  CHECK(slurp(out / "log.csv") == slurp(out2 / "log.csv"));
  CHECK(slurp(out / "final_state.bin") == slurp(out2 / "final_state.bin"));

  // restart from the saved state
  auto cont = cfg;
  cont.initial = {};
  cont.initial.type = "file";
  cont.initial.path = (out / "final_state.bin").string();
  const auto rep2 = run_evolve(cont);
  CHECK(rep2.log.front().energy == doctest::Approx(rep.log.back().energy).epsilon(1e-14));

  const auto gs = run_groundstate(cfg, scratch("gs"));
  CHECK(gs.ground_state->lambda0 == rep.ground_state->lambda0);
  CHECK(fs::exists(gs.state_path));
}

TEST_CASE("zero-step run echoes the initial observables") {
  auto cfg = parse(kHarmonic).run;
  cfg.T_final = 0.0;
  const auto rep = run_evolve(cfg);
  REQUIRE(rep.log.size() == 1);
  CHECK(rep.log[0].step == 0);
  CHECK(rep.max_mass_drift() == 0.0);
  const auto U0 = initial_state(cfg, cfg.mesh());
  CHECK(rep.final_U == U0);
}

TEST_CASE("errors carry the failing phase") {
  auto cfg = parse(kHarmonic).run;
  cfg.potential.type = "expression";
  cfg.potential.expr = "x - 100";
  try {
    run_evolve(cfg);
    FAIL("expected a PhaseError");
  } catch (const PhaseError& e) {
    CHECK(e.phase() == "assembly");
  }
  auto stiff = parse(kHarmonic).run;
  stiff.solver.max_iters = 1;
  const auto out = scratch("partial");
  try {
    run_evolve(stiff, out);
    FAIL("expected a PhaseError");
  } catch (const PhaseError& e) {
    CHECK(e.phase() == "stepping");
  }
  CHECK(fs::exists(out / "log.csv"));
}

TEST_CASE("linear eigenmode: closed form and spatial order") {
  const auto c = parse(kLinearMode);
  const auto rep = run_evolve(c.run);
  const auto mesh = c.run.mesh();
  // the same run through the library directly
  Assembler as(mesh);
  const auto M = as.mass(), A = as.stiffness(), MV = as.potential_mass([](double, double) { return 0.0; });
  const auto ops = build_operators(M, A, MV, c.run.tau, dissection_order(mesh));
  const auto direct = evolve(CNState{initial_state(c.run, mesh)}, c.run.n_steps(), ops, as, make_zero_model(),
                             c.run.cn_config());
  CHECK(testutil::diff_norm(direct.final_state.U, rep.final_U) == 0.0);
  const auto exact = *exact_solution(c.run, mesh, c.run.T_final);
  CVector d(exact.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = rep.final_U[i] - exact[i];
  const double err = std::sqrt(dot_form(M, d, d).real());
  CHECK(err > 0.0);
  CHECK(err < 5e-3);

  const auto table = run_convergence(c.run, *c.convergence);
  REQUIRE(table.h_order.l2.has_value());
  CHECK(*table.h_order.l2 >= 1.7);
  CHECK(*table.h_order.l2 <= 2.3);
  CHECK_FALSE(table.tau_order.l2.has_value());  // a single tau
  CHECK(table.reference_log.empty());
}

TEST_CASE("identical reference gives zero errors and undefined orders") {
  const auto c = parse(kHarmonic);
  ConvergenceSpec spec;
  spec.nx_list = {20};
  spec.tau_list = {1.0 / 32};
  spec.reference = {20, 1.0 / 32};
  const auto t = run_convergence(c.run, spec);
  REQUIRE(t.entries.size() == 1);
  CHECK(t.entries[0].err.l2 == 0.0);
  CHECK(t.entries[0].err.h1_semi == 0.0);
  CHECK(t.entries[0].err.l1_density == 0.0);
  CHECK_FALSE(t.tau_order.l2.has_value());
  CHECK_FALSE(t.h_order.h1_semi.has_value());
  CHECK(t.to_json()["tau_order"]["l2"] == "undefined");

  spec.reference = {10, 1.0 / 64};
  CHECK_THROWS_AS(run_convergence(c.run, spec), ConfigError);
}

TEST_CASE("compare on smooth periodic data; determinism") {
  const auto c = parse(kPeriodic);
  const auto o1 = scratch("cmp1"), o2 = scratch("cmp2");
  const auto t = run_compare(c.run, *c.compare, o1, 2);
  run_compare(c.run, *c.compare, o2, 1);
  CHECK(slurp(o1 / "compare.csv") == slurp(o2 / "compare.csv"));
  REQUIRE(t.entries.size() == 4);
  // equal dof counts: spectral accuracy wins on smooth data
  CHECK(t.entries[2].err.l1_density < t.entries[0].err.l1_density);
  CHECK(t.entries[3].err.l1_density < t.entries[1].err.l1_density);
  CHECK(t.entries[3].err.l2 < t.entries[1].err.l2);
  CHECK(t.reference_energy > 0.0);

  auto dir = parse(kHarmonic);
  CHECK_THROWS_AS(run_compare(dir.run, *c.compare), ConfigError);
}
