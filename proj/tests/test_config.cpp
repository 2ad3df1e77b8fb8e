#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "nlscn/config.hpp"
#include "nlscn/errors.hpp"
#include "nlscn/expression.hpp"

using namespace nlscn;

namespace {

json minimal() {
  return json::parse(R"({
    "domain": { "bounds": [-5, 5, -5, 5], "nx": 20, "bc": "dirichlet" },
    "time": { "tau": "2^-6", "T_final": 0.5 },
    "initial": { "type": "eigenmode" }
  })");
}

}  // namespace

TEST_CASE("expression evaluation") {
  CHECK(Expression("2^-6")(0, 0) == 1.0 / 64);
  CHECK(Expression("2^3^2")(0, 0) == 512.0);
  CHECK(Expression("-2^2")(0, 0) == -4.0);
  CHECK(Expression("1 + 2 * 3 - 4 / 8")(0, 0) == 6.5);
  CHECK(Expression("x^2 + 9*y^2")(2, 1) == 13.0);
  CHECK(Expression("100*((abs(x) >= 1) + (abs(y) >= 1))")(1.0, 0.5) == 100.0);
  CHECK(Expression("100*((abs(x) >= 1) + (abs(y) >= 1))")(0.99, 0.5) == 0.0);
  CHECK(Expression("(x < y) + (x <= y) + (x > y)")(1, 1) == 1.0);
  CHECK(Expression("sin(pi/2) + cos(0) + exp(0) + log(1) + sqrt(16) + tanh(0) + tan(0)")(0, 0) ==
        doctest::Approx(7.0));
  CHECK(Expression("min(x, y) + max(x, y)")(3, -1) == 2.0);
  CHECK(Expression(" 1e-3 ")(0, 0) == 1e-3);
  CHECK(Expression("exp(-(x^2 + y^2)/2)")(1, 1) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("expression syntax errors") {
  for (const char* bad : {"", "1 +", "(1", "foo(1)", "sin 1", "max(1)", "1 $ 2", "x y"})
    CHECK_THROWS_AS(Expression{bad}, ConfigError);
  try {
    Expression("1 + * 2");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}

TEST_CASE("minimal config and defaults") {
  const auto c = parse_config(minimal());
  CHECK(c.run.nx == 20);
  CHECK(c.run.ny == 20);
  CHECK(c.run.tau == 1.0 / 64);
  CHECK(c.run.n_steps() == 32);
  CHECK(c.run.method == Method::cn_fem);
  CHECK(c.run.solver.fp_tol == 1e-14);
  CHECK(c.run.solver.max_iters == 50);
  CHECK_FALSE(c.convergence.has_value());
  CHECK_FALSE(c.compare.has_value());
  CHECK(c.run.mesh().num_dofs() == 19 * 19);
  CHECK(c.run.cn_config().tau == c.run.tau);
}

TEST_CASE("config rejects invalid documents") {
  auto expect_bad = [](const std::function<void(json&)>& edit) {
    json j = minimal();
    edit(j);
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  };
  expect_bad([](json& j) { j["bogus"] = 1; });
  expect_bad([](json& j) { j["domain"]["nz"] = 3; });
  expect_bad([](json& j) { j["time"]["tau"] = 0.3; });
  expect_bad([](json& j) { j["time"]["tau"] = -0.25; });
  expect_bad([](json& j) { j["domain"]["nx"] = 1; });
  expect_bad([](json& j) { j["domain"]["bc"] = "robin"; });
  expect_bad([](json& j) { j["method"] = "sp2"; });
  expect_bad([](json& j) {
    j["method"] = "sp2";
    j["domain"]["bc"] = "periodic";
    j["domain"]["nx"] = 24;
  });
  expect_bad([](json& j) { j["nonlinearity"] = {{"type", "quintic"}}; });
  expect_bad([](json& j) { j["potential"] = {{"type", "expression"}, {"expr", "x +"}}; });
  expect_bad([](json& j) { j["initial"] = {{"type", "file"}, {"path", "/nonexistent/state.bin"}}; });
  expect_bad([](json& j) { j.erase("time"); });
  expect_bad([](json& j) { j["domain"]["nx"] = "twenty"; });
  expect_bad([](json& j) { j["domain"]["nx"] = 20.5; });
}

TEST_CASE("potentials and nonlinearities") {
  json j = minimal();
  j["potential"] = {{"type", "harmonic_barrier"}, {"nu_x", 1}, {"nu_y", 3}, {"height", 100}};
  j["nonlinearity"] = {{"type", "saturated"}, {"kappa", 10}, {"alpha", 1}};
  const auto c = parse_config(j).run;
  const auto V = c.potential.build();
  CHECK(V(0.5, 0.5) == doctest::Approx(0.25 + 9 * 0.25));
  CHECK(V(1.0, 0.0) == doctest::Approx(101.0));
  CHECK(V(-2.0, 2.0) == doctest::Approx(4 + 36 + 200.0));
  const auto g = c.nonlinearity.build();
  CHECK(g.gamma(1.0) == doctest::Approx(5.0));
  CHECK_FALSE(c.potential.is_constant());

  PotentialSpec e;
  e.type = "expression";
  e.expr = "x^2 + (y > 0)";
  CHECK(e.build()(2, 1) == 5.0);
  PotentialSpec k;
  k.type = "constant";
  k.value = 2.5;
  double v = 0;
  CHECK(k.is_constant(&v));
  CHECK(v == 2.5);
}

TEST_CASE("JSON round trip") {
  json j = minimal();
  j["name"] = "trip";
  j["potential"] = {{"type", "harmonic"}, {"nu_x", 2}, {"nu_y", 3}};
  j["nonlinearity"] = {{"type", "power"}, {"kappa", 1.5}, {"q", 2}};
  j["solver"] = {{"fp_tol", 1e-13}, {"max_iters", 30}, {"predictor", "linear-extrapolation"}};
  j["convergence"] = {{"nx", {10, 20}}, {"tau", {"2^-4", "2^-5"}}, {"reference", {{"nx", 40}, {"tau", "2^-7"}}}};
  const auto c = parse_config(j);
  const auto again = RunConfig::from_json(c.run.to_json());
  CHECK(again.to_json() == c.run.to_json());
  CHECK(again.solver.predictor == Predictor::linear_extrapolation);
  CHECK(c.convergence->nx_list == std::vector<int>{10, 20});
  CHECK(c.convergence->tau_list[1] == 1.0 / 32);
  CHECK(c.convergence->reference.nx == 40);
  CHECK(ConvergenceSpec::from_json(c.convergence->to_json()).to_json() == c.convergence->to_json());
}

TEST_CASE("shipped presets parse") {
  const std::filesystem::path dir(NLSCN_PRESETS_DIR);
  int n = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_config(e.path()));
    ++n;
  }
  CHECK(n >= 6);
  const auto d = load_config(dir / "desk" / "discontinuous_compare.json");
  REQUIRE(d.compare.has_value());
  CHECK(d.compare->sp2_runs.size() == 3);
  CHECK(d.compare->reference.nx == 512);
  CHECK(d.run.potential.adaptive_levels == 10);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}
