#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlscn/cn_solver.hpp"
#include "nlscn/groundstate.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nlscn;
using testutil::diff_norm;
using testutil::norm2;

namespace {

const Bounds kBox{-5.0, 5.0, -5.0, 5.0};

struct Problem {
  RectMesh mesh;
  Assembler as;
  SparseMatrix M, A, MV;
  Problem(int n, BoundaryKind bc, const PotentialFn& V)
      : mesh(build_mesh(kBox, n, n, bc)), as(mesh), M(as.mass()), A(as.stiffness()), MV(as.potential_mass(V)) {}
  CNOperators ops(double tau) const { return build_operators(M, A, MV, tau, dissection_order(mesh)); }
};

PotentialFn harmonic(double nx, double ny) {
  return [=](double x, double y) { return nx * nx * x * x + ny * ny * y * y; };
}

CVector tilted_gaussian(const RectMesh& m) {
  return interpolate(m, [](double x, double y) {
    return std::exp(-(x * x + y * y) / 2) * std::exp(cplx(0, 0.7 * x - 0.3 * y));
  });
}

}  // namespace

TEST_CASE("operator definitions") {
  Problem p(6, BoundaryKind::dirichlet, harmonic(2, 3));
  const double tau = 0.125;
  const auto ops = p.ops(tau);
  const auto l1 = ops.L1.to_dense(), l2 = ops.L2.to_dense();
  const auto m = p.M.to_dense(), a = p.A.to_dense(), v = p.MV.to_dense();
  for (std::size_t k = 0; k < m.size(); ++k) {
    CHECK(std::abs((l1[k] - l2[k]) - kI * tau * (a[k] + v[k])) < 1e-14);
    CHECK(std::abs(l1[k] + l2[k] - 2.0 * m[k]) < 1e-14);
  }
  const auto tiny = p.ops(1e-300);
  const auto t1 = tiny.L1.to_dense();
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(std::abs(t1[k] - m[k]) < 1e-290);
  CHECK_THROWS_AS(p.ops(0.0), ConfigError);

  // 4-dof periodic mesh against a dense solve
  Problem q(2, BoundaryKind::periodic, harmonic(1, 1));
  const auto qo = q.ops(0.1);
  const auto b = testutil::random_vector(4, 3);
  CHECK(diff_norm(qo.fact->solve(b), testutil::dense_solve(4, qo.L1.to_dense(), b)) < 1e-14);
}

TEST_CASE("CNConfig validation") {
  CNConfig c;
  CHECK_NOTHROW(c.validate());
  c.tau = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.fp_tol = 1e-16;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(predictor_from_string("linear-extrapolation") == Predictor::linear_extrapolation);
  CHECK_THROWS_AS(predictor_from_string("bogus"), ConfigError);
}

TEST_CASE("linear problem is one iteration of linear Crank-Nicolson") {
  Problem p(10, BoundaryKind::dirichlet, harmonic(1, 1));
  const auto ops = p.ops(0.05);
  CNConfig cfg;
  cfg.tau = 0.05;
  const CNState s{tilted_gaussian(p.mesh)};
  const auto r = fixed_point_step(s, ops, p.as, make_zero_model(), cfg);
  CHECK(r.iters == 1);
  const auto want = ops.fact->solve(spmv(ops.L2, s.U));
  CHECK(diff_norm(r.state.U, want) < 1e-14 * norm2(want));
  CHECK(r.state.step == 1);
  CHECK(r.state.t == doctest::Approx(0.05));
}

TEST_CASE("single-dof fixed point matches a scalar root-finder") {
  CHECK(oracles::single_dof_error() < 1e-12);
}

TEST_CASE("conservation, contraction and iteration counts") {
  Problem p(20, BoundaryKind::dirichlet, harmonic(2, 3));
  const auto model = make_saturated_model(1, 1);
  CNConfig cfg;
  cfg.tau = 1.0 / 64;
  cfg.fp_tol = 1e-15;
  const auto ops = p.ops(cfg.tau);
  const CNState s0{tilted_gaussian(p.mesh)};
  std::vector<int> iters;
  const auto res = evolve(s0, 16, ops, p.as, model, cfg, [&](const StepInfo& i) {
    if (i.record.step > 0) iters.push_back(i.record.iters);
  });
  CHECK(res.log.size() == 17);
  CHECK(iters.size() == 16);
  CHECK(res.contraction_monotone);
  for (int k : iters) {
    CHECK(k >= 3);
    CHECK(k <= 12);
  }
  for (const auto& r : res.log) {
    CHECK(std::abs(r.mass - res.log[0].mass) <= 10 * cfg.fp_tol * res.log[0].mass);
    CHECK(std::abs(r.energy - res.log[0].energy) <= 1e-12 * res.log[0].energy);
  }
  CHECK(res.final_state.t == doctest::Approx(0.25));

  const auto zero = evolve(s0, 0, ops, p.as, model, cfg);
  CHECK(zero.final_state.U == s0.U);
  CHECK(zero.log.size() == 1);
}

TEST_CASE("linear extrapolation predictor agrees") {
  Problem p(12, BoundaryKind::dirichlet, harmonic(1, 1));
  const auto model = make_cubic_model(2.0);
  CNConfig a, b;
  a.tau = b.tau = 1.0 / 32;
  b.predictor = Predictor::linear_extrapolation;
  const auto ops = p.ops(a.tau);
  const CNState s0{tilted_gaussian(p.mesh)};
  const auto ra = evolve(s0, 8, ops, p.as, model, a);
  const auto rb = evolve(s0, 8, ops, p.as, model, b);
  CHECK(diff_norm(ra.final_state.U, rb.final_state.U) < 1e-12);
}

TEST_CASE("time reversal and gauge covariance") {
  const auto s = oracles::symmetry_errors();
  CHECK(s.time_reversal <= 10 * s.fp_tol);
  CHECK(s.gauge <= 1e-12);
}

TEST_CASE("fixed point cap raises ConvergenceError") {
  Problem p(8, BoundaryKind::dirichlet, harmonic(1, 1));
  CNConfig cfg;
  cfg.tau = 0.1;
  cfg.max_iters = 1;
  const auto ops = p.ops(cfg.tau);
  const CNState s0{tilted_gaussian(p.mesh)};
  CHECK_THROWS_AS(fixed_point_step(s0, ops, p.as, make_cubic_model(5), cfg), ConvergenceError);
  CHECK_THROWS_AS(evolve(s0, 3, ops, p.as, make_cubic_model(5), cfg), EvolutionError);
}

TEST_CASE("linear eigenmode converges jointly at second order") {
  for (double p : oracles::eigenmode_joint_orders()) CHECK(p >= 1.7);
}
