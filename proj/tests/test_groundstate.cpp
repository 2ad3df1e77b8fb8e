#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlscn/diagnostics.hpp"
#include "nlscn/errors.hpp"
#include "nlscn/groundstate.hpp"
#include "test_util.hpp"

using namespace nlscn;

namespace {

const Bounds kBox{-5.0, 5.0, -5.0, 5.0};

struct Setup {
  RectMesh mesh;
  Assembler as;
  SparseMatrix M, A, MV;
  Setup(int n, const PotentialFn& V)
      : mesh(build_mesh(kBox, n, n, BoundaryKind::dirichlet)),
        as(mesh),
        M(as.mass()),
        A(as.stiffness()),
        MV(as.potential_mass(V)) {}
  GroundStateResult run(const NonlinearityModel& model, std::span<const cplx> init = {},
                        GroundStateConfig cfg = {}) const {
    return compute_ground_state(as, M, A, MV, model, cfg, init, dissection_order(mesh));
  }
};

PotentialFn harmonic11 = [](double x, double y) { return x * x + y * y; };

}  // namespace

TEST_CASE("harmonic oscillator eigenvalue") {
  Setup s(200, harmonic11);
  const auto r = s.run(make_zero_model());
  CHECK(std::abs(r.lambda0 - 2.0) <= 5e-3);
  CHECK(r.residual <= 1e-10);
  CHECK(mass(s.M, r.u0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.energy0 == doctest::Approx(0.5 * r.lambda0).epsilon(1e-9));
}

TEST_CASE("Laplace eigenvalue and profile") {
  Setup s(64, [](double, double) { return 0.0; });
  const auto r = s.run(make_zero_model());
  const double exact = 2 * std::pow(std::numbers::pi / 10, 2);
  CHECK(std::abs(exact - 0.19739) < 1e-5);
  CHECK(std::abs(r.lambda0 - exact) < 2e-3 * exact);
  // u0 is proportional to the discrete product of sines: compare shapes
  const auto sines = interpolate(s.mesh, [](double x, double y) {
    return cplx(std::sin(std::numbers::pi * (x + 5) / 10) * std::sin(std::numbers::pi * (y + 5) / 10), 0);
  });
  const double c = std::sqrt(mass(s.M, sines));
  CVector d(sines.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = r.u0[i] - sines[i] / c;
  CHECK(std::sqrt(mass(s.M, d)) < 1e-3);
}

TEST_CASE("nonlinear ground state properties") {
  Setup s(40, harmonic11);
  const auto model = make_saturated_model(1, 1);
  const auto r = s.run(model);
  CHECK(r.lambda0 >= r.energy0);
  // positive up to rounding in the far tail, where the exact state is
  // below 1e-10 of its peak
  double peak = 0.0;
  for (const auto& z : r.u0) peak = std::max(peak, z.real());
  for (const auto& z : r.u0) {
    CHECK(z.real() > -1e-11 * peak);
    CHECK(z.imag() == 0.0);
  }
  for (std::size_t k = 1; k < r.energy_history.size(); ++k)
    CHECK(r.energy_history[k] <= r.energy_history[k - 1] + 1e-12 * std::abs(r.energy_history[k - 1]));
  CHECK(mass(s.M, r.u0) == doctest::Approx(1.0).epsilon(1e-12));

  const auto g1 = random_positive_guess(s.mesh, 1), g2 = random_positive_guess(s.mesh, 2);
  const auto r1 = s.run(model, g1), r2 = s.run(model, g2);
  CVector d(r1.u0.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = r1.u0[i] - r2.u0[i];
  CHECK(std::sqrt(mass(s.M, d)) < 1e-8);
  CHECK(r1.lambda0 == doctest::Approx(r2.lambda0).epsilon(1e-10));

  const auto fact = factorize(s.M, dissection_order(s.mesh));
  const auto er = ground_state_residual(s.as, s.M, s.A, s.MV, fact, model, r.u0);
  CHECK(er.residual <= 1e-10);
  CHECK(er.lambda == doctest::Approx(r.lambda0).epsilon(1e-12));
}

TEST_CASE("ground state failures") {
  Setup s(10, harmonic11);
  GroundStateConfig cfg;
  cfg.max_iters = 2;
  CHECK_THROWS_AS(s.run(make_zero_model(), {}, cfg), ConvergenceError);
  cfg = {};
  cfg.dt_imag = 0.0;
  CHECK_THROWS_AS(s.run(make_zero_model(), {}, cfg), ConfigError);
  const CVector short_guess(3, 1.0);
  CHECK_THROWS_AS(s.run(make_zero_model(), short_guess), DimensionError);
  const CVector zero_guess(s.mesh.num_dofs(), 0.0);
  CHECK_THROWS_AS(s.run(make_zero_model(), zero_guess), Error);
}
