#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlscn/diagnostics.hpp"
#include "nlscn/errors.hpp"
#include "test_util.hpp"

using namespace nlscn;

namespace {
const Bounds kBox{-5.0, 5.0, -5.0, 5.0};

// Norms of the difference of two P1 functions, integrated element by element
// on the fine mesh through point evaluation.
ErrorNorms oracle_norms(const RectMesh& coarse, const CVector& U, const RectMesh& fine, const CVector& R) {
  const double a = 0.445948490915965, b = 0.108103018168070, wa = 0.223381589678011;
  const double c = 0.091576213509771, d = 0.816847572980459, wc = 0.109951743655322;
  const double P[6][3] = {{a, a, b}, {a, b, a}, {b, a, a}, {c, c, d}, {c, d, c}, {d, c, c}};
  const double W[6] = {wa, wa, wa, wc, wc, wc};
  ErrorNorms e;
  for (const auto& tri : fine.elements()) {
    Point p[3];
    cplx dv[3];
    for (int k = 0; k < 3; ++k) {
      p[k] = fine.node(tri[k]);
      // nudge toward the centroid so periodic wrap and cell lookups agree
      dv[k] = 0.0;
    }
    const Point cen{(p[0].x + p[1].x + p[2].x) / 3, (p[0].y + p[1].y + p[2].y) / 3};
    auto at = [&](double l0, double l1, double l2) {
      const double s = 1.0 - 1e-9;
      const double x = s * (l0 * p[0].x + l1 * p[1].x + l2 * p[2].x) + (1 - s) * cen.x;
      const double y = s * (l0 * p[0].y + l1 * p[1].y + l2 * p[2].y) + (1 - s) * cen.y;
      return std::pair{eval_p1(coarse, U, {x, y}), eval_p1(fine, R, {x, y})};
    };
    const double area = fine.element_area();
    for (int q = 0; q < 6; ++q) {
      const auto [u, r] = at(P[q][0], P[q][1], P[q][2]);
      e.l2 += W[q] * area * std::norm(u - r);
    }
    for (int k = 0; k < 3; ++k) {
      double l[3] = {0, 0, 0};
      l[k] = 1.0;
      const auto [u, r] = at(l[0], l[1], l[2]);
      dv[k] = u - r;
      double m[3] = {0.5, 0.5, 0.5};
      m[k] = 0.0;
      const auto [um, rm] = at(m[0], m[1], m[2]);
      e.l1_density += area / 3.0 * std::abs(std::norm(um) - std::norm(rm));
    }
    const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    cplx gx = 0.0, gy = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Point& s = p[(k + 1) % 3];
      const Point& t = p[(k + 2) % 3];
      gx += dv[k] * (s.y - t.y) / det;
      gy += dv[k] * (t.x - s.x) / det;
    }
    e.h1_semi += area * (std::norm(gx) + std::norm(gy));
  }
  e.l2 = std::sqrt(e.l2);
  e.h1_semi = std::sqrt(e.h1_semi);
  return e;
}

}  // namespace

TEST_CASE("mass") {
  const auto mesh = build_mesh(kBox, 40, 40, BoundaryKind::dirichlet);
  const auto M = assemble_mass(mesh);
  CHECK(mass(M, CVector(mesh.num_dofs())) == 0.0);
  double prev = 0.0;
  for (int n : {40, 80}) {
    const auto m = build_mesh(kBox, n, n, BoundaryKind::dirichlet);
    const auto U = interpolate(m, [](double x, double y) { return cplx(std::exp(-(x * x + y * y) / 2), 0.0); });
    const double err = std::abs(mass(assemble_mass(m), U) - std::numbers::pi);
    CHECK(err < 5e-2);
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
    prev = err;
  }
  CHECK_THROWS_AS(mass(M, CVector(3)), DimensionError);
  std::vector<cplx> skew{cplx(1, 0), cplx(0, 1), cplx(0, 1), cplx(1, 0)};
  CHECK_THROWS_AS(mass(SparseMatrix::from_dense(2, skew), CVector{1.0, 1.0}), Error);
}

TEST_CASE("energy decomposition") {
  const auto mesh = build_mesh(kBox, 16, 16, BoundaryKind::dirichlet);
  Assembler as(mesh);
  const auto A = as.stiffness();
  const auto MV = as.potential_mass([](double x, double y) { return x * x + y * y; });
  const auto zero = make_zero_model();
  CHECK(energy(A, MV, as, zero, CVector(mesh.num_dofs())) == 0.0);
  const auto U = testutil::random_vector(mesh.num_dofs(), 3);
  const double quad = 0.5 * (dot_form(A, U, U).real() + dot_form(MV, U, U).real());
  CHECK(energy(A, MV, as, zero, U) == doctest::Approx(quad).epsilon(1e-15));
  const auto sat = make_saturated_model(10, 1);
  CHECK(energy(A, MV, as, sat, U) - quad ==
        doctest::Approx(0.5 * as.Gamma_integral(sat, U)).epsilon(1e-12));
  CHECK(energy(A, MV, mesh, sat, U) == energy(A, MV, as, sat, U));
}

TEST_CASE("error norms") {
  const auto coarse = build_mesh(kBox, 8, 8, BoundaryKind::periodic);
  const auto fine = build_mesh(kBox, 16, 16, BoundaryKind::periodic);
  const auto U = interpolate(coarse, [](double x, double y) {
    return std::exp(cplx(0, std::numbers::pi * x / 5)) * std::cos(std::numbers::pi * y / 5);
  });
  const auto e0 = error_norms(coarse, U, fine, prolong_nested(coarse, U, fine));
  CHECK(e0.l2 < 1e-14);
  CHECK(e0.h1_semi < 1e-14);
  CHECK(e0.l1_density < 1e-14);

  const auto R = interpolate(fine, [](double x, double y) {
    return cplx(std::sin(std::numbers::pi * x / 5) + 0.3, std::cos(std::numbers::pi * (x + y) / 5));
  });
  const auto got = error_norms(coarse, U, fine, R);
  const auto want = oracle_norms(coarse, U, fine, R);
  CHECK(got.l2 == doctest::Approx(want.l2).epsilon(1e-8));
  CHECK(got.h1_semi == doctest::Approx(want.h1_semi).epsilon(1e-8));
  CHECK(got.l1_density == doctest::Approx(want.l1_density).epsilon(1e-8));

  // swapping after matching meshes
  ErrorEvaluator ev(fine);
  const auto P = prolong_nested(coarse, U, fine);
  const auto ab = ev.on_reference(P, R), ba = ev.on_reference(R, P);
  CHECK(ab.l2 == ba.l2);
  CHECK(ab.h1_semi == ba.h1_semi);
  CHECK(ab.l1_density == ba.l1_density);

  // the density distance to zero is the mass
  const auto M = assemble_mass(fine);
  const double m = mass(M, R);
  CHECK(ev.on_reference(R, CVector(fine.num_dofs())).l1_density == doctest::Approx(m).epsilon(1e-13));

  CHECK_THROWS_AS(ev.on_reference(R, CVector(3)), DimensionError);
  CHECK_THROWS_AS(error_norms(build_mesh(kBox, 6, 6, BoundaryKind::periodic),
                              CVector(36), fine, R),
                  ConfigError);
}

TEST_CASE("log rows") {
  CHECK(observable_csv_header() == "step,t,mass,energy,iters,residual");
  ObservableRecord r{3, 0.5, 1.0, 2.5, 6, 1e-15};
  const auto row = observable_csv_row(r);
  CHECK(row.rfind("3,0.5,1,2.5,6,", 0) == 0);
}
