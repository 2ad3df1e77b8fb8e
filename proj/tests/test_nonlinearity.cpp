#include <doctest.h>

#include <cmath>
#include <random>

#include "nlscn/errors.hpp"
#include "nlscn/nonlinearity.hpp"

using namespace nlscn;

namespace {

// Composite Gauss-Legendre (5 points per panel) mean of gamma over [a, b].
double quadrature_mean(const NonlinearityModel& m, double a, double b) {
  static const double xg[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                               0.9061798459386640};
  static const double wg[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                               0.2369268850561891, 0.2369268850561891};
  const int panels = 64;
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) s += wg[k] * m.gamma(c + 0.5 * h * xg[k]) * 0.5 * h;
  }
  return s / (b - a);
}

std::vector<NonlinearityModel> all_models() {
  return {make_cubic_model(1.0), make_saturated_model(1.0, 1.0), make_saturated_model(10.0, 1.0),
          make_power_model(2.0, 1.5), make_power_model(1.0, 2.0)};
}

}  // namespace

TEST_CASE("gamma_quotient examples") {
  const auto cubic = make_cubic_model(1.0);
  CHECK(gamma_quotient(1.0, 3.0, cubic) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(gamma_quotient(2.0, 2.0, cubic) == doctest::Approx(2.0).epsilon(1e-15));
  const auto sat = make_saturated_model(1.0, 1.0);
  CHECK(std::abs(gamma_quotient(0.0, 1.0, sat) - (1.0 - std::log(2.0))) < 1e-15);
  CHECK(std::abs(gamma_quotient(0.0, 1.0, sat) - 0.3068528) < 1e-7);
}

TEST_CASE("gamma_quotient rejects bad arguments") {
  const auto cubic = make_cubic_model(1.0);
  CHECK_THROWS_AS(gamma_quotient(-1.0, 1.0, cubic), DomainError);
  CHECK_THROWS_AS(gamma_quotient(1.0, -1e-3, cubic), DomainError);
  CHECK_THROWS_AS(gamma_quotient(1.0, 2.0, cubic, 0.0), DomainError);
}

TEST_CASE("zero model is identically zero") {
  const auto z = make_zero_model();
  CHECK(z.identically_zero);
  CHECK(gamma_quotient(0.3, 4.0, z) == 0.0);
}

TEST_CASE("saturated with alpha = 0 reduces to cubic") {
  const auto s = make_saturated_model(3.0, 0.0);
  const auto c = make_cubic_model(3.0);
  for (double a : {0.0, 0.5, 2.0})
    for (double b : {0.1, 1.0, 7.0}) CHECK(gamma_quotient(a, b, s) == doctest::Approx(gamma_quotient(a, b, c)));
}

TEST_CASE("validate_model accepts the shipped models") {
  const auto r = validate_model(make_cubic_model(1.0), 10.0, 100);
  CHECK(r.max_antiderivative_deviation <= 1e-6);
  CHECK(r.n_samples == 100);
  CHECK_NOTHROW(validate_model(make_saturated_model(10.0, 1.0), 10.0, 100));
  CHECK_NOTHROW(validate_model(make_power_model(2.0, 1.5), 10.0, 100));
  CHECK_NOTHROW(validate_model(make_zero_model(), 10.0, 100));
}

TEST_CASE("validate_model catches injected faults") {
  auto wrong_Gamma = make_cubic_model(1.0);
  wrong_Gamma.Gamma = [](double r) { return r; };
  CHECK_THROWS_AS(validate_model(wrong_Gamma, 10.0, 100), ModelError);

  auto wrong_prime = make_cubic_model(1.0);
  wrong_prime.gamma_prime = [](double r) { return 2.0 * r; };
  CHECK_THROWS_AS(validate_model(wrong_prime, 10.0, 100), ModelError);

  auto focusing = make_cubic_model(-1.0);
  CHECK_THROWS_AS(validate_model(focusing, 10.0, 100), ModelError);

  auto shifted = make_cubic_model(1.0);
  shifted.gamma = [](double r) { return r + 1.0; };
  CHECK_THROWS_AS(validate_model(shifted, 10.0, 100), ModelError);
}

TEST_CASE("quotient symmetry, bounds and quadrature oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (const auto& m : all_models()) {
    for (int s = 0; s < 2000; ++s) {
      const double a = u(rng), b = u(rng);
      const double q = gamma_quotient(a, b, m);
      CHECK(q == gamma_quotient(b, a, m));
      const double lo = std::min(m.gamma(a), m.gamma(b)), hi = std::max(m.gamma(a), m.gamma(b));
      CHECK(q >= lo * (1 - 1e-14) - 1e-300);
      CHECK(q <= hi * (1 + 1e-14));
      if (std::abs(b - a) > 1e-3) {
        const double ref = quadrature_mean(m, std::min(a, b), std::max(a, b));
        CHECK(std::abs(q - ref) <= 1e-8 * std::abs(ref));
      }
    }
  }
}

TEST_CASE("quotient is continuous across the degenerate threshold") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0), f(0.0, 4.0);
  const double eps = kDefaultQuotientEps;
  for (const auto& m : all_models()) {
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const double a = u(rng);
      const double d = f(rng) * eps * std::max(1.0, a);  // straddles the switch
      const double q = gamma_quotient(a, a + d, m);
      // |Q(a, a+d) - gamma(a + d/2)| <= max|gamma''| d^2 / 24 plus rounding
      worst = std::max(worst, std::abs(q - m.gamma(a + 0.5 * d)) / std::max(1.0, m.gamma(a)));
    }
    CHECK(worst <= 1e-12);
  }
}
