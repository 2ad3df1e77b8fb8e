#pragma once

#include <functional>
#include <string>

namespace nlscn {

/// Density-dependent coefficient gamma(rho) of the nonlinear term, carried
/// together with its antiderivative Gamma (Gamma(0) = 0) and derivative.
///
/// `quotient`, when set, evaluates (Gamma(b) - Gamma(a)) / (b - a) for a < b
/// in a cancellation-free closed form. Models without it fall back to the
/// plain difference of Gamma values.
struct NonlinearityModel {
  std::string name;
  std::function<double(double)> gamma;
  std::function<double(double)> Gamma;
  std::function<double(double)> gamma_prime;
  std::function<double(double, double)> quotient;
  bool identically_zero = false;
};

inline constexpr double kDefaultQuotientEps = 1e-12;

/// gamma(r) = kappa * r^q.
NonlinearityModel make_power_model(double kappa, double q);
/// gamma(r) = kappa * r.
NonlinearityModel make_cubic_model(double kappa);
/// gamma(r) = kappa * r / (1 + alpha r); alpha = 0 reduces to the cubic model.
NonlinearityModel make_saturated_model(double kappa, double alpha);
/// gamma = 0; the linear Schroedinger equation.
NonlinearityModel make_zero_model();

/// Mean value of gamma over [a, b]:  (Gamma(b) - Gamma(a)) / (b - a).
///
/// Symmetric in (a, b). When |b - a| < eps_den * max(1, a, b) the midpoint
/// value gamma((a + b) / 2) is returned instead. Throws DomainError for
/// negative densities or a non-positive threshold.
double gamma_quotient(double a, double b, const NonlinearityModel& model,
                      double eps_den = kDefaultQuotientEps);

struct ModelValidationReport {
  double gamma_at_zero = 0.0;
  double Gamma_at_zero = 0.0;
  double min_gamma = 0.0;
  /// max relative deviation of the central difference of Gamma from gamma
  double max_antiderivative_deviation = 0.0;
  /// max relative deviation of the central difference of gamma from gamma'
  double max_derivative_deviation = 0.0;
  int n_samples = 0;
};

inline constexpr double kModelValidationTol = 1e-6;

/// Checks gamma(0) = Gamma(0) = 0, gamma >= 0, Gamma' = gamma and
/// gamma' = d gamma / dr on a log-spaced grid in (0, r_max].
/// Throws ModelError naming the first failed property.
ModelValidationReport validate_model(const NonlinearityModel& model, double r_max,
                                     int n_samples);

}  // namespace nlscn
