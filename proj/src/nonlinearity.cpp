#include "nlscn/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "nlscn/errors.hpp"

namespace nlscn {

namespace {

// (z - log1p(z)) / z for z >= 0, without cancellation near zero.
double log1p_defect_ratio(double z) {
  if (z == 0.0) {
    return 0.0;
  }
  if (z < 1e-2) {
    // z/2 - z^2/3 + z^3/4 - ...
    double term = 1.0;
    double sum = 0.0;
    for (int k = 2; k <= 12; ++k) {
      sum += ((k % 2 == 0) ? 1.0 : -1.0) * term / k;
      term *= z;
    }
    return z * sum;
  }
  return (z - std::log1p(z)) / z;
}

}  // namespace

NonlinearityModel make_power_model(double kappa, double q) {
  if (q < 0.0) {
    throw ModelError("power nonlinearity needs q >= 0");
  }
  if (q == 1.0) {
    return make_cubic_model(kappa);
  }
  NonlinearityModel m;
  std::ostringstream name;
  name << "power(kappa=" << kappa << ",q=" << q << ")";
  m.name = name.str();
  m.gamma = [kappa, q](double r) { return kappa * std::pow(r, q); };
  m.Gamma = [kappa, q](double r) { return kappa * std::pow(r, q + 1.0) / (q + 1.0); };
  m.gamma_prime = [kappa, q](double r) {
    if (q == 0.0) return 0.0;
    return kappa * q * std::pow(r, q - 1.0);
  };
  // b^q * expm1((q+1) L) / expm1(L) / (q+1) with L = log(a/b); both expm1
  // calls see the same rounded L, so their ratio stays smooth as a -> b.
  m.quotient = [kappa, q](double a, double b) {
    if (a == 0.0) {
      return kappa * std::pow(b, q) / (q + 1.0);
    }
    const double L = std::log(a / b);
    if (L == 0.0) {
      return kappa * std::pow(b, q);
    }
    return kappa * std::pow(b, q) * std::expm1((q + 1.0) * L) / std::expm1(L) / (q + 1.0);
  };
  m.identically_zero = (kappa == 0.0);
  return m;
}

NonlinearityModel make_cubic_model(double kappa) {
  NonlinearityModel m;
  std::ostringstream name;
  name << "cubic(kappa=" << kappa << ")";
  m.name = name.str();
  m.gamma = [kappa](double r) { return kappa * r; };
  m.Gamma = [kappa](double r) { return 0.5 * kappa * r * r; };
  m.gamma_prime = [kappa](double) { return kappa; };
  m.quotient = [kappa](double a, double b) { return 0.5 * kappa * (a + b); };
  m.identically_zero = (kappa == 0.0);
  return m;
}

NonlinearityModel make_saturated_model(double kappa, double alpha) {
  if (alpha < 0.0) {
    throw ModelError("saturated nonlinearity needs alpha >= 0");
  }
  if (alpha == 0.0) {
    return make_cubic_model(kappa);
  }
  NonlinearityModel m;
  std::ostringstream name;
  name << "saturated(kappa=" << kappa << ",alpha=" << alpha << ")";
  m.name = name.str();
  m.gamma = [kappa, alpha](double r) { return kappa * r / (1.0 + alpha * r); };
  m.Gamma = [kappa, alpha](double r) {
    const double z = alpha * r;
    return kappa / (alpha * alpha) * z * log1p_defect_ratio(z);
  };
  m.gamma_prime = [kappa, alpha](double r) {
    const double d = 1.0 + alpha * r;
    return kappa / (d * d);
  };
  // kappa/alpha * (alpha a + h(z)) / (1 + alpha a),  z = alpha (b - a) / (1 + alpha a),
  // h(z) = (z - log1p z) / z. Every term is nonnegative.
  m.quotient = [kappa, alpha](double a, double b) {
    const double da = 1.0 + alpha * a;
    const double z = alpha * (b - a) / da;
    return kappa / alpha * (alpha * a + log1p_defect_ratio(z)) / da;
  };
  m.identically_zero = (kappa == 0.0);
  return m;
}

NonlinearityModel make_zero_model() {
  NonlinearityModel m = make_cubic_model(0.0);
  m.name = "zero";
  return m;
}

double gamma_quotient(double a, double b, const NonlinearityModel& model, double eps_den) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw DomainError("gamma_quotient: densities must be nonnegative");
  }
  if (!(eps_den > 0.0)) {
    throw DomainError("gamma_quotient: eps_den must be positive");
  }
  const double scale = std::max({1.0, a, b});
  if (std::abs(b - a) < eps_den * scale) {
    return model.gamma(0.5 * (a + b));
  }
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (model.quotient) {
    return model.quotient(lo, hi);
  }
  return (model.Gamma(hi) - model.Gamma(lo)) / (hi - lo);
}

ModelValidationReport validate_model(const NonlinearityModel& model, double r_max,
                                     int n_samples) {
  if (!(r_max > 0.0) || n_samples < 10) {
    throw ConfigError("validate_model: need r_max > 0 and at least 10 samples");
  }
  if (!model.gamma || !model.Gamma || !model.gamma_prime) {
    throw ModelError("nonlinearity '" + model.name + "' is missing gamma, Gamma or gamma'");
  }
  ModelValidationReport rep;
  rep.n_samples = n_samples;
  rep.gamma_at_zero = model.gamma(0.0);
  rep.Gamma_at_zero = model.Gamma(0.0);
  rep.min_gamma = std::numeric_limits<double>::infinity();

  std::vector<double> rs(n_samples);
  double gmax = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    // log-spaced over three decades, ending at r_max
    const double s = static_cast<double>(i) / (n_samples - 1);
    rs[i] = r_max * std::pow(10.0, -3.0 * (1.0 - s));
    gmax = std::max(gmax, std::abs(model.gamma(rs[i])));
  }
  const double floor_scale = gmax > 0.0 ? 1e-12 * gmax : 1.0;

  for (double r : rs) {
    const double g = model.gamma(r);
    rep.min_gamma = std::min(rep.min_gamma, g);
    const double step = std::min(1e-5 * std::max(1.0, r), 0.5 * r);
    const double scale = std::max(std::abs(g), floor_scale);

    const double dGamma = (model.Gamma(r + step) - model.Gamma(r - step)) / (2.0 * step);
    rep.max_antiderivative_deviation =
        std::max(rep.max_antiderivative_deviation, std::abs(dGamma - g) / scale);

    const double gp = model.gamma_prime(r);
    const double dgamma = (model.gamma(r + step) - model.gamma(r - step)) / (2.0 * step);
    const double gp_scale = std::max(std::abs(gp), floor_scale);
    rep.max_derivative_deviation =
        std::max(rep.max_derivative_deviation, std::abs(dgamma - gp) / gp_scale);
  }

  const std::string who = "nonlinearity '" + model.name + "': ";
  if (rep.gamma_at_zero != 0.0) {
    throw ModelError(who + "gamma(0) != 0");
  }
  if (rep.Gamma_at_zero != 0.0) {
    throw ModelError(who + "Gamma(0) != 0");
  }
  if (rep.min_gamma < 0.0) {
    throw ModelError(who + "gamma is negative (focusing) on the sample grid");
  }
  if (!(rep.max_antiderivative_deviation <= kModelValidationTol)) {
    throw ModelError(who + "Gamma' = gamma check failed");
  }
  if (!(rep.max_derivative_deviation <= kModelValidationTol)) {
    throw ModelError(who + "gamma' check failed");
  }
  return rep;
}

}  // namespace nlscn
