#include "ges/shape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ges/special.hpp"

namespace ges::shape {

double phi_exact_raw(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("phi_exact_raw: beta must be positive");
  return std::exp(special::log_gamma(3.0 / beta) - special::log_gamma(1.0 / beta));
}

double phi_exact_normalized(double beta) {
  static const double at_two = phi_exact_raw(2.0);
  return phi_exact_raw(beta) / at_two;
}

double phi_exact_normalized_derivative(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("phi_exact_normalized_derivative: beta must be positive");
  // d/dbeta [lnG(3/b) - lnG(1/b)] = (-3 psi(3/b) + psi(1/b)) / b^2
  const double dlog =
      (-3.0 * special::digamma(3.0 / beta) + special::digamma(1.0 / beta)) / (beta * beta);
  return phi_exact_normalized(beta) * dlog;
}

double phi_bar(double beta, double rho) {
  return 2.0 / (1.0 + std::exp(-(rho * beta - 2.0 * rho)));
}

double phi_bar_derivative(double beta, double rho) {
  const double phi = phi_bar(beta, rho);
  return rho * phi * (1.0 - 0.5 * phi);
}

std::string_view to_string(ModifierMode mode) {
  return mode == ModifierMode::kExactNormalized ? "exact" : "approximate";
}

ModifierMode modifier_mode_from_string(std::string_view name) {
  if (name == "exact" || name == "exact_normalized") return ModifierMode::kExactNormalized;
  if (name == "approximate" || name == "approx") return ModifierMode::kApproximate;
  throw std::invalid_argument("unknown modifier mode: " + std::string(name));
}

void ShapeModifier::validate() const {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw std::invalid_argument("ShapeModifier: rho must be finite and >= 0");
  }
}

double ShapeModifier::value(double beta) const {
  if (mode == ModifierMode::kExactNormalized) return phi_exact_normalized(beta);
  return phi_bar(beta, rho);
}

double ShapeModifier::derivative(double beta) const {
  if (mode == ModifierMode::kExactNormalized) return phi_exact_normalized_derivative(beta);
  return phi_bar_derivative(beta, rho);
}

}  // namespace ges::shape
