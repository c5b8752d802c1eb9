#pragma once

#include <string_view>

/// Shape parameter beta and the variance modifiers that let a Gaussian
/// rasterizer act like a generalized-exponential one.
///
/// Everything here takes the true exponent beta. Splats store the offset
/// b = beta - 2 so that b = 0 is the Gaussian case.

namespace ges::shape {

/// Gamma(3/beta) / Gamma(1/beta). Equals 0.5 at beta = 2.
/// Throws std::domain_error for beta <= 0.
double phi_exact_raw(double beta);

/// phi_exact_raw(beta) / phi_exact_raw(2); equals 1 at beta = 2.
double phi_exact_normalized(double beta);

/// d/dbeta of phi_exact_normalized.
double phi_exact_normalized_derivative(double beta);

/// Sigmoid approximation 2 / (1 + exp(-(rho*beta - 2*rho))).
/// Lies in (0, 2), equals 1 at beta = 2 and equals 1 everywhere when rho = 0.
double phi_bar(double beta, double rho);

/// Analytic derivative rho * phi_bar * (1 - phi_bar / 2).
double phi_bar_derivative(double beta, double rho);

enum class ModifierMode { kExactNormalized, kApproximate };

std::string_view to_string(ModifierMode mode);
ModifierMode modifier_mode_from_string(std::string_view name);

/// Variance multiplier applied to a splat's covariance as a function of beta.
struct ShapeModifier {
  double rho = 0.1;
  ModifierMode mode = ModifierMode::kApproximate;

  /// Throws std::invalid_argument when rho < 0 or not finite.
  void validate() const;

  double value(double beta) const;
  double derivative(double beta) const;

  /// Modifier that is identically 1: plain Gaussian splatting.
  static ShapeModifier gaussian() { return {0.0, ModifierMode::kApproximate}; }
};

}  // namespace ges::shape
