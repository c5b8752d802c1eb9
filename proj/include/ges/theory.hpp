#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ges/quadrature.hpp"
#include "ges/shape.hpp"

/// Numerical checks of the square-wave approximation result and of the
/// boundary-error ratio bounds for the variance-modified rasterization.

namespace ges::theory {

/// Square pulse of height `amplitude` on (-width/2, width/2) approximated by a
/// kernel amplitude * exp(-(|t|/alpha)^beta). width = 0 is accepted as the
/// degenerate pulse.
struct SquareApproxProblem {
  double amplitude = 1.0;
  double width = 1.0;
  double alpha = 0.2;

  void validate() const;
};

struct Kernel {
  double beta = 2.0;

  static Kernel gaussian() { return {2.0}; }
  static Kernel gef(double beta) { return {beta}; }
};

struct ApproxError {
  double value = 0.0;
  /// Upper bound on the mass dropped beyond tail_end and right next to t = 0.
  double truncation_bound = 0.0;
  double tail_end = 0.0;
  long evaluations = 0;
};

/// E_f = integral over the real line of |S(t) - f(t)| by adaptive Simpson,
/// split at the pulse edges. The tail is cut where the kernel drops below
/// 1e-14 and the dropped mass is below tol / 10; a sliver at t = 0 holding
/// at most tol / 10 is bounded instead of integrated.
/// Throws QuadratureError when the integration does not converge.
ApproxError approx_error(const SquareApproxProblem& p, const Kernel& kernel, double tol = 1e-8);

/// 200 log-spaced points in [0.2, 40].
std::vector<double> default_beta_grid();

enum class SignPrediction { kAboveTwo, kBelowTwo, kNone };

std::string to_string(SignPrediction p);

struct GridBest {
  double beta = 0.0;
  double error = 0.0;
};

struct Theorem1Report {
  SquareApproxProblem problem;
  double beta_star = 0.0;
  double e_gaussian = 0.0;
  double e_gef = 0.0;
  double delta = 0.0;
  /// delta > 0.
  bool verified = false;
  SignPrediction prediction = SignPrediction::kNone;
  /// Empty when the problem sits on the L/2 = alpha boundary.
  std::optional<bool> sign_rule_holds;
  GridBest best_below_two;
  GridBest best_above_two;
  std::string message;
};

/// Grid search for the GEF shape with the smallest error and comparison
/// against the Gaussian kernel with the same alpha. Never throws on a failed
/// verification; the report carries verified = false and a message instead.
Theorem1Report verify_theorem1(const SquareApproxProblem& p, std::span<const double> beta_grid,
                               double tol = 1e-8);

struct EtaBounds {
  double low = 0.0;
  double high = 0.0;
};

/// (4 - pi) / pi and (pi - 2) / pi from the square and circle area formulas.
EtaBounds eta_bounds();

struct EtaEstimate {
  double eta = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double circle_radius = 0.0;
};

/// Monte-Carlo estimate of area(S xor C) / area(C), where S is the superellipse
/// |x|^beta + |y|^beta <= 1 (unit-variance level set at density exp(-1/2)) and
/// C is the circle of radius sqrt(phi(beta)) given by the effective variance.
/// Requires beta >= 2 and samples >= 10^4.
EtaEstimate eta_monte_carlo(double beta, std::size_t samples, std::uint64_t seed = 0,
                            const shape::ShapeModifier& mod = {});

}  // namespace ges::theory
