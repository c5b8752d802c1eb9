#include "ges/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ges/format.hpp"

namespace ges::theory {

namespace {

// Kernel value below which the tail is eligible for truncation.
constexpr double kTailKernelFloor = 1e-14;

// Upper bound on Gamma(s, x) for x > max(0, s - 1):
//   Gamma(s, x) <= x^(s-1) e^-x / (1 - (s-1)/x)    (s > 1)
//   Gamma(s, x) <= x^(s-1) e^-x                    (s <= 1)
double upper_incomplete_gamma_bound(double s, double x) {
  const double base = std::exp((s - 1.0) * std::log(x) - x);
  if (s <= 1.0) return base;
  return base / (1.0 - (s - 1.0) / x);
}

// Mass of amplitude * exp(-(t/alpha)^beta) beyond t = alpha * u^(1/beta).
double tail_mass_bound(double amplitude, double alpha, double beta, double u) {
  return amplitude * alpha / beta * upper_incomplete_gamma_bound(1.0 / beta, u);
}

}  // namespace

void SquareApproxProblem::validate() const {
  if (!(amplitude > 0.0)) throw std::invalid_argument("SquareApproxProblem: amplitude must be positive");
  if (!(width >= 0.0)) throw std::invalid_argument("SquareApproxProblem: width must be non-negative");
  if (!(alpha > 0.0)) throw std::invalid_argument("SquareApproxProblem: alpha must be positive");
}

ApproxError approx_error(const SquareApproxProblem& p, const Kernel& kernel, double tol) {
  p.validate();
  const double beta = kernel.beta;
  if (!(beta > 0.0)) throw std::invalid_argument("approx_error: beta must be positive");
  const double A = p.amplitude;
  const double alpha = p.alpha;
  const double half = 0.5 * p.width;

  auto f = [&](double t) { return std::exp(-std::pow(t / alpha, beta)); };

  // Cut point in the normalized variable u = (t/alpha)^beta.
  const double slack = 1.0 / beta;
  double u_cut = std::max(-std::log(kTailKernelFloor), 2.0 * std::max(0.0, slack - 1.0) + 1.0);
  while (2.0 * tail_mass_bound(A, alpha, beta, u_cut) > 0.1 * tol) u_cut *= 1.25;
  const double t_cut = alpha * std::pow(u_cut, 1.0 / beta);

  ApproxError out;
  out.tail_end = std::max(t_cut, half);
  const double u_end = std::pow(out.tail_end / alpha, beta);
  out.truncation_bound = 2.0 * tail_mass_bound(A, alpha, beta, u_end);

  // Budget: half of tol for the interior, half for the tail panels.
  double inner = 0.0;
  if (half > 0.0) {
    // 1 - f has a cusp at t = 0 for small beta. Below `head` the mass is at
    // most alpha/(beta+1) (head/alpha)^(beta+1) (from 1 - e^-x <= x), which
    // is kept under 0.05 tol and added to the truncation bound; geometric
    // panels cover the rest.
    const double budget = 0.05 * tol / A;
    const double head = std::min(half, alpha * std::pow(budget * (beta + 1.0) / alpha, 1.0 / (beta + 1.0)));
    out.truncation_bound += 2.0 * A * alpha / (beta + 1.0) * std::pow(head / alpha, beta + 1.0);
    std::vector<double> cuts{head};
    while (cuts.back() < half) cuts.push_back(std::min(half, 2.0 * cuts.back()));
    const double share = 0.2 * tol / A / static_cast<double>(std::max<std::size_t>(1, cuts.size() - 1));
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      inner += adaptive_simpson([&](double t) { return 1.0 - f(t); }, cuts[i], cuts[i + 1], share, 60,
                                &out.evaluations);
    }
  }

  // Geometric panels keep heavy tails (small beta) tractable.
  std::vector<double> edges{half};
  double a = half;
  while (a < out.tail_end) {
    const double next = std::min(out.tail_end, std::max(2.0 * a, a + alpha));
    edges.push_back(next);
    a = next;
  }
  double tail = 0.0;
  const std::size_t panels = edges.size() - 1;
  for (std::size_t i = 0; i < panels; ++i) {
    tail += adaptive_simpson(f, edges[i], edges[i + 1],
                             0.25 * tol / A / static_cast<double>(std::max<std::size_t>(1, panels)),
                             60, &out.evaluations);
  }
  out.value = 2.0 * A * (inner + tail);
  return out;
}

std::vector<double> default_beta_grid() {
  constexpr int kPoints = 200;
  constexpr double kLo = 0.2;
  constexpr double kHi = 40.0;
  std::vector<double> grid(kPoints);
  const double step = std::log(kHi / kLo) / (kPoints - 1);
  for (int i = 0; i < kPoints; ++i) grid[i] = kLo * std::exp(step * i);
  grid.back() = kHi;
  return grid;
}

std::string to_string(SignPrediction p) {
  switch (p) {
    case SignPrediction::kAboveTwo: return "beta>2";
    case SignPrediction::kBelowTwo: return "beta<2";
    case SignPrediction::kNone: return "none";
  }
  return "none";
}

Theorem1Report verify_theorem1(const SquareApproxProblem& p, std::span<const double> beta_grid,
                               double tol) {
  p.validate();
  const bool has_below = std::any_of(beta_grid.begin(), beta_grid.end(), [](double b) { return b > 0.0 && b < 2.0; });
  const bool has_above = std::any_of(beta_grid.begin(), beta_grid.end(), [](double b) { return b > 2.0; });
  if (!has_below || !has_above) {
    throw std::invalid_argument("verify_theorem1: beta grid must cover both (0, 2) and (2, beta_max]");
  }

  Theorem1Report r;
  r.problem = p;
  r.e_gaussian = approx_error(p, Kernel::gaussian(), tol).value;
  r.best_below_two.error = r.best_above_two.error = std::numeric_limits<double>::infinity();
  r.e_gef = std::numeric_limits<double>::infinity();
  for (double beta : beta_grid) {
    if (!(beta > 0.0)) throw std::invalid_argument("verify_theorem1: grid values must be positive");
    const double e = approx_error(p, Kernel::gef(beta), tol).value;
    if (e < r.e_gef) {
      r.e_gef = e;
      r.beta_star = beta;
    }
    if (beta < 2.0 && e < r.best_below_two.error) r.best_below_two = {beta, e};
    if (beta > 2.0 && e < r.best_above_two.error) r.best_above_two = {beta, e};
  }
  r.delta = r.e_gaussian - r.e_gef;
  r.verified = r.delta > 0.0;

  const double ratio = p.width / (2.0 * p.alpha);
  if (std::abs(ratio - 1.0) <= 1e-9) {
    r.prediction = SignPrediction::kNone;
  } else {
    r.prediction = ratio > 1.0 ? SignPrediction::kAboveTwo : SignPrediction::kBelowTwo;
    r.sign_rule_holds = r.prediction == SignPrediction::kAboveTwo ? r.beta_star > 2.0 : r.beta_star < 2.0;
  }

  std::ostringstream msg;
  if (!r.verified) {
    msg << "verification failed: best GEF error " << format_double(r.e_gef) << " at beta "
        << format_double(r.beta_star) << " does not beat Gaussian error "
        << format_double(r.e_gaussian);
  } else {
    msg << "GEF beats Gaussian by " << format_double(r.delta) << " at beta " << format_double(r.beta_star);
  }
  if (r.prediction == SignPrediction::kNone) {
    msg << "; L/2 = alpha, no sign prediction (best beta<2: " << format_double(r.best_below_two.beta)
        << ", best beta>2: " << format_double(r.best_above_two.beta) << ")";
  } else if (!*r.sign_rule_holds) {
    msg << "; sign rule violated (predicted " << to_string(r.prediction) << ")";
  }
  r.message = msg.str();
  return r;
}

EtaBounds eta_bounds() {
  // Unit radius circle against the circumscribing square (side 2r) and the
  // inscribed square (side 2r / sqrt 2).
  constexpr double r = 1.0;
  const double circle = std::numbers::pi * r * r;
  const double square_outer = (2.0 * r) * (2.0 * r);
  const double side_inner = 2.0 * r / std::numbers::sqrt2;
  const double square_inner = side_inner * side_inner;
  return {(square_outer - circle) / circle, (circle - square_inner) / circle};
}

EtaEstimate eta_monte_carlo(double beta, std::size_t samples, std::uint64_t seed,
                            const shape::ShapeModifier& mod) {
  if (!(beta >= 2.0)) throw std::invalid_argument("eta_monte_carlo: beta must be >= 2");
  if (samples < 10000) throw std::invalid_argument("eta_monte_carlo: need at least 1e4 samples");
  mod.validate();
  const double radius_sq = mod.value(beta);
  const double radius = std::sqrt(radius_sq);
  const double box = std::max(1.0, radius);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-box, box);
  std::size_t mismatched = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    const bool in_super = std::pow(std::abs(x), beta) + std::pow(std::abs(y), beta) <= 1.0;
    const bool in_circle = x * x + y * y <= radius_sq;
    if (in_super != in_circle) ++mismatched;
  }
  const double n = static_cast<double>(samples);
  const double frac = static_cast<double>(mismatched) / n;
  const double scale = 4.0 * box * box / (std::numbers::pi * radius_sq);
  EtaEstimate est;
  est.samples = samples;
  est.circle_radius = radius;
  est.eta = scale * frac;
  est.std_error = scale * std::sqrt(frac * (1.0 - frac) / n);
  return est;
}

}  // namespace ges::theory
