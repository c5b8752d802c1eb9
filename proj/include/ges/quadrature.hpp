#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ges {

/// Raised when adaptive quadrature cannot reach its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double a, double b, double error_estimate, int depth)
      : std::runtime_error(describe(a, b, error_estimate, depth)),
        a_(a),
        b_(b),
        error_estimate_(error_estimate) {}

  double a() const { return a_; }
  double b() const { return b_; }
  double error_estimate() const { return error_estimate_; }

 private:
  static std::string describe(double a, double b, double err, int depth) {
    std::ostringstream os;
    os.precision(17);
    os << "adaptive Simpson did not converge on [" << a << ", " << b
       << "]: error estimate " << err << " at depth " << depth;
    return os.str();
  }

  double a_;
  double b_;
  double error_estimate_;
};

namespace detail {

template <class F>
double simpson_recurse(F& f, double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth, int max_depth, long& evaluations) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= max_depth) throw QuadratureError(a, b, std::abs(delta) / 15.0, depth);
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth, evaluations) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth, evaluations);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
/// Throws QuadratureError when the recursion depth is exhausted.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 50,
                        long* evaluations = nullptr) {
  if (a == b) return 0.0;
  long evals = 3;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double result =
      detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 0, max_depth, evals);
  if (evaluations) *evaluations += evals;
  return result;
}

}  // namespace ges
