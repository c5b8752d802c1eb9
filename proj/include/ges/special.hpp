#pragma once

/// Special functions used by the shape modifier and the theory checks.
/// The gamma family wraps Boost.Math and only accepts positive arguments.

namespace ges::special {

double log_gamma(double x);

/// Gamma(x) for x > 0; +inf past x ~ 171.6.
double gamma(double x);

/// Digamma psi(x) = d/dx log Gamma(x) for x > 0.
double digamma(double x);

double sigmoid(double x);
double softplus(double x);
/// Inverse of softplus for y > 0.
double softplus_inverse(double y);
double logit(double p);

}  // namespace ges::special
