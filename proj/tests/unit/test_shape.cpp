#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ges/shape.hpp"
#include "ges/special.hpp"

using namespace ges;
using doctest::Approx;

// Reference values from 30-digit arbitrary precision evaluation.

TEST_CASE("log_gamma, gamma and digamma against high-precision values") {
  CHECK(special::log_gamma(0.1) == Approx(2.2527126517342059599).epsilon(1e-14));
  CHECK(special::log_gamma(50.5) == Approx(146.51925549072062722).epsilon(1e-14));
  CHECK(special::log_gamma(0.001) == Approx(6.9071788853838536825).epsilon(1e-14));
  CHECK(special::log_gamma(170.5) == Approx(704.00442773420467079).epsilon(1e-14));
  CHECK(std::abs(special::log_gamma(1.0)) < 1e-14);
  CHECK(std::abs(special::log_gamma(2.0)) < 1e-14);
  CHECK(special::gamma(0.5) == Approx(1.7724538509055160273).epsilon(1e-14));
  CHECK(special::gamma(3.7) == Approx(4.1706517837966031654).epsilon(1e-14));
  CHECK(special::gamma(10.0) == Approx(362880.0).epsilon(1e-13));
  CHECK(special::digamma(0.3) == Approx(-3.502524222200132989).epsilon(1e-13));
  CHECK(special::digamma(7.5) == Approx(1.9467574842460867881).epsilon(1e-13));
  CHECK(special::digamma(1.0) == Approx(-0.57721566490153286061).epsilon(1e-13));
  CHECK(special::digamma(0.01) == Approx(-100.5608854578686745).epsilon(1e-13));
  CHECK(special::digamma(25.0) == Approx(3.1987425128519740085).epsilon(1e-13));
}

TEST_CASE("sigmoid, softplus and their inverses") {
  CHECK(special::sigmoid(0.0) == 0.5);
  CHECK(special::sigmoid(800.0) == 1.0);
  CHECK(special::sigmoid(-800.0) >= 0.0);
  CHECK(special::softplus(800.0) == 800.0);
  for (double y : {1e-6, 0.3, 2.0, 40.0}) CHECK(special::softplus(special::softplus_inverse(y)) == Approx(y).epsilon(1e-12));
  for (double p : {0.01, 0.5, 0.9}) CHECK(special::sigmoid(special::logit(p)) == Approx(p).epsilon(1e-14));
}

TEST_CASE("exact modifier at special shapes") {
  CHECK(shape::phi_exact_raw(2.0) == Approx(0.5).epsilon(1e-12));
  CHECK(shape::phi_exact_raw(1.0) == Approx(2.0).epsilon(1e-12));
  CHECK(shape::phi_exact_raw(3.0) == Approx(0.37328217390739522833).epsilon(1e-12));
  CHECK(shape::phi_exact_raw(4.0) == Approx(0.3379891200336423645).epsilon(1e-12));
  CHECK(shape::phi_exact_raw(7.0) == Approx(0.31574402161778552917).epsilon(1e-12));
  CHECK(shape::phi_exact_raw(0.5) == Approx(120.0).epsilon(1e-12));
  CHECK(shape::phi_exact_normalized(2.0) == 1.0);
  CHECK(shape::phi_exact_normalized(3.0) == Approx(0.74656434781479045665).epsilon(1e-12));
  CHECK_THROWS_AS(shape::phi_exact_raw(0.0), std::domain_error);
  CHECK_THROWS_AS(shape::phi_exact_raw(-1.0), std::domain_error);
}

TEST_CASE("exact modifier derivative") {
  CHECK(shape::phi_exact_normalized_derivative(3.0) == Approx(-0.11616431634089395657).epsilon(1e-10));
  CHECK(shape::phi_exact_normalized_derivative(1.0) == Approx(-13.382274680787737115).epsilon(1e-10));
  CHECK(shape::phi_exact_normalized_derivative(7.0) == Approx(-0.0034348306225510241852).epsilon(1e-9));
  CHECK(shape::phi_exact_normalized_derivative(0.5) == Approx(-4507.7459233890569076).epsilon(1e-10));
}

TEST_CASE("sigmoid modifier identities") {
  for (double rho : {0.0, 0.1, 0.5, 3.0}) CHECK(shape::phi_bar(2.0, rho) == 1.0);
  for (double beta : {-50.0, 0.1, 2.0, 9.0, 1e6}) CHECK(shape::phi_bar(beta, 0.0) == 1.0);
  double prev = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double beta = 0.01 + 40.0 * i / 9999.0;
    const double v = shape::phi_bar(beta, 0.1);
    REQUIRE(v > prev);
    REQUIRE(v > 0.0);
    REQUIRE(v < 2.0);
    prev = v;
  }
}

TEST_CASE("sigmoid modifier derivative matches differences") {
  for (double rho : {0.1, 0.7}) {
    for (double beta : {-3.0, 0.5, 2.0, 4.0, 11.0}) {
      const double h = 1e-6;
      const double fd = (shape::phi_bar(beta + h, rho) - shape::phi_bar(beta - h, rho)) / (2 * h);
      CHECK(shape::phi_bar_derivative(beta, rho) == Approx(fd).epsilon(1e-8));
    }
  }
  CHECK(shape::phi_bar_derivative(2.0, 0.1) == Approx(0.05).epsilon(1e-15));
}

TEST_CASE("ShapeModifier dispatch and validation") {
  const shape::ShapeModifier approx{0.1, shape::ModifierMode::kApproximate};
  const shape::ShapeModifier exact{0.1, shape::ModifierMode::kExactNormalized};
  CHECK(approx.value(3.0) == shape::phi_bar(3.0, 0.1));
  CHECK(exact.value(3.0) == shape::phi_exact_normalized(3.0));
  CHECK(exact.derivative(3.0) == shape::phi_exact_normalized_derivative(3.0));
  CHECK(shape::ShapeModifier::gaussian().value(5.0) == 1.0);
  CHECK(shape::ShapeModifier::gaussian().derivative(5.0) == 0.0);
  CHECK_THROWS_AS((shape::ShapeModifier{-0.1, shape::ModifierMode::kApproximate}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((shape::ShapeModifier{NAN, shape::ModifierMode::kApproximate}.validate()), std::invalid_argument);
  CHECK(shape::modifier_mode_from_string(shape::to_string(shape::ModifierMode::kExactNormalized)) ==
        shape::ModifierMode::kExactNormalized);
  CHECK_THROWS(shape::modifier_mode_from_string("nope"));
}

TEST_CASE("gamma overflows to infinity and rejects non-positive arguments") {
  CHECK(std::isfinite(special::gamma(171.6)));
  CHECK(std::isinf(special::gamma(172.0)));
  CHECK_THROWS_AS(special::gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(special::log_gamma(-1.0), std::domain_error);
  CHECK_THROWS_AS(special::digamma(0.0), std::domain_error);
}
