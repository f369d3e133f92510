#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "conemeander/errors.hpp"
#include "conemeander/specfun.hpp"

using namespace cmeander;

namespace {

// Ascending series in long double, 200 terms, no early exit.
long double bessel_series_oracle(long double nu, long double x) {
  long double term = std::pow(x / 2, nu) / std::tgamma(nu + 1);
  long double sum = term;
  for (int m = 0; m < 200; ++m) {
    term *= (x / 2) * (x / 2) / ((m + 1) * (nu + m + 1));
    sum += term;
  }
  return sum;
}

// Legendre polynomial by Bonnet's recurrence.
double bonnet(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return p0;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

TEST_CASE("bessel_i anchors") {
  CHECK(bessel_i(0.0, 0.0) == 1.0);
  CHECK(bessel_i(2.0, 0.0) == 0.0);
  CHECK(bessel_i(0.5, 1.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0)).epsilon(1e-14));
  CHECK(bessel_i(0.5, 1.0) == doctest::Approx(0.9376748).epsilon(1e-7));
  const double oracle = static_cast<double>(bessel_series_oracle(1.0L, 2.0L));
  CHECK(std::abs(bessel_i(1.0, 2.0) / oracle - 1.0) < 1e-13);
}

TEST_CASE("bessel_i half-integer closed forms on (0, 20]") {
  for (double x = 0.05; x <= 20.0; x += 0.05) {
    const double s = std::sinh(x), c = std::cosh(x);
    const double pre = std::sqrt(2.0 / (std::numbers::pi * x));
    const double i12 = pre * s;
    const double i32 = pre * (c - s / x);
    const double i52 = pre * ((1.0 + 3.0 / (x * x)) * s - 3.0 * c / x);
    CHECK(std::abs(bessel_i(0.5, x) / i12 - 1.0) < 1e-10);
    CHECK(std::abs(bessel_i(1.5, x) / i32 - 1.0) < 1e-10);
    if (x > 0.5) CHECK(std::abs(bessel_i(2.5, x) / i52 - 1.0) < 1e-10);
  }
}

TEST_CASE("bessel_i agrees with an independent library on a grid") {
  for (double nu : {0.0, 0.3, 1.0, 2.0, 4.5, 12.0, 40.0}) {
    for (double x : {0.01, 0.5, 1.0, 3.0, 10.0, 25.0, 50.0}) {
      const double ref = boost::math::cyl_bessel_i(nu, x);
      if (ref < 1e-300) continue;
      CHECK(std::abs(bessel_i(nu, x) / ref - 1.0) < 1e-11);
    }
  }
}

TEST_CASE("bessel_i positive and increasing in x") {
  for (double nu : {0.0, 0.7, 2.0, 9.0}) {
    double prev = 0.0;
    for (double x = 0.1; x <= 30.0; x += 0.1) {
      const double v = bessel_i(nu, x);
      CHECK(v > 0.0);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("log_bessel_i handles large orders without overflow") {
  const double v = log_bessel_i(150.0, 5.0);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(std::log(boost::math::cyl_bessel_i(150.0, 5.0))).epsilon(1e-12));
  CHECK(std::isinf(log_bessel_i(1.0, 0.0)));
}

TEST_CASE("bessel_i errors") {
  CHECK_THROWS_AS(bessel_i(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_i(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(bessel_i(NAN, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_i(1.0, INFINITY), DomainError);
  SeriesControl tiny;
  tiny.max_terms = 3;
  CHECK_THROWS_AS(bessel_i(0.0, 40.0, tiny), ConvergenceError);
  SeriesControl bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(bessel_i(0.0, 1.0, bad), DomainError);
}

TEST_CASE("log_gamma anchors") {
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(2.0) == doctest::Approx(0.0));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-15));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-15));
  for (int n = 1; n < 150; ++n) {
    double lf = 0.0;
    for (int k = 2; k < n; ++k) lf += std::log(static_cast<double>(k));
    CHECK(std::abs(log_gamma(n) - lf) <= 1e-13 * std::max(1.0, std::abs(lf)));
  }
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-2.5), DomainError);
}

TEST_CASE("legendre_p anchors") {
  for (double nu : {0.0, 0.3, 1.0, 2.7, 10.5}) CHECK(legendre_p(nu, 1.0) == 1.0);
  CHECK(legendre_p(2.0, 0.5) == doctest::Approx(-0.125).epsilon(1e-15));
  // P_nu(0) = sqrt(pi) / (Gamma(1 + nu/2) Gamma((1 - nu)/2))
  for (double nu : {0.5, 1.5, 2.3, 3.7}) {
    const double ref = std::sqrt(std::numbers::pi) / (std::tgamma(1.0 + nu / 2) * std::tgamma((1.0 - nu) / 2));
    CHECK(legendre_p(nu, 0.0) == doctest::Approx(ref).epsilon(1e-11));
  }
  CHECK(std::abs(legendre_p(1.0, 0.0)) <= 1e-10);
}

TEST_CASE("legendre_p integer degrees equal the polynomials") {
  for (int n = 0; n <= 12; ++n) {
    for (int i = 0; i <= 38; ++i) {
      const double x = -0.9 + 0.05 * i;
      CHECK(std::abs(legendre_p(n, x) - bonnet(n, x)) < 1e-12);
    }
  }
}

TEST_CASE("legendre_p three-term recurrence") {
  for (double nu : {1.0, 2.0, 5.0, 1.5, 2.5, 4.5, 0.7}) {
    for (double x : {-0.5, 0.0, 0.3, 0.7, 0.95}) {
      const double lhs = (2 * nu + 1) * x * legendre_p(nu, x);
      const double rhs = (nu + 1) * legendre_p(nu + 1, x) + nu * legendre_p(nu - 1, x);
      CHECK(std::abs(lhs - rhs) < 1e-9);
    }
  }
}

TEST_CASE("legendre_p domain and convergence errors") {
  CHECK_THROWS_AS(legendre_p(1.0, 1.5), DomainError);
  CHECK_THROWS_AS(legendre_p(std::nan(""), 0.0), DomainError);
  CHECK(legendre_p(-2.3, 0.4) == doctest::Approx(legendre_p(1.3, 0.4)).epsilon(1e-14));
  CHECK_THROWS_AS(legendre_p(2.5, -0.99999), ConvergenceError);
}

TEST_CASE("normal_cdf") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(2.0 * normal_cdf(1.0) - 1.0 == doctest::Approx(0.682689492137).epsilon(1e-12));
  CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427e-16).epsilon(1e-9));
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const QuadratureRule q = gauss_legendre(n, 0.0, 2.0);
    for (int k = 0; k <= 2 * n - 1 && k <= 40; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
      CHECK(s == doctest::Approx(std::pow(2.0, k + 1) / (k + 1)).epsilon(1e-13));
    }
  }
  const QuadratureRule c = composite_gauss_legendre(7, 9, -1.0, 3.0);
  double s = 0.0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) s += c.weights[i] * std::exp(c.nodes[i]);
  CHECK(s == doctest::Approx(std::exp(3.0) - std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS(gauss_legendre(0));
}
