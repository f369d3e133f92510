#include "conemeander/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "conemeander/errors.hpp"

namespace cmeander {

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
    throw DomainError("SeriesControl: rel_tol must be positive");
  }
  if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " +
                      std::to_string(x));
  }
  // boost's lgamma does not touch the global signgam, unlike ::lgamma.
  return boost::math::lgamma(x);
}

double log_bessel_i(double nu, double x, const SeriesControl& ctl) {
  ctl.validate();
  if (!std::isfinite(nu) || !std::isfinite(x) || nu < 0.0 || x < 0.0) {
    throw DomainError("bessel_i: need finite nu >= 0 and x >= 0");
  }
  if (x == 0.0) {
    return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double half = 0.5 * x;
  const double q = half * half;
  // Factor out the m = 0 term; the rest is 1 + sum of positive ratios.
  const double log_lead = nu * std::log(half) - log_gamma(nu + 1.0);
  double term = 1.0;
  double sum = 1.0;
  for (int m = 0; m < ctl.max_terms; ++m) {
    term *= q / ((m + 1.0) * (nu + m + 1.0));
    sum += term;
    if (term <= ctl.rel_tol * sum) return log_lead + std::log(sum);
  }
  throw ConvergenceError("bessel_i: series did not converge for nu=" + std::to_string(nu) +
                         ", x=" + std::to_string(x));
}

double bessel_i(double nu, double x, const SeriesControl& ctl) {
  return std::exp(log_bessel_i(nu, x, ctl));
}

double legendre_p(double nu, double x, const SeriesControl& ctl) {
  ctl.validate();
  if (!std::isfinite(nu) || !std::isfinite(x) || x < -1.0 || x > 1.0) {
    throw DomainError("legendre_p: need finite nu and x in [-1, 1]");
  }
  // Integer degrees are polynomials of parity nu; evaluating at |x| keeps the
  // series argument in [0, 1/2], where its terms stay moderate.
  if (x < 0.0 && nu == std::floor(nu) && nu < 1e6) {
    const double sign = std::fmod(nu, 2.0) == 0.0 ? 1.0 : -1.0;
    return sign * legendre_p(nu, -x, ctl);
  }
  const long double z = 0.5L * (1.0L - static_cast<long double>(x));
  const long double v = nu;
  // Truncation is relative to the partial sum, floored at a fraction of the
  // sum of |terms| so evaluation at a zero of P_nu (the eigenvalue search)
  // still terminates.
  long double term = 1.0L;
  long double sum = 1.0L;
  long double scale = 1.0L;
  for (int m = 0; m < ctl.max_terms; ++m) {
    term *= (m - v) * (m + v + 1.0L) / ((m + 1.0L) * (m + 1.0L)) * z;
    sum += term;
    scale += std::abs(term);
    if (std::abs(term) <= ctl.rel_tol * std::max(std::abs(sum), 1e-4L * scale)) return static_cast<double>(sum);
  }
  throw ConvergenceError("legendre_p: series did not converge for nu=" + std::to_string(nu) +
                         ", x=" + std::to_string(x) + " (region shrinks near x = -1)");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: panels must be >= 1");
  const QuadratureRule base = gauss_legendre(order);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

}  // namespace cmeander
