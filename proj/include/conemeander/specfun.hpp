#pragma once

#include <vector>

namespace cmeander {

/// Truncation rule shared by the power-series kernels below: summation stops
/// once the next term is at most `rel_tol` times the running scale of the sum.
struct SeriesControl {
  double rel_tol = 1e-12;
  int max_terms = 500;

  void validate() const;
};

/// Modified Bessel function of the first kind I_nu(x), nu >= 0, x >= 0.
///
/// Summed from the ascending series sum_m (x/2)^(nu+2m) / (m! Gamma(nu+m+1)).
/// The leading term is formed in log space, so large orders do not overflow
/// the Gamma factor. Intended working range is x <= 50; larger arguments work
/// as long as the series converges within `max_terms`.
double bessel_i(double nu, double x, const SeriesControl& ctl = {});

/// ln I_nu(x). Returns -inf for x == 0 and nu > 0.
double log_bessel_i(double nu, double x, const SeriesControl& ctl = {});

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Legendre function of the first kind P_nu(x) for real degree nu
/// (P_nu = P_{-nu-1}).
///
/// Evaluated as 2F1(-nu, nu+1; 1; (1-x)/2). The series converges for x > -1
/// but slows down as x approaches -1 (argument of 2F1 approaching 1), so for
/// non-integer nu and x close to -1 a ConvergenceError is expected. Integer
/// degrees terminate; for x < 0 they use P_n(x) = (-1)^n P_n(-x). Terms are
/// accumulated in long double, and the stopping test compares against the
/// partial sum floored at 1e-4 of the sum of |terms|.
double legendre_p(double nu, double x, const SeriesControl& ctl = {});

/// Standard normal CDF.
double normal_cdf(double x);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` nodes each.
QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b);

}  // namespace cmeander
