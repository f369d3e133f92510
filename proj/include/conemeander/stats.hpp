#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cmeander {

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0.0;    // sup-distance D
  double p_value = 1.0;      // asymptotic, with the (sqrt(n) + 0.12 + 0.11/sqrt(n)) correction
  double effective_n = 0.0;  // n, or n m / (n + m) for two samples
};

/// One-sample test of `sample` against a continuous CDF. The sample is copied
/// and sorted.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Mean of sqrt(n) D under the null, about 0.8687; used as the KS noise floor.
inline constexpr double kKsNoiseScale = 0.8687;

/// Spearman correlation between the values and their positions 0, 1, ...
double spearman_rho(std::span<const double> values);

/// One-sided exact permutation p-value for a decreasing trend: the fraction of
/// orderings whose rho is at most the observed one. Lengths up to 10.
double spearman_decrease_p(std::span<const double> values);

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
};

/// Generalized least squares fit of y = slope * x (no intercept) with the
/// given covariance matrix of y (row-major, size n*n).
SlopeFit gls_slope_through_origin(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> covariance);

}  // namespace cmeander
