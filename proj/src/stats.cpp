#include "conemeander/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "conemeander/errors.hpp"

namespace cmeander {

namespace {

double ks_p(double d, double ne) {
  const double root = std::sqrt(ne);
  return kolmogorov_q((root + 0.12 + 0.11 / root) * d);
}

std::vector<double> ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 * std::abs(sum) || term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, ks_p(d, n), n};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, ks_p(d, ne), ne};
}

double spearman_rho(std::span<const double> values) {
  std::vector<double> pos(values.size());
  std::iota(pos.begin(), pos.end(), 0.0);
  const std::vector<double> r = ranks(values);
  return pearson(r, pos);
}

double spearman_decrease_p(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2 || n > 10) throw DomainError("spearman_decrease_p: need between 2 and 10 values");
  const double observed = spearman_rho(values);
  const std::vector<double> r = ranks(values);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> pos(n);
  std::iota(pos.begin(), pos.end(), 0.0);
  std::vector<double> shuffled(n);
  long total = 0, at_most = 0;
  do {
    for (std::size_t i = 0; i < n; ++i) shuffled[i] = r[perm[i]];
    ++total;
    if (pearson(shuffled, pos) <= observed + 1e-12) ++at_most;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(at_most) / static_cast<double>(total);
}

SlopeFit gls_slope_through_origin(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> covariance) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() != n || covariance.size() != n * n) {
    throw DomainError("gls_slope_through_origin: inconsistent sizes");
  }
  Eigen::MatrixXd cov(n, n);
  Eigen::VectorXd xv(n), yv(n);
  for (std::size_t i = 0; i < n; ++i) {
    xv(i) = x[i];
    yv(i) = y[i];
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = covariance[i * n + j];
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("gls_slope_through_origin: covariance is not positive definite");
  }
  const Eigen::VectorXd wx = ldlt.solve(xv);
  const double info = xv.dot(wx);
  if (!(info > 0.0)) throw NumericError("gls_slope_through_origin: degenerate design");
  return {wx.dot(yv) / info, 1.0 / std::sqrt(info)};
}

}  // namespace cmeander
