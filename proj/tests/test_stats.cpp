#include "doctest.h"

#include <cmath>
#include <random>

#include "conemeander/errors.hpp"
#include "conemeander/stats.hpp"

using namespace cmeander;

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.2699996716735).epsilon(1e-10));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0494).epsilon(2e-3));
  CHECK(kolmogorov_q(1.63) == doctest::Approx(0.0098).epsilon(5e-3));
  CHECK(kolmogorov_q(0.3) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(kolmogorov_q(5.0) < 1e-20);
}

TEST_CASE("one-sample KS") {
  const std::vector<double> s{0.1, 0.4, 0.7};
  const auto uniform = [](double u) { return std::clamp(u, 0.0, 1.0); };
  // D = max over i of max(i/n - u_i, u_i - (i-1)/n) = max(0.1, 0.2667, 0.0667, ...) = 0.3
  const KsResult r = ks_one_sample(s, uniform);
  CHECK(r.statistic == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.effective_n == 3.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> big(20000);
  for (double& x : big) x = u(rng);
  CHECK(ks_one_sample(big, uniform).p_value > 0.001);
  for (double& x : big) x = x * x;
  CHECK(ks_one_sample(big, uniform).p_value < 1e-10);
  CHECK_THROWS_AS(ks_one_sample({}, uniform), DomainError);
}

TEST_CASE("two-sample KS") {
  const KsResult same = ks_two_sample({1, 2, 3}, {1, 2, 3});
  CHECK(same.statistic == 0.0);
  const KsResult apart = ks_two_sample({1, 2, 3}, {4, 5, 6, 7});
  CHECK(apart.statistic == 1.0);
  CHECK(apart.effective_n == doctest::Approx(12.0 / 7.0));
  const KsResult half = ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6});
  CHECK(half.statistic == doctest::Approx(0.5));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> a(5000), b(6000);
  for (double& x : a) x = g(rng);
  for (double& x : b) x = g(rng);
  CHECK(ks_two_sample(a, b).p_value > 0.001);
  for (double& x : b) x *= 1.2;
  CHECK(ks_two_sample(a, b).p_value < 1e-4);
}

TEST_CASE("Spearman trend") {
  const std::vector<double> down{4, 3, 2, 1};
  CHECK(spearman_rho(down) == doctest::Approx(-1.0));
  CHECK(spearman_decrease_p(down) == doctest::Approx(1.0 / 24));
  const std::vector<double> up{1, 2, 3, 4};
  CHECK(spearman_rho(up) == doctest::Approx(1.0));
  CHECK(spearman_decrease_p(up) == doctest::Approx(1.0));
  // One adjacent swap: rho = 0.8 in magnitude, 4 of 24 orderings reach -0.8 or below.
  const std::vector<double> swap{4, 3, 1, 2};
  CHECK(spearman_rho(swap) == doctest::Approx(-0.8));
  CHECK(spearman_decrease_p(swap) == doctest::Approx(4.0 / 24));
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(spearman_decrease_p(one), DomainError);
  const std::vector<double> eleven(11, 1.0);
  CHECK_THROWS_AS(spearman_decrease_p(eleven), DomainError);
}

TEST_CASE("GLS slope through the origin") {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{2, 4, 6};
  const std::vector<double> eye{1, 0, 0, 0, 1, 0, 0, 0, 1};
  const SlopeFit f = gls_slope_through_origin(x, y, eye);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.std_error == doctest::Approx(1 / std::sqrt(14.0)));

  // Diagonal weights reduce to weighted least squares.
  const std::vector<double> yw{1, 5, 5};
  const std::vector<double> diag{1, 0, 0, 0, 4, 0, 0, 0, 0.25};
  const double num = 1 * 1 / 1.0 + 2 * 5 / 4.0 + 3 * 5 / 0.25;
  const double den = 1 / 1.0 + 4 / 4.0 + 9 / 0.25;
  const SlopeFit w = gls_slope_through_origin(x, yw, diag);
  CHECK(w.slope == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(w.std_error == doctest::Approx(1 / std::sqrt(den)).epsilon(1e-12));

  // Correlated errors: x^T S^-1 y / x^T S^-1 x with S = [[2,1],[1,2]].
  const std::vector<double> x2{1, 2}, y2{1, 3};
  const std::vector<double> s2{2, 1, 1, 2};
  // S^-1 = [[2,-1],[-1,2]]/3
  const double xs_y = (1 * (2 * 1 - 3) + 2 * (-1 + 2 * 3)) / 3.0;
  const double xs_x = (1 * (2 - 2) + 2 * (-1 + 4)) / 3.0;
  CHECK(gls_slope_through_origin(x2, y2, s2).slope == doctest::Approx(xs_y / xs_x).epsilon(1e-12));
  CHECK_THROWS_AS(gls_slope_through_origin(x2, y2, eye), DomainError);
}
