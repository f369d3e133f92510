#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conemeander/cones.hpp"
#include "conemeander/sampler.hpp"

namespace cmeander {

/// Decision thresholds. Every pass/fail decision reads from here.
struct Thresholds {
  double ks_p = 0.01;           // KS p-value must exceed this
  double z_max = 3.0;           // |z| bound for binomial and Gaussian z-tests
  double slope_sigmas = 2.0;    // fitted exit-law slope within this many stderr
  double trend_p = 0.1;         // Spearman decrease p-value bound
  double noise_floor = 2.0;     // multiple of the KS noise floor 0.87/sqrt(n)
  double ball_sigmas = 3.0;     // slack in the ball inequality
  double ball_small = 0.05;     // bound on the smallest (lambda, s) cell
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  int workers = 1;
  std::int64_t max_attempts = 10'000'000;  // per accepted path
  Thresholds thresholds;
};

/// One row of a report: an estimate with its standard error, the analytic
/// target when there is one, and the statistic behind the cell's verdict.
struct ReportCell {
  static constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

  std::string label;
  double estimate = kNone;
  double std_error = kNone;
  double target = kNone;
  double statistic = kNone;  // KS distance or z
  double p_value = kNone;
  bool pass = true;
  bool control = false;  // part of the negative control
};

struct McReport {
  std::string name;
  std::int64_t n = 0;
  std::vector<ReportCell> cells;
  bool checks_pass = false;
  // The perturbed target was rejected, as it must be.
  bool control_rejected = false;
  bool pass = false;  // checks_pass && control_rejected
  RejectionReport sampling;
  std::vector<std::pair<std::string, std::string>> config;
  double wall_time = 0.0;
};

/// Radial and angular KS of X(1) under the epsilon-approximate meander against
/// the marginals of e(1, .). Negative control: radial target with alpha1 * 1.1.
McReport verify_entrance_density(const ConeSpec& cone, double epsilon, std::int64_t n, double dt,
                                 const VerifyOptions& opts = {});

/// Survival in the cone at times t > 1 of accepted paths continued as free
/// Brownian motion, against t^(-alpha1/2+(d-2)/4): binomial z per time and a
/// GLS log-log slope through the origin. Negative control: exponent * 1.1.
/// Times are rounded to the grid.
McReport verify_exit_law(const ConeSpec& cone, double epsilon, std::int64_t n, double dt,
                         std::span<const double> t_list, const VerifyOptions& opts = {});

/// Two-sample KS per coordinate and on the radius between X(t/2) from x with
/// horizon t, and sqrt(t) X(1/2) from x/sqrt(t) with horizon 1. The second
/// side runs at step dt/t so the two grids correspond. Negative control: the
/// second side without the sqrt(t) factor.
McReport verify_scaling(const ConeSpec& cone, std::span<const double> x, double t, std::int64_t n,
                        double dt, const VerifyOptions& opts = {});

/// P(lambda, s) = probability that the half-space conditioned path from
/// lambda e1 leaves the unit ball centered at e1 by time s; lambda = 0 uses
/// the D-meander. Checks monotonicity in s, P(lambda, s) <= 2^(d-1) P(0, s)
/// plus slack, and a small corner cell. Negative control: factor 2^-(d-1).
McReport verify_ball_estimate(int d, std::span<const double> lambda_list,
                              std::span<const double> s_list, std::int64_t n, double dt,
                              const VerifyOptions& opts = {});

/// KS distance of the radial marginal of X(t) to the e(1, .) target along a
/// decreasing epsilon ladder (t = 1 only). Passes on a Spearman decrease or
/// when every distance sits under the noise floor, provided the smallest
/// epsilon also passes the KS test. Negative control: the radial target of a
/// different cone.
McReport verify_fdd_trend(const ConeSpec& cone, std::span<const double> epsilon_list, double t,
                          std::int64_t n, double dt, const VerifyOptions& opts = {});

/// Transform and section (x = 0) constructions of the 1-D meander compared by
/// two-sample KS at each time. Negative control: section marginal at t
/// against the transform marginal scaled by 1.1.
McReport verify_meander_construction(std::span<const double> times, std::int64_t n, double dt,
                                     const VerifyOptions& opts = {});

/// Killed-Brownian-motion Gaussian kernel estimate of p(1, x, y) at each probe
/// y versus the wedge series. Negative control: series value times 1.2.
McReport verify_heat_kernel(const ConeSpec& cone, std::span<const double> x,
                            const std::vector<std::vector<double>>& probes, double bandwidth,
                            std::int64_t n, double dt, const VerifyOptions& opts = {});

/// Radius of a point.
double radius(std::span<const double> p);

}  // namespace cmeander
