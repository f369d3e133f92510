#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "conemeander/cones.hpp"
#include "conemeander/errors.hpp"
#include "conemeander/rng.hpp"

namespace cmeander {

struct RejectionReport {
  std::int64_t attempts = 0;
  std::int64_t accepted = 0;

  double acceptance_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts);
  }
  RejectionReport& operator+=(const RejectionReport& other) {
    attempts += other.attempts;
    accepted += other.accepted;
    return *this;
  }
};

/// Thrown when rejection sampling runs out of attempts.
class RejectionExhausted : public SamplingError {
 public:
  RejectionExhausted(const std::string& what, RejectionReport report)
      : SamplingError(what), report_(report) {}
  const RejectionReport& report() const { return report_; }

 private:
  RejectionReport report_;
};

/// Gaussian stepping of a Brownian path inside a cone, with killing.
///
/// A step is killed when its endpoint leaves the cone, or, with bridge
/// correction on, when the Brownian bridge between the two grid points crosses
/// a flat boundary piece: probability exp(-2ab/dt) per facet for endpoint
/// distances a, b. Facets are treated independently, which is exact for
/// half-spaces and for wedges whose facet normals are orthogonal (beta = pi/2).
/// Curved boundaries only get the grid check.
class KilledWalker {
 public:
  KilledWalker(const ConeSpec& cone, double dt, bool bridge_correction = true);

  // Advances p by one increment. Returns false if the path was killed.
  bool step(std::span<double> p, RandomSource& rng) const;
  bool inside(std::span<const double> p) const;

  double dt() const { return dt_; }
  int dimension() const { return dim_; }

 private:
  ConeSpec cone_;
  int dim_;
  double dt_;
  double sqrt_dt_;
  std::vector<LinearFacet> facets_;
};

struct ConditionedOptions {
  double dt = 1e-4;
  double horizon = 1.0;
  std::int64_t max_attempts = 10'000'000;
  bool bridge_correction = true;
};

struct ConditionedSample {
  PathSample path;
  RejectionReport report;
};

/// Brownian motion on [0, horizon] with N(0, dt I) increments, from `start`
/// (origin when empty).
PathSample sample_bm(int d, double dt, double horizon, RandomSource& rng,
                     std::span<const double> start = {});
PathSample sample_bm(int d, double dt, double horizon, const RngStreamSpec& spec,
                     std::span<const double> start = {});

/// 1-D Brownian meander on [0, 1] by the last-zero transform
/// |X(sigma + t(1 - sigma))| / sqrt(1 - sigma). `redraws` counts source paths
/// discarded because the last sign change fell in the final grid step.
PathSample sample_meander_transform(double dt, RandomSource& rng);
PathSample sample_meander_transform(double dt, const RngStreamSpec& spec);

/// 1-D path after the section T_x = first time the path sits at level x and
/// then stays positive for one time unit; returns the unit-length segment.
///
/// Excursion signs of Brownian motion are fair coins independent of the
/// excursion shapes, so the segment is read off |X|: the first qualifying
/// excursion of |X| has the law of the first qualifying positive excursion of
/// X. This keeps the search time finite in mean (long negative excursions
/// would otherwise make it heavy-tailed).
PathSample sample_meander_section(double x, double dt, RandomSource& rng,
                                  double max_horizon = 1e4);
PathSample sample_meander_section(double x, double dt, const RngStreamSpec& spec,
                                  double max_horizon = 1e4);

/// Brownian motion from x conditioned to stay in the cone up to `horizon`, by
/// rejection. Throws RejectionExhausted after max_attempts.
ConditionedSample sample_conditioned(const ConeSpec& cone, std::span<const double> x,
                                     const ConditionedOptions& opts, RandomSource& rng);
ConditionedSample sample_conditioned(const ConeSpec& cone, std::span<const double> x,
                                     const ConditionedOptions& opts, const RngStreamSpec& spec);

/// Meander in coordinate 1, independent Brownian motions in coordinates 2..d.
PathSample sample_d_meander(int d, double dt, RandomSource& rng);
PathSample sample_d_meander(int d, double dt, const RngStreamSpec& spec);

/// Interior unit vector where m_1 peaks: the bisector for wedges, e1 otherwise.
std::vector<double> default_direction(const ConeSpec& cone);

/// Approximate sample of the cone meander: conditioned Brownian motion started
/// at epsilon * direction. The law converges to the meander as epsilon -> 0;
/// the acceptance rate shrinks like epsilon^(alpha_1 - d/2 + 1), so very small
/// epsilon may exhaust max_attempts.
ConditionedSample sample_cone_meander_approx(const ConeSpec& cone, double epsilon,
                                             std::span<const double> direction,
                                             const ConditionedOptions& opts, RandomSource& rng);
ConditionedSample sample_cone_meander_approx(const ConeSpec& cone, double epsilon,
                                             std::span<const double> direction,
                                             const ConditionedOptions& opts,
                                             const RngStreamSpec& spec);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Fraction of `n` killed Brownian paths from y still inside the cone at time
/// s, with binomial standard error. Streams are blocks of paths keyed by
/// (seed, block), so the result does not depend on `workers`.
Estimate monte_carlo_survival(const ConeSpec& cone, std::span<const double> y, double s,
                              std::int64_t n, double dt, std::uint64_t seed, int workers = 1);

}  // namespace cmeander
