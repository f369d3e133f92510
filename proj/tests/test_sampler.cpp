#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conemeander/kernel.hpp"
#include "conemeander/sampler.hpp"
#include "conemeander/specfun.hpp"
#include "conemeander/stats.hpp"

using namespace cmeander;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("Brownian paths") {
  const PathSample p = sample_bm(2, 0.01, 1.0, RngStreamSpec{5, 0});
  CHECK(p.size() == 101);
  CHECK(p.dim == 2);
  CHECK(p.times.back() == doctest::Approx(1.0));
  CHECK(p.point(0)[0] == 0.0);
  p.validate();

  const std::vector<double> start{0.5, -1.0};
  const PathSample q = sample_bm(2, 0.01, 1.0, RngStreamSpec{5, 0}, start);
  CHECK(q.point(0)[1] == -1.0);
  CHECK(q.point(50)[0] - 0.5 == doctest::Approx(p.point(50)[0]).epsilon(1e-12));

  const PathSample again = sample_bm(2, 0.01, 1.0, RngStreamSpec{5, 0});
  CHECK(again.points == p.points);
  const PathSample other = sample_bm(2, 0.01, 1.0, RngStreamSpec{5, 1});
  CHECK(other.points != p.points);

  // X(1) over many paths is N(0, 1) in each coordinate.
  std::vector<double> end;
  std::vector<double> increments;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    const PathSample b = sample_bm(1, 0.1, 1.0, RngStreamSpec{9, i});
    end.push_back(b.points.back());
    increments.push_back((b.points[3] - b.points[2]) / std::sqrt(0.1));
  }
  CHECK(std::abs(mean(end)) < 4 / std::sqrt(4000.0));
  CHECK(std::abs(variance(end) - 1.0) < 0.1);
  CHECK(ks_one_sample(increments, normal_cdf).p_value > 0.001);
  CHECK_THROWS_AS(sample_bm(0, 0.01, 1.0, RngStreamSpec{}), DomainError);
  CHECK_THROWS_AS(sample_bm(1, 0.0, 1.0, RngStreamSpec{}), DomainError);
}

TEST_CASE("meander transform ends with the Rayleigh law") {
  std::vector<double> ends;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const PathSample m = sample_meander_transform(1e-3, RngStreamSpec{21, i});
    CHECK(m.times.back() == doctest::Approx(1.0));
    REQUIRE(std::all_of(m.points.begin(), m.points.end(), [](double v) { return v >= 0.0; }));
    ends.push_back(m.points.back());
  }
  const auto rayleigh = [](double r) { return r <= 0 ? 0.0 : 1 - std::exp(-r * r / 2); };
  CHECK(ks_one_sample(ends, rayleigh).p_value > 0.001);
}

TEST_CASE("meander section") {
  std::vector<double> section;
  std::vector<double> conditioned;
  const ConeSpec half = ConeSpec::half_space(1);
  const std::vector<double> x{0.5};
  ConditionedOptions opts;
  opts.dt = 1e-3;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const PathSample s = sample_meander_section(0.5, 1e-3, RngStreamSpec{31, i});
    CHECK(s.points.front() == doctest::Approx(0.5).epsilon(0.2));
    REQUIRE(std::all_of(s.points.begin() + 1, s.points.end(), [](double v) { return v > 0.0; }));
    section.push_back(s.points.back());
    conditioned.push_back(sample_conditioned(half, x, opts, RngStreamSpec{32, i}).path.points.back());
  }
  CHECK(ks_two_sample(section, conditioned).p_value > 0.001);
}

TEST_CASE("d-meander") {
  std::vector<double> second;
  std::vector<double> first;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const PathSample m = sample_d_meander(3, 1e-3, RngStreamSpec{41, i});
    CHECK(m.dim == 3);
    first.push_back(m.point(m.size() - 1)[0]);
    second.push_back(m.point(m.size() - 1)[1]);
  }
  CHECK(ks_one_sample(second, normal_cdf).p_value > 0.001);
  CHECK(ks_one_sample(first, [](double r) { return r <= 0 ? 0.0 : 1 - std::exp(-r * r / 2); }).p_value > 0.001);
}

TEST_CASE("conditioned sampling acceptance rates") {
  ConditionedOptions opts;
  opts.dt = 1e-3;

  // Half-line from 1: W_1(tau > 1) = 2 Phi(1) - 1.
  RejectionReport half;
  const ConeSpec line = ConeSpec::half_space(1);
  const std::vector<double> one{1.0};
  for (std::uint64_t i = 0; i < 3000; ++i) half += sample_conditioned(line, one, opts, RngStreamSpec{51, i}).report;
  const double p = 0.682689492137;
  const double rate = half.acceptance_rate();
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(half.attempts));
  CHECK(std::abs(rate - p) < 4 * se);

  // Quadrant from (0.5, 0.8) against the series.
  const ConeSpec quad = ConeSpec::wedge(std::numbers::pi / 2);
  const std::vector<double> x{0.5, 0.8};
  RejectionReport q;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const ConditionedSample s = sample_conditioned(quad, x, opts, RngStreamSpec{52, i});
    bool inside = true;
    for (std::size_t k = 0; k < s.path.size(); ++k) inside = inside && contains(quad, s.path.point(k));
    REQUIRE(inside);
    q += s.report;
  }
  const double target = survival_probability(spectral_basis(quad), x, 1.0).value;
  const double qse = std::sqrt(target * (1 - target) / static_cast<double>(q.attempts));
  CHECK(std::abs(q.acceptance_rate() - target) < 4 * qse);
}

TEST_CASE("acceptance of the approximate meander scales with epsilon") {
  // Quadrant: alpha1 = 2, rate ~ epsilon^2, so halving epsilon quarters it.
  const ConeSpec quad = ConeSpec::wedge(std::numbers::pi / 2);
  const auto dir = default_direction(quad);
  ConditionedOptions opts;
  opts.dt = 1e-3;
  RejectionReport a, b;
  for (std::uint64_t i = 0; i < 300; ++i) {
    a += sample_cone_meander_approx(quad, 0.1, dir, opts, RngStreamSpec{61, i}).report;
    b += sample_cone_meander_approx(quad, 0.05, dir, opts, RngStreamSpec{62, i}).report;
  }
  const double ratio = a.acceptance_rate() / b.acceptance_rate();
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.3);
  CHECK(dir[0] == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("rejection budget") {
  const ConeSpec quad = ConeSpec::wedge(std::numbers::pi / 2);
  ConditionedOptions opts;
  opts.dt = 1e-3;
  opts.max_attempts = 5;
  const std::vector<double> x{1e-4, 1e-4};
  bool thrown = false;
  try {
    sample_conditioned(quad, x, opts, RngStreamSpec{71, 0});
  } catch (const RejectionExhausted& e) {
    thrown = true;
    CHECK(e.report().attempts == 5);
    CHECK(e.report().accepted == 0);
  }
  CHECK(thrown);
  const std::vector<double> outside{-1.0, 1.0};
  opts.max_attempts = 10;
  CHECK_THROWS_AS(sample_conditioned(quad, outside, opts, RngStreamSpec{}), DomainError);
}

TEST_CASE("Monte Carlo survival does not depend on the worker count") {
  const ConeSpec quad = ConeSpec::wedge(std::numbers::pi / 2);
  const std::vector<double> y{0.7, 0.4};
  const Estimate one = monte_carlo_survival(quad, y, 0.5, 20000, 1e-3, 3, 1);
  const Estimate four = monte_carlo_survival(quad, y, 0.5, 20000, 1e-3, 3, 4);
  CHECK(one.value == four.value);
  CHECK(one.std_error == four.std_error);
  const double target = survival_probability(spectral_basis(quad), y, 0.5).value;
  CHECK(std::abs(one.value - target) < 4 * one.std_error);
}

TEST_CASE("killed walker") {
  const ConeSpec quad = ConeSpec::wedge(std::numbers::pi / 2);
  const KilledWalker w(quad, 1e-2);
  CHECK(w.dimension() == 2);
  CHECK(w.inside(std::vector<double>{0.1, 0.1}));
  CHECK_FALSE(w.inside(std::vector<double>{-0.1, 0.1}));
  // Near the boundary with a coarse step, most walkers die within a few steps.
  RandomSource rng(RngStreamSpec{81, 0});
  int alive = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> p{1e-3, 1.0};
    bool ok = true;
    for (int k = 0; k < 5 && ok; ++k) ok = w.step(p, rng);
    alive += ok;
  }
  CHECK(alive < 50);
}
