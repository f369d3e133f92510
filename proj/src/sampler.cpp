#include "conemeander/sampler.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "conemeander/parallel.hpp"

namespace cmeander {

namespace {

std::size_t grid_steps(double horizon, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(horizon >= dt)) throw DomainError("horizon must be at least dt");
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

PathSample empty_path(int dim, double dt, std::size_t steps) {
  PathSample path;
  path.dt = dt;
  path.dim = dim;
  path.times.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) path.times[k] = static_cast<double>(k) * dt;
  path.points.assign((steps + 1) * static_cast<std::size_t>(dim), 0.0);
  return path;
}

// Linear interpolation of a grid path stored from index `base`.
double interpolate(const std::vector<double>& values, std::size_t base, double dt, double t) {
  const double pos = t / dt - static_cast<double>(base);
  std::size_t i = pos <= 0.0 ? 0 : static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) i = values.size() - 2;
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

// Whether the Brownian bridge between same-sign values a and b over a step
// of length dt touches zero. Skips the draw when the chance is negligible.
bool bridge_touches_zero(double a, double b, double dt, RandomSource& rng) {
  const double q = std::exp(-2.0 * a * b / dt);
  return q > 1e-12 && rng.uniform() < q;
}

}  // namespace

KilledWalker::KilledWalker(const ConeSpec& cone, double dt, bool bridge_correction)
    : cone_(cone), dim_(cone.dimension()), dt_(dt), sqrt_dt_(std::sqrt(dt)) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("KilledWalker: dt must be positive");
  if (bridge_correction) facets_ = linear_facets(cone);
}

bool KilledWalker::inside(std::span<const double> p) const { return contains_unchecked(cone_, p); }

bool KilledWalker::step(std::span<double> p, RandomSource& rng) const {
  double before[4];
  const std::size_t nf = facets_.size();
  for (std::size_t f = 0; f < nf; ++f) before[f] = facets_[f].signed_distance(p);
  for (auto& v : p) v += sqrt_dt_ * rng.normal();
  if (!contains_unchecked(cone_, p)) return false;
  if (nf == 0) return true;
  double survive = 1.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const double exponent = 2.0 * before[f] * facets_[f].signed_distance(p) / dt_;
    if (exponent < 40.0) survive *= 1.0 - std::exp(-exponent);
  }
  if (survive < 1.0 && rng.uniform() > survive) return false;
  return true;
}

PathSample sample_bm(int d, double dt, double horizon, RandomSource& rng,
                     std::span<const double> start) {
  if (d < 1) throw DomainError("sample_bm: dimension must be >= 1");
  if (!start.empty() && static_cast<int>(start.size()) != d) {
    throw DomainError("sample_bm: start point has wrong dimension");
  }
  const std::size_t steps = grid_steps(horizon, dt);
  PathSample path = empty_path(d, dt, steps);
  if (!start.empty()) std::copy(start.begin(), start.end(), path.points.begin());
  const double sd = std::sqrt(dt);
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto prev = path.point(k - 1);
    auto cur = path.point(k);
    for (int i = 0; i < d; ++i) cur[i] = prev[i] + sd * rng.normal();
  }
  return path;
}

PathSample sample_bm(int d, double dt, double horizon, const RngStreamSpec& spec,
                     std::span<const double> start) {
  RandomSource rng(spec);
  PathSample path = sample_bm(d, dt, horizon, rng, start);
  path.seed = spec;
  return path;
}

PathSample sample_meander_transform(double dt, RandomSource& rng) {
  const std::size_t steps = grid_steps(1.0, dt);
  if (steps < 2) throw DomainError("sample_meander_transform: dt too coarse");
  const double grid_dt = 1.0 / static_cast<double>(steps);
  const double sd = std::sqrt(grid_dt);
  std::vector<double> x(steps + 1);
  std::int64_t redraws = 0;
  for (;;) {
    x[0] = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) x[k] = x[k - 1] + sd * rng.normal();
    // Step holding the last zero, scanning back from the end: a sign change,
    // or a Brownian bridge between same-sign values that touches zero
    // (probability exp(-2ab/dt)). Step 0 always qualifies since x[0] = 0.
    std::size_t last = 0;
    bool sign_change = true;
    for (std::size_t k = steps - 1; k > 0; --k) {
      if (x[k] * x[k + 1] <= 0.0) {
        last = k;
        break;
      }
      if (bridge_touches_zero(x[k], x[k + 1], grid_dt, rng)) {
        last = k;
        sign_change = false;
        break;
      }
    }
    if (last == steps - 1) {
      ++redraws;
      continue;
    }
    const double gap = x[last] - x[last + 1];
    double offset = 0.5 * grid_dt;
    if (sign_change) offset = gap == 0.0 ? 0.0 : grid_dt * x[last] / gap;
    const double sigma = static_cast<double>(last) * grid_dt + offset;
    const double span_len = 1.0 - sigma;
    const double scale = 1.0 / std::sqrt(span_len);
    PathSample path = empty_path(1, grid_dt, steps);
    for (std::size_t i = 1; i <= steps; ++i) {
      const double s = sigma + path.times[i] * span_len;
      path.points[i] = std::abs(interpolate(x, 0, grid_dt, s)) * scale;
    }
    path.points[0] = 0.0;
    path.redraws = redraws;
    return path;
  }
}

PathSample sample_meander_transform(double dt, const RngStreamSpec& spec) {
  RandomSource rng(spec);
  PathSample path = sample_meander_transform(dt, rng);
  path.seed = spec;
  return path;
}

PathSample sample_meander_section(double x, double dt, RandomSource& rng, double max_horizon) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("sample_meander_section: x must be >= 0");
  const std::size_t steps = grid_steps(1.0, dt);
  const double grid_dt = 1.0 / static_cast<double>(steps);
  const double sd = std::sqrt(grid_dt);

  // Signed path values from grid index `base` onwards.
  std::vector<double> buf{0.0};
  std::size_t base = 0;
  std::size_t j = 0;
  double prev = 0.0;
  bool have_candidate = (x == 0.0);
  double candidate = 0.0;

  auto success = [&] {
    PathSample path = empty_path(1, grid_dt, steps);
    path.points[0] = x;
    for (std::size_t i = 1; i <= steps; ++i) {
      path.points[i] = std::abs(interpolate(buf, base, grid_dt, candidate + path.times[i]));
    }
    return path;
  };

  for (;;) {
    ++j;
    const double t = static_cast<double>(j) * grid_dt;
    if (t > max_horizon) {
      std::ostringstream os;
      os << "sample_meander_section: no section found before horizon " << max_horizon;
      throw SamplingError(os.str());
    }
    const double cur = prev + sd * rng.normal();
    buf.push_back(cur);
    const double t_prev = t - grid_dt;

    bool fresh = false;  // candidate (if any) was set during this step
    if (prev * cur < 0.0 || cur == 0.0) {
      const double zero = prev == cur ? t : t_prev + grid_dt * prev / (prev - cur);
      if (have_candidate && zero > candidate + 1.0) return success();
      have_candidate = false;
      if (x == 0.0) {
        have_candidate = true;
        candidate = zero;
      } else if (std::abs(cur) >= x) {
        have_candidate = true;
        candidate = zero + (t - zero) * x / std::abs(cur);
      }
      fresh = true;
    } else if (bridge_touches_zero(prev, cur, grid_dt, rng)) {
      // Zero between grid points: the excursion ends here.
      const double zero = t_prev + 0.5 * grid_dt;
      if (have_candidate && zero > candidate + 1.0) return success();
      have_candidate = x == 0.0;
      candidate = zero;
      fresh = true;
    } else if (have_candidate) {
      if (t >= candidate + 1.0) return success();
    } else {
      const double a = std::abs(prev) - x;
      const double b = std::abs(cur) - x;
      if (a * b <= 0.0) {
        have_candidate = true;
        candidate = a == b ? t_prev : t_prev + grid_dt * a / (a - b);
      }
      fresh = true;
    }
    // Values before index j - 1 can no longer be read; drop them in bulk.
    if (fresh && j - 1 - base > (1u << 20)) {
      buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(j - 1 - base));
      base = j - 1;
    }
    prev = cur;
  }
}

PathSample sample_meander_section(double x, double dt, const RngStreamSpec& spec,
                                  double max_horizon) {
  RandomSource rng(spec);
  PathSample path = sample_meander_section(x, dt, rng, max_horizon);
  path.seed = spec;
  return path;
}

ConditionedSample sample_conditioned(const ConeSpec& cone, std::span<const double> x,
                                     const ConditionedOptions& opts, RandomSource& rng) {
  if (!contains(cone, x)) throw DomainError("sample_conditioned: start point is not in the cone");
  if (opts.max_attempts < 1) throw DomainError("sample_conditioned: max_attempts must be >= 1");
  const std::size_t steps = grid_steps(opts.horizon, opts.dt);
  const double grid_dt = opts.horizon / static_cast<double>(steps);
  const KilledWalker walker(cone, grid_dt, opts.bridge_correction);
  const int d = cone.dimension();

  ConditionedSample out;
  out.path = empty_path(d, grid_dt, steps);
  std::vector<double> p(d);
  for (std::int64_t attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    out.report.attempts = attempt;
    std::copy(x.begin(), x.end(), p.begin());
    std::copy(x.begin(), x.end(), out.path.points.begin());
    bool alive = true;
    for (std::size_t k = 1; k <= steps && alive; ++k) {
      alive = walker.step(p, rng);
      std::copy(p.begin(), p.end(), out.path.point(k).begin());
    }
    if (alive) {
      out.report.accepted = 1;
      out.path.redraws = attempt - 1;
      return out;
    }
  }
  std::ostringstream os;
  os << "sample_conditioned: no path survived " << opts.max_attempts << " attempts in "
     << cone.to_string() << "; start further from the boundary or allow more attempts";
  throw RejectionExhausted(os.str(), out.report);
}

ConditionedSample sample_conditioned(const ConeSpec& cone, std::span<const double> x,
                                     const ConditionedOptions& opts, const RngStreamSpec& spec) {
  RandomSource rng(spec);
  ConditionedSample s = sample_conditioned(cone, x, opts, rng);
  s.path.seed = spec;
  return s;
}

PathSample sample_d_meander(int d, double dt, RandomSource& rng) {
  if (d < 2) throw DomainError("sample_d_meander: dimension must be >= 2");
  const PathSample first = sample_meander_transform(dt, rng);
  const PathSample rest = sample_bm(d - 1, first.dt, 1.0, rng);
  PathSample path = empty_path(d, first.dt, first.size() - 1);
  for (std::size_t k = 0; k < path.size(); ++k) {
    auto p = path.point(k);
    p[0] = first.points[k];
    const auto q = rest.point(k);
    std::copy(q.begin(), q.end(), p.begin() + 1);
  }
  path.redraws = first.redraws;
  return path;
}

PathSample sample_d_meander(int d, double dt, const RngStreamSpec& spec) {
  RandomSource rng(spec);
  PathSample path = sample_d_meander(d, dt, rng);
  path.seed = spec;
  return path;
}

std::vector<double> default_direction(const ConeSpec& cone) {
  if (const auto* w = std::get_if<Wedge>(&cone.variant())) {
    return {std::cos(0.5 * w->beta), std::sin(0.5 * w->beta)};
  }
  std::vector<double> e1(cone.dimension(), 0.0);
  e1[0] = 1.0;
  return e1;
}

ConditionedSample sample_cone_meander_approx(const ConeSpec& cone, double epsilon,
                                             std::span<const double> direction,
                                             const ConditionedOptions& opts, RandomSource& rng) {
  if (!(epsilon > 0.0)) throw DomainError("sample_cone_meander_approx: epsilon must be positive");
  std::vector<double> u = direction.empty() ? default_direction(cone)
                                            : std::vector<double>(direction.begin(), direction.end());
  double norm = 0.0;
  for (double v : u) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw DomainError("sample_cone_meander_approx: zero direction");
  for (auto& v : u) v *= epsilon / norm;
  if (!contains(cone, u)) throw DomainError("sample_cone_meander_approx: direction is not interior");
  try {
    return sample_conditioned(cone, u, opts, rng);
  } catch (const RejectionExhausted& e) {
    std::ostringstream os;
    os << e.what() << " (epsilon=" << epsilon << "; try a larger epsilon or more attempts)";
    throw RejectionExhausted(os.str(), e.report());
  }
}

ConditionedSample sample_cone_meander_approx(const ConeSpec& cone, double epsilon,
                                             std::span<const double> direction,
                                             const ConditionedOptions& opts,
                                             const RngStreamSpec& spec) {
  RandomSource rng(spec);
  ConditionedSample s = sample_cone_meander_approx(cone, epsilon, direction, opts, rng);
  s.path.seed = spec;
  return s;
}

Estimate monte_carlo_survival(const ConeSpec& cone, std::span<const double> y, double s,
                              std::int64_t n, double dt, std::uint64_t seed, int workers) {
  if (!contains(cone, y)) throw DomainError("monte_carlo_survival: start point is not in the cone");
  if (n < 1) throw DomainError("monte_carlo_survival: need at least one path");
  if (s == 0.0) return {1.0, 0.0};
  if (!(s > 0.0)) throw DomainError("monte_carlo_survival: time must be >= 0");
  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s / dt)));
  const KilledWalker walker(cone, s / static_cast<double>(steps));
  constexpr std::int64_t kBlock = 4096;
  const std::size_t blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  std::vector<std::int64_t> survivors(blocks, 0);
  parallel_for(blocks, workers, [&](std::size_t b) {
    RandomSource rng({seed, b});
    const std::int64_t begin = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t end = std::min(n, begin + kBlock);
    std::vector<double> p(y.size());
    std::int64_t alive_count = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      std::copy(y.begin(), y.end(), p.begin());
      bool alive = true;
      for (std::size_t k = 0; k < steps && alive; ++k) alive = walker.step(p, rng);
      alive_count += alive ? 1 : 0;
    }
    survivors[b] = alive_count;
  });
  std::int64_t total = 0;
  for (auto v : survivors) total += v;
  const double phat = static_cast<double>(total) / static_cast<double>(n);
  return {phat, std::sqrt(phat * (1.0 - phat) / static_cast<double>(n))};
}

}  // namespace cmeander
