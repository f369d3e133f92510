#include "conemeander/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "conemeander/errors.hpp"
#include "conemeander/kernel.hpp"
#include "conemeander/parallel.hpp"
#include "conemeander/specfun.hpp"
#include "conemeander/stats.hpp"

namespace cmeander {

namespace {

// Standard deviation of sqrt(n) D under the null.
constexpr double kKsSpread = 0.2589;

enum StreamTag : std::uint64_t {
  kDensity = 1,
  kExit = 2,
  kScaleLeft = 3,
  kScaleRight = 4,
  kBall = 8,     // + row
  kFdd = 32,     // + rung
  kMeanderTransform = 64,
  kMeanderSection = 65,
  kKernel = 66,
};

RngStreamSpec stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return {seed, (tag << 48) | index};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string list(std::span<const double> values) {
  std::string out;
  for (double v : values) out += (out.empty() ? "" : ",") + num(v);
  return out;
}

void require_n(std::int64_t n, std::int64_t minimum, const char* who) {
  if (n < minimum) {
    throw DomainError(std::string(who) + ": n must be at least " + std::to_string(minimum));
  }
}

ReportCell ks_cell(std::string label, const KsResult& ks, const Thresholds& th, bool control) {
  ReportCell c;
  c.label = std::move(label);
  c.estimate = ks.statistic;
  c.std_error = kKsSpread / std::sqrt(ks.effective_n);
  c.statistic = ks.statistic;
  c.p_value = ks.p_value;
  c.pass = ks.p_value > th.ks_p;
  c.control = control;
  return c;
}

ReportCell z_cell(std::string label, double estimate, double std_error, double target, double bound,
                  bool control) {
  ReportCell c;
  c.label = std::move(label);
  c.estimate = estimate;
  c.std_error = std_error;
  c.target = target;
  const double diff = estimate - target;
  c.statistic = std_error > 0.0 ? diff / std_error : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
  c.p_value = std::erfc(std::abs(c.statistic) / std::numbers::sqrt2);
  c.pass = std::abs(c.statistic) <= bound;
  c.control = control;
  return c;
}

void finish(McReport& r, const Stopwatch& clock) {
  r.checks_pass = true;
  r.control_rejected = false;
  bool any_control = false;
  for (const auto& c : r.cells) {
    if (c.control) {
      any_control = true;
      if (!c.pass) r.control_rejected = true;
    } else if (!c.pass) {
      r.checks_pass = false;
    }
  }
  if (!any_control) r.control_rejected = true;
  r.pass = r.checks_pass && r.control_rejected;
  r.wall_time = clock.seconds();
}

void echo_common(McReport& r, const VerifyOptions& opts) {
  r.config.emplace_back("seed", std::to_string(opts.seed));
  r.config.emplace_back("workers", std::to_string(opts.workers));
  r.config.emplace_back("max_attempts", std::to_string(opts.max_attempts));
}

RejectionReport merge(const std::vector<RejectionReport>& reports) {
  RejectionReport total;
  for (const auto& r : reports) total += r;
  return total;
}

// Endpoints at grid index `index` of n epsilon-approximate meander paths.
struct EndpointSample {
  std::vector<double> points;  // n * d
  RejectionReport report;
};

EndpointSample meander_endpoints(const ConeSpec& cone, double epsilon, std::int64_t n, double dt,
                                 const VerifyOptions& opts, std::uint64_t tag) {
  const int d = cone.dimension();
  ConditionedOptions co;
  co.dt = dt;
  co.max_attempts = opts.max_attempts;
  EndpointSample out;
  out.points.resize(static_cast<std::size_t>(n) * d);
  std::vector<RejectionReport> reports(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), opts.workers, [&](std::size_t i) {
    const ConditionedSample s =
        sample_cone_meander_approx(cone, epsilon, {}, co, stream(opts.seed, tag, i));
    const auto end = s.path.point(s.path.size() - 1);
    std::copy(end.begin(), end.end(), out.points.begin() + static_cast<std::ptrdiff_t>(i * d));
    reports[i] = s.report;
  });
  out.report = merge(reports);
  return out;
}

std::vector<double> radii(const std::vector<double>& points, int d) {
  std::vector<double> r(points.size() / d);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = radius(std::span<const double>(points.data() + i * d, d));
  }
  return r;
}

// A cone of the same dimension whose entrance law differs: used as a wrong target.
double contrast_alpha1(const ConeSpec& cone) {
  const double pi = std::numbers::pi;
  if (const auto* w = std::get_if<Wedge>(&cone.variant())) {
    return spectral_basis(ConeSpec::wedge(w->beta < pi ? std::min(pi, 2.0 * w->beta) : pi / 2)).alpha1();
  }
  if (const auto* c = std::get_if<Circular3D>(&cone.variant())) {
    return circular_cone_principal(c->theta0 >= pi / 4 ? 0.5 * c->theta0 : 2.0 * c->theta0).alpha1;
  }
  const int d = cone.dimension();
  if (d == 2) return spectral_basis(ConeSpec::wedge(pi / 2)).alpha1();
  if (d == 3) return circular_cone_principal(pi / 4).alpha1;
  return 2.0 * spectral_basis(cone).alpha1();
}

std::size_t grid_index(double t, double grid_dt) {
  return static_cast<std::size_t>(std::llround(t / grid_dt));
}

double unit_grid_dt(double dt) {
  if (!(dt > 0.0 && dt < 1.0)) throw DomainError("dt must lie in (0, 1)");
  return 1.0 / static_cast<double>(std::llround(1.0 / dt));
}

}  // namespace

double radius(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return std::sqrt(s);
}

McReport verify_entrance_density(const ConeSpec& cone, double epsilon, std::int64_t n, double dt,
                                 const VerifyOptions& opts) {
  const Stopwatch clock;
  require_n(n, 1000, "verify_entrance_density");
  const SpectralBasis basis = spectral_basis(cone);
  const int d = cone.dimension();
  const Thresholds& th = opts.thresholds;

  McReport r;
  r.name = "density";
  r.n = n;
  r.config = {{"cone", cone.to_string()}, {"epsilon", num(epsilon)}, {"dt", num(dt)}};
  echo_common(r, opts);

  const EndpointSample sample = meander_endpoints(cone, epsilon, n, dt, opts, kDensity);
  r.sampling = sample.report;
  const std::vector<double> rad = radii(sample.points, d);

  const RadialMarginal radial(basis.alpha1(), d);
  r.cells.push_back(ks_cell("radial", ks_one_sample(rad, [&](double v) { return radial.cdf(v); }), th, false));
  if (d >= 2) {
    const AngularMarginal angular(basis);
    std::vector<double> ang(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < ang.size(); ++i) {
      ang[i] = polar(cone, std::span<const double>(sample.points.data() + i * d, d)).angular;
    }
    r.cells.push_back(ks_cell("angular", ks_one_sample(ang, [&](double v) { return angular.cdf(v); }), th, false));
  }
  const RadialMarginal wrong(1.1 * basis.alpha1(), d);
  r.cells.push_back(ks_cell("control: radial with alpha1 * 1.1",
                            ks_one_sample(rad, [&](double v) { return wrong.cdf(v); }), th, true));
  finish(r, clock);
  return r;
}

McReport verify_exit_law(const ConeSpec& cone, double epsilon, std::int64_t n, double dt,
                         std::span<const double> t_list, const VerifyOptions& opts) {
  const Stopwatch clock;
  require_n(n, 1000, "verify_exit_law");
  if (t_list.empty() || t_list.size() > 30) throw DomainError("verify_exit_law: need 1 to 30 times");
  std::vector<double> times(t_list.begin(), t_list.end());
  std::sort(times.begin(), times.end());
  for (double t : times) {
    if (!(t > 1.0 && t <= 10.0)) throw DomainError("verify_exit_law: times must lie in (1, 10]");
  }
  const double grid_dt = unit_grid_dt(dt);
  std::vector<std::size_t> marks;
  for (double t : times) marks.push_back(std::max<std::size_t>(1, grid_index(t - 1.0, grid_dt)));

  const SpectralBasis basis = spectral_basis(cone);
  const double exponent = exit_exponent(basis);
  const Thresholds& th = opts.thresholds;

  McReport r;
  r.name = "exit-law";
  r.n = n;
  r.config = {{"cone", cone.to_string()}, {"epsilon", num(epsilon)}, {"dt", num(dt)}, {"t_list", list(times)}};
  echo_common(r, opts);

  ConditionedOptions co;
  co.dt = grid_dt;
  co.max_attempts = opts.max_attempts;
  const KilledWalker walker(cone, grid_dt);
  std::vector<std::uint32_t> alive_mask(static_cast<std::size_t>(n), 0);
  std::vector<RejectionReport> reports(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), opts.workers, [&](std::size_t i) {
    RandomSource rng(stream(opts.seed, kExit, i));
    const ConditionedSample s = sample_cone_meander_approx(cone, epsilon, {}, co, rng);
    reports[i] = s.report;
    const auto end = s.path.point(s.path.size() - 1);
    std::vector<double> p(end.begin(), end.end());
    std::uint32_t mask = 0;
    std::size_t k = 0;
    for (std::size_t m = 0; m < marks.size(); ++m) {
      bool alive = true;
      for (; k < marks[m] && alive; ++k) alive = walker.step(p, rng);
      if (!alive) break;
      mask |= 1u << m;
    }
    alive_mask[i] = mask;
  });
  r.sampling = merge(reports);

  const double nn = static_cast<double>(n);
  std::vector<double> phat(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) {
    std::int64_t count = 0;
    for (auto mask : alive_mask) count += (mask >> m) & 1u;
    phat[m] = static_cast<double>(count) / nn;
  }

  auto add_cells = [&](double expo, bool control, const std::string& prefix) {
    for (std::size_t m = 0; m < times.size(); ++m) {
      const double se = std::sqrt(phat[m] * (1.0 - phat[m]) / nn);
      r.cells.push_back(z_cell(prefix + "t=" + num(times[m]), phat[m], se, std::pow(times[m], expo),
                               th.z_max, control));
    }
    ReportCell slope;
    slope.label = prefix + "log-log slope";
    slope.target = expo;
    slope.control = control;
    if (std::all_of(phat.begin(), phat.end(), [](double p) { return p > 0.0; })) {
      const std::size_t k = times.size();
      std::vector<double> x(k), y(k), cov(k * k);
      for (std::size_t a = 0; a < k; ++a) {
        x[a] = std::log(times[a]);
        y[a] = std::log(phat[a]);
        for (std::size_t b = 0; b < k; ++b) {
          // Survival events are nested, so the earlier time carries the covariance.
          const double p = phat[std::min(a, b)];
          cov[a * k + b] = (1.0 - p) / (nn * p);
        }
      }
      try {
        const SlopeFit fit = gls_slope_through_origin(x, y, cov);
        slope = z_cell(slope.label, fit.slope, fit.std_error, expo, th.slope_sigmas, control);
      } catch (const NumericError&) {
        slope.pass = false;
      }
    } else {
      slope.pass = false;
    }
    r.cells.push_back(slope);
  };
  add_cells(exponent, false, "");
  add_cells(1.1 * exponent, true, "control: exponent * 1.1, ");
  finish(r, clock);
  return r;
}

McReport verify_scaling(const ConeSpec& cone, std::span<const double> x, double t, std::int64_t n,
                        double dt, const VerifyOptions& opts) {
  const Stopwatch clock;
  require_n(n, 1000, "verify_scaling");
  if (!contains(cone, x)) throw DomainError("verify_scaling: x is not in the cone");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("verify_scaling: t must be positive");
  const int d = cone.dimension();
  const double root = std::sqrt(t);
  const Thresholds& th = opts.thresholds;

  McReport r;
  r.name = "scaling";
  r.n = n;
  r.config = {{"cone", cone.to_string()}, {"x", list(x)}, {"t", num(t)}, {"dt", num(dt)}};
  echo_common(r, opts);

  ConditionedOptions left;
  left.dt = dt;
  left.horizon = t;
  left.max_attempts = opts.max_attempts;
  ConditionedOptions right = left;
  right.dt = dt / t;
  right.horizon = 1.0;
  std::vector<double> x_scaled(x.begin(), x.end());
  for (auto& v : x_scaled) v /= root;

  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<double> a(nn * d), b(nn * d);
  std::vector<RejectionReport> reports(2 * nn);
  parallel_for(2 * nn, opts.workers, [&](std::size_t job) {
    const bool first = job < nn;
    const std::size_t i = first ? job : job - nn;
    const ConditionedSample s =
        first ? sample_conditioned(cone, x, left, stream(opts.seed, kScaleLeft, i))
              : sample_conditioned(cone, x_scaled, right, stream(opts.seed, kScaleRight, i));
    const auto mid = s.path.point(grid_index(0.5 * s.path.times.back(), s.path.dt));
    std::copy(mid.begin(), mid.end(), (first ? a : b).begin() + static_cast<std::ptrdiff_t>(i * d));
    reports[job] = s.report;
  });
  r.sampling = merge(reports);

  auto column = [&](const std::vector<double>& pts, int j, double factor) {
    std::vector<double> out(nn);
    for (std::size_t i = 0; i < nn; ++i) out[i] = factor * pts[i * d + j];
    return out;
  };
  auto radial = [&](const std::vector<double>& pts, double factor) {
    std::vector<double> out = radii(pts, d);
    for (auto& v : out) v *= factor;
    return out;
  };
  for (int j = 0; j < d; ++j) {
    r.cells.push_back(ks_cell("x" + std::to_string(j + 1), ks_two_sample(column(a, j, 1.0), column(b, j, root)), th, false));
  }
  r.cells.push_back(ks_cell("radius", ks_two_sample(radial(a, 1.0), radial(b, root)), th, false));
  // At t = 1 the control coincides with the check and cannot fail.
  if (std::abs(root - 1.0) > 1e-12) {
    for (int j = 0; j < d; ++j) {
      r.cells.push_back(ks_cell("control: x" + std::to_string(j + 1) + " without sqrt(t)",
                                ks_two_sample(column(a, j, 1.0), column(b, j, 1.0)), th, true));
    }
    r.cells.push_back(ks_cell("control: radius without sqrt(t)",
                              ks_two_sample(radial(a, 1.0), radial(b, 1.0)), th, true));
  }
  finish(r, clock);
  return r;
}

McReport verify_ball_estimate(int d, std::span<const double> lambda_list,
                              std::span<const double> s_list, std::int64_t n, double dt,
                              const VerifyOptions& opts) {
  const Stopwatch clock;
  if (d != 2 && d != 3) throw DomainError("verify_ball_estimate: d must be 2 or 3");
  require_n(n, 100, "verify_ball_estimate");
  if (lambda_list.empty() || s_list.empty()) throw DomainError("verify_ball_estimate: empty grid");
  for (std::size_t i = 0; i < lambda_list.size(); ++i) {
    if (!(lambda_list[i] > 0.0 && lambda_list[i] < 2.0)) {
      throw DomainError("verify_ball_estimate: lambda must lie in (0, 2)");
    }
    if (i > 0 && !(lambda_list[i] < lambda_list[i - 1])) {
      throw DomainError("verify_ball_estimate: lambda_list must be strictly decreasing");
    }
  }
  const double grid_dt = unit_grid_dt(dt);
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (!(s_list[i] >= grid_dt && s_list[i] <= 1.0)) {
      throw DomainError("verify_ball_estimate: s must lie in [dt, 1]");
    }
    if (i > 0 && !(s_list[i] < s_list[i - 1])) {
      throw DomainError("verify_ball_estimate: s_list must be strictly decreasing");
    }
  }
  const Thresholds& th = opts.thresholds;
  const ConeSpec half = ConeSpec::half_space(d);
  const double factor = std::pow(2.0, d - 1);

  McReport r;
  r.name = "ball";
  r.n = n;
  r.config = {{"d", std::to_string(d)}, {"lambda_list", list(lambda_list)},
              {"s_list", list(s_list)}, {"dt", num(grid_dt)}};
  echo_common(r, opts);

  // Row 0 is lambda = 0 (D-meander), row i + 1 is lambda_list[i].
  const std::size_t rows = lambda_list.size() + 1;
  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<std::size_t> exit_index(rows * nn);
  std::vector<RejectionReport> reports(rows * nn);
  ConditionedOptions co;
  co.dt = grid_dt;
  co.max_attempts = opts.max_attempts;
  parallel_for(rows * nn, opts.workers, [&](std::size_t job) {
    const std::size_t row = job / nn;
    const std::size_t i = job % nn;
    const RngStreamSpec spec = stream(opts.seed, kBall + row, i);
    PathSample path;
    if (row == 0) {
      path = sample_d_meander(d, grid_dt, spec);
    } else {
      std::vector<double> x(d, 0.0);
      x[0] = lambda_list[row - 1];
      ConditionedSample s = sample_conditioned(half, x, co, spec);
      reports[job] = s.report;
      path = std::move(s.path);
    }
    std::size_t k = 1;
    for (; k < path.size(); ++k) {
      const auto p = path.point(k);
      double dist = (p[0] - 1.0) * (p[0] - 1.0);
      for (int j = 1; j < d; ++j) dist += p[j] * p[j];
      if (dist >= 1.0) break;
    }
    exit_index[job] = k;  // path.size() when the ball was never left
  });
  r.sampling = merge(reports);

  const double nd = static_cast<double>(n);
  std::vector<double> prob(rows * s_list.size());
  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t j = 0; j < s_list.size(); ++j) {
      const std::size_t limit = grid_index(s_list[j], grid_dt);
      std::int64_t count = 0;
      for (std::size_t i = 0; i < nn; ++i) count += exit_index[row * nn + i] <= limit ? 1 : 0;
      prob[row * s_list.size() + j] = static_cast<double>(count) / nd;
    }
  }
  auto p_at = [&](std::size_t row, std::size_t j) { return prob[row * s_list.size() + j]; };
  auto se_of = [&](double p) { return std::sqrt(p * (1.0 - p) / nd); };

  for (std::size_t j = 0; j < s_list.size(); ++j) {
    ReportCell c;
    c.label = "lambda=0,s=" + num(s_list[j]);
    c.estimate = p_at(0, j);
    c.std_error = se_of(c.estimate);
    r.cells.push_back(c);
  }
  for (std::size_t row = 0; row < rows; ++row) {
    // s decreases along the list, so exit probabilities must not increase.
    bool monotone = true;
    for (std::size_t j = 1; j < s_list.size(); ++j) monotone = monotone && p_at(row, j) <= p_at(row, j - 1);
    ReportCell c;
    c.label = "monotone in s, lambda=" + num(row == 0 ? 0.0 : lambda_list[row - 1]);
    c.pass = monotone;
    r.cells.push_back(c);
  }
  auto bound_cells = [&](double f, bool control, const std::string& prefix) {
    for (std::size_t row = 1; row < rows; ++row) {
      for (std::size_t j = 0; j < s_list.size(); ++j) {
        const double p = p_at(row, j);
        const double p0 = p_at(0, j);
        const double pooled = std::sqrt(se_of(p) * se_of(p) + f * f * se_of(p0) * se_of(p0));
        ReportCell c;
        c.label = prefix + "lambda=" + num(lambda_list[row - 1]) + ",s=" + num(s_list[j]);
        c.estimate = p;
        c.std_error = se_of(p);
        c.target = f * p0;
        c.statistic = pooled > 0.0 ? (p - f * p0) / pooled : (p > f * p0 ? INFINITY : 0.0);
        c.pass = p <= f * p0 + th.ball_sigmas * pooled;
        c.control = control;
        r.cells.push_back(c);
      }
    }
  };
  bound_cells(factor, false, "");
  {
    ReportCell c;
    c.label = "corner lambda=" + num(lambda_list.back()) + ",s=" + num(s_list.back());
    c.estimate = p_at(rows - 1, s_list.size() - 1);
    c.std_error = se_of(c.estimate);
    c.target = th.ball_small;
    c.pass = c.estimate < th.ball_small;
    r.cells.push_back(c);
  }
  bound_cells(1.0 / factor, true, "control: factor 2^-(d-1), ");
  finish(r, clock);
  return r;
}

McReport verify_fdd_trend(const ConeSpec& cone, std::span<const double> epsilon_list, double t,
                          std::int64_t n, double dt, const VerifyOptions& opts) {
  const Stopwatch clock;
  require_n(n, 1000, "verify_fdd_trend");
  if (epsilon_list.size() < 3 || epsilon_list.size() > 10) {
    throw DomainError("verify_fdd_trend: need 3 to 10 epsilon values");
  }
  for (std::size_t i = 0; i < epsilon_list.size(); ++i) {
    if (!(epsilon_list[i] > 0.0)) throw DomainError("verify_fdd_trend: epsilon must be positive");
    if (i > 0 && !(epsilon_list[i] < epsilon_list[i - 1])) {
      throw DomainError("verify_fdd_trend: epsilon_list must be strictly decreasing");
    }
  }
  if (t != 1.0) throw DomainError("verify_fdd_trend: the analytic target is available at t = 1 only");
  const SpectralBasis basis = spectral_basis(cone);
  const int d = cone.dimension();
  const Thresholds& th = opts.thresholds;

  McReport r;
  r.name = "fdd";
  r.n = n;
  r.config = {{"cone", cone.to_string()}, {"epsilon_list", list(epsilon_list)}, {"t", num(t)}, {"dt", num(dt)}};
  echo_common(r, opts);

  std::vector<std::vector<double>> rad;
  for (std::size_t k = 0; k < epsilon_list.size(); ++k) {
    const EndpointSample s = meander_endpoints(cone, epsilon_list[k], n, dt, opts, kFdd + k);
    r.sampling += s.report;
    rad.push_back(radii(s.points, d));
  }
  const double floor = th.noise_floor * kKsNoiseScale / std::sqrt(static_cast<double>(n));

  for (std::size_t k = 1; k < rad.size(); ++k) {
    ReportCell c = ks_cell("gap eps=" + num(epsilon_list[k - 1]) + " vs " + num(epsilon_list[k]),
                           ks_two_sample(rad[k - 1], rad[k]), th, false);
    c.pass = true;  // informational
    r.cells.push_back(c);
  }

  auto ladder = [&](const RadialMarginal& target, bool control, const std::string& prefix) {
    std::vector<double> dist;
    KsResult last;
    for (std::size_t k = 0; k < rad.size(); ++k) {
      last = ks_one_sample(rad[k], [&](double v) { return target.cdf(v); });
      dist.push_back(last.statistic);
      ReportCell c = ks_cell(prefix + "distance eps=" + num(epsilon_list[k]), last, th, control);
      c.target = floor;
      c.pass = true;  // informational; the verdict is the trend cell below
      r.cells.push_back(c);
    }
    ReportCell trend;
    trend.label = prefix + "trend";
    trend.estimate = spearman_rho(dist);
    trend.statistic = trend.estimate;
    trend.p_value = spearman_decrease_p(dist);
    trend.target = floor;
    const bool quiet = std::all_of(dist.begin(), dist.end(), [&](double v) { return v < floor; });
    trend.pass = (trend.p_value < th.trend_p || quiet) && last.p_value > th.ks_p;
    trend.control = control;
    r.cells.push_back(trend);
  };
  ladder(RadialMarginal(basis.alpha1(), d), false, "");
  ladder(RadialMarginal(contrast_alpha1(cone), d), true, "control: other cone, ");
  finish(r, clock);
  return r;
}

McReport verify_meander_construction(std::span<const double> times, std::int64_t n, double dt,
                                     const VerifyOptions& opts) {
  const Stopwatch clock;
  require_n(n, 1000, "verify_meander_construction");
  if (times.empty()) throw DomainError("verify_meander_construction: no times");
  for (double t : times) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("verify_meander_construction: times must lie in (0, 1]");
  }
  const double grid_dt = unit_grid_dt(dt);
  const Thresholds& th = opts.thresholds;
  McReport r;
  r.name = "meander";
  r.n = n;
  r.config = {{"times", list(times)}, {"dt", num(grid_dt)}};
  echo_common(r, opts);

  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t k = times.size();
  std::vector<double> a(nn * k), b(nn * k);
  parallel_for(2 * nn, opts.workers, [&](std::size_t job) {
    const bool first = job < nn;
    const std::size_t i = first ? job : job - nn;
    const PathSample path = first ? sample_meander_transform(grid_dt, stream(opts.seed, kMeanderTransform, i))
                                  : sample_meander_section(0.0, grid_dt, stream(opts.seed, kMeanderSection, i));
    for (std::size_t m = 0; m < k; ++m) {
      (first ? a : b)[m * nn + i] = path.points[grid_index(times[m], path.dt)];
    }
  });
  for (std::size_t m = 0; m < k; ++m) {
    const std::vector<double> ta(a.begin() + m * nn, a.begin() + (m + 1) * nn);
    const std::vector<double> sb(b.begin() + m * nn, b.begin() + (m + 1) * nn);
    r.cells.push_back(ks_cell("t=" + num(times[m]), ks_two_sample(ta, sb), th, false));
    std::vector<double> stretched = ta;
    for (auto& v : stretched) v *= 1.1;
    r.cells.push_back(ks_cell("control: t=" + num(times[m]) + ", transform * 1.1",
                              ks_two_sample(stretched, sb), th, true));
  }
  finish(r, clock);
  return r;
}

McReport verify_heat_kernel(const ConeSpec& cone, std::span<const double> x,
                            const std::vector<std::vector<double>>& probes, double bandwidth,
                            std::int64_t n, double dt, const VerifyOptions& opts) {
  const Stopwatch clock;
  if (!std::holds_alternative<Wedge>(cone.variant())) {
    throw ConfigError("verify_heat_kernel: the series is implemented for wedges");
  }
  require_n(n, 1000, "verify_heat_kernel");
  if (!(bandwidth > 0.0)) throw DomainError("verify_heat_kernel: bandwidth must be positive");
  if (!contains(cone, x)) throw DomainError("verify_heat_kernel: x is not in the cone");
  for (const auto& y : probes) {
    if (!contains(cone, y)) throw DomainError("verify_heat_kernel: probe is not in the cone");
  }
  const SpectralBasis basis = spectral_basis(cone);
  const double grid_dt = unit_grid_dt(dt);
  const std::size_t steps = grid_index(1.0, grid_dt);
  const Thresholds& th = opts.thresholds;
  const std::size_t np = probes.size();

  McReport r;
  r.name = "heat-kernel";
  r.n = n;
  r.config = {{"cone", cone.to_string()}, {"x", list(x)}, {"bandwidth", num(bandwidth)}, {"dt", num(grid_dt)}};
  echo_common(r, opts);

  // Gaussian kernel moments per probe, accumulated in blocks of paths.
  constexpr std::int64_t kBlock = 4096;
  const std::size_t blocks = static_cast<std::size_t>((n + kBlock - 1) / kBlock);
  std::vector<double> sum(blocks * np, 0.0), sum_sq(blocks * np, 0.0);
  const KilledWalker walker(cone, grid_dt);
  const double h2 = bandwidth * bandwidth;
  const double norm = 1.0 / (2.0 * std::numbers::pi * h2);
  parallel_for(blocks, opts.workers, [&](std::size_t blk) {
    RandomSource rng(stream(opts.seed, kKernel, blk));
    const std::int64_t begin = static_cast<std::int64_t>(blk) * kBlock;
    const std::int64_t end = std::min(n, begin + kBlock);
    double p[2];
    for (std::int64_t i = begin; i < end; ++i) {
      p[0] = x[0];
      p[1] = x[1];
      bool alive = true;
      for (std::size_t s = 0; s < steps && alive; ++s) alive = walker.step(p, rng);
      if (!alive) continue;
      for (std::size_t q = 0; q < np; ++q) {
        const double dx = p[0] - probes[q][0];
        const double dy = p[1] - probes[q][1];
        const double w = norm * std::exp(-0.5 * (dx * dx + dy * dy) / h2);
        sum[blk * np + q] += w;
        sum_sq[blk * np + q] += w * w;
      }
    }
  });

  // Series smoothed by the same kernel, to bound the smoothing bias.
  const QuadratureRule g = gauss_legendre(32, -6.0, 6.0);
  auto smoothed = [&](const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t a = 0; a < g.nodes.size(); ++a) {
      for (std::size_t b = 0; b < g.nodes.size(); ++b) {
        const double z[2] = {y[0] + bandwidth * g.nodes[a], y[1] + bandwidth * g.nodes[b]};
        if (!contains(cone, z)) continue;
        const double w = g.weights[a] * g.weights[b] *
                         std::exp(-0.5 * (g.nodes[a] * g.nodes[a] + g.nodes[b] * g.nodes[b])) /
                         (2.0 * std::numbers::pi);
        acc += w * heat_kernel_wedge(basis, 1.0, x, z).value;
      }
    }
    return acc;
  };

  const double nd = static_cast<double>(n);
  std::vector<double> means(np), ses(np), series(np);
  double asym = 0.0;
  for (std::size_t q = 0; q < np; ++q) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      s1 += sum[blk * np + q];
      s2 += sum_sq[blk * np + q];
    }
    means[q] = s1 / nd;
    ses[q] = std::sqrt(std::max(0.0, s2 / nd - means[q] * means[q]) / nd);
    const KernelValue kv = heat_kernel_wedge(basis, 1.0, x, probes[q]);
    series[q] = kv.value;
    asym = std::max(asym, std::abs(kv.value - heat_kernel_wedge(basis, 1.0, probes[q], x).value));
    r.cells.push_back(z_cell("y=(" + list(probes[q]) + ")", means[q], ses[q], series[q], th.z_max, false));
    ReportCell bias;
    bias.label = "smoothing bias y=(" + list(probes[q]) + ")";
    bias.estimate = smoothed(probes[q]) - series[q];
    bias.std_error = ses[q];
    bias.target = 0.0;
    bias.statistic = bias.estimate / ses[q];
    bias.pass = std::abs(bias.estimate) <= ses[q];
    r.cells.push_back(bias);
  }
  ReportCell sym;
  sym.label = "symmetry max |p(1,x,y) - p(1,y,x)|";
  sym.estimate = asym;
  sym.std_error = 0.0;
  sym.target = 1e-12;
  sym.pass = asym <= 1e-12;
  r.cells.push_back(sym);
  for (std::size_t q = 0; q < np; ++q) {
    r.cells.push_back(z_cell("control: 1.2 * series, y=(" + list(probes[q]) + ")", means[q], ses[q],
                             1.2 * series[q], th.z_max, true));
  }
  finish(r, clock);
  return r;
}

}  // namespace cmeander
