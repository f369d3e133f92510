#include "conemeander/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "conemeander/errors.hpp"
#include "conemeander/specfun.hpp"

namespace cmeander {

namespace {

constexpr double kPi = std::numbers::pi;

const Wedge& require_wedge(const SpectralBasis& basis, const char* who) {
  const auto* w = std::get_if<Wedge>(&basis.cone().variant());
  if (w == nullptr) {
    throw ConfigError(std::string(who) + ": needs a wedge basis, got " + basis.cone().to_string());
  }
  return *w;
}

void require_inside(const ConeSpec& cone, std::span<const double> p, const char* what) {
  if (!contains(cone, p)) {
    throw DomainError(std::string(what) + " is not inside " + cone.to_string());
  }
}

// Cap coordinate clamped into [0, extent]; interior points only miss it by rounding.
double cap_coordinate(const ConeSpec& cone, std::span<const double> p, double* radius) {
  const PolarCoordinates pc = polar(cone, p);
  *radius = pc.r;
  return std::clamp(pc.angular, 0.0, cone.cap_extent());
}

bool is_flat_half_space(const ConeSpec& cone) {
  if (std::holds_alternative<HalfSpace>(cone.variant())) return true;
  const auto* c = std::get_if<Circular3D>(&cone.variant());
  return c != nullptr && c->theta0 == kPi / 2;
}

// Integral over the wedge of the heat kernel p(s, y, .).
double wedge_survival_series(const SpectralBasis& basis, std::span<const double> y, double s) {
  const double beta = require_wedge(basis, "series survival").beta;
  double rho = 0.0;
  const double theta = cap_coordinate(basis.cone(), y, &rho);
  const double width = std::sqrt(s);
  const double lo = std::max(0.0, rho - 12.0 * width);
  const double hi = rho + 12.0 * width;
  const int panels = std::max(4, static_cast<int>(std::ceil((hi - lo) / (0.5 * width))));
  const QuadratureRule rule = composite_gauss_legendre(panels, 16, lo, hi);

  double total = 0.0;
  const auto& modes = basis.modes();
  for (std::size_t j = 1; j <= modes.size(); j += 2) {
    // Even modes integrate to zero over (0, beta).
    const double cap_integral = std::sqrt(2.0 / beta) * 2.0 * beta / (j * kPi);
    const double mj = basis.eigenfunction(j, theta);
    double radial = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double r = rule.nodes[k];
      const double m = rho * r / s;
      const double log_term = log_bessel_i(modes[j - 1].alpha, m) - (r * r + rho * rho) / (2.0 * s);
      radial += rule.weights[k] * std::exp(log_term) * r / s;
    }
    const double contribution = mj * cap_integral * radial;
    total += contribution;
    if (std::abs(radial) < 1e-18 && j > 1) break;
  }
  return total;
}

}  // namespace

EntranceLaw make_entrance_law(SpectralBasis basis) {
  const int d = basis.dimension();
  const double alpha1 = basis.alpha1();
  const double log_inv_c = (0.5 * alpha1 + (d - 2) / 4.0) * std::log(2.0) +
                           log_gamma(0.5 * alpha1 + (d + 2) / 4.0) + std::log(basis.m1_integral());
  const double c = std::exp(-log_inv_c);
  if (!(c > 0.0) || !std::isfinite(c)) throw NumericError("normalization constant is not finite");
  return EntranceLaw{std::move(basis), c, alpha1, d};
}

KernelValue heat_kernel_wedge(const SpectralBasis& basis, double t, std::span<const double> x,
                              std::span<const double> y) {
  const double beta = require_wedge(basis, "heat_kernel_wedge").beta;
  if (!(t > 0.0)) throw DomainError("heat_kernel_wedge: t must be positive");
  require_inside(basis.cone(), x, "heat_kernel_wedge: x");
  require_inside(basis.cone(), y, "heat_kernel_wedge: y");
  double rho = 0.0;
  double r = 0.0;
  const double theta = cap_coordinate(basis.cone(), x, &rho);
  const double eta = cap_coordinate(basis.cone(), y, &r);
  const double m = rho * r / t;
  const double gauss = -(r * r + rho * rho) / (2.0 * t);

  double sum = 0.0;
  const auto& modes = basis.modes();
  for (std::size_t j = 1; j <= modes.size(); ++j) {
    const double weight = std::exp(log_bessel_i(modes[j - 1].alpha, m) + gauss);
    sum += weight * basis.eigenfunction(j, theta) * basis.eigenfunction(j, eta);
  }

  // I_nu(m) <= (m/2)^nu e^(m^2/(4(nu+1))) / Gamma(nu+1) and |m_j| <= sqrt(2/beta).
  double tail = 0.0;
  for (std::size_t j = modes.size() + 1; j < modes.size() + 400; ++j) {
    const double nu = j * kPi / beta;
    const double log_bound = nu * std::log(0.5 * m) - log_gamma(nu + 1.0) + 0.25 * m * m / (nu + 1.0) + gauss +
                             std::log(2.0 / beta);
    const double term = std::exp(log_bound);
    tail += term;
    if (term <= 1e-3 * tail || term < 1e-300) break;
  }
  tail /= t;
  return {std::max(0.0, sum / t), tail, tail <= 1e-8};
}

LeadingFactors leading_factors(const EntranceLaw& law, std::span<const double> x, double t,
                               std::span<const double> y) {
  const ConeSpec& cone = law.basis.cone();
  require_inside(cone, x, "leading_factors: x");
  require_inside(cone, y, "leading_factors: y");
  if (!(t > 0.0)) throw DomainError("leading_factors: t must be positive");
  double rho = 0.0;
  double r = 0.0;
  const double theta = cap_coordinate(cone, x, &rho);
  const double eta = cap_coordinate(cone, y, &r);
  const double power = law.alpha1 - (0.5 * law.d - 1.0);
  const double g = std::pow(rho, power) * law.basis.eigenfunction(1, theta);
  const double log_h = power * std::log(r) - r * r / (2.0 * t) - law.alpha1 * std::log(2.0) -
                       log_gamma(law.alpha1 + 1.0) - (law.alpha1 + 1.0) * std::log(t);
  return {g, std::exp(log_h) * law.basis.eigenfunction(1, eta)};
}

double h_mass(const EntranceLaw& law, double t) {
  if (!(t > 0.0)) throw DomainError("h_mass: t must be positive");
  const double a = 0.5 * law.alpha1 + (law.d + 2) / 4.0;
  // integral of r^(2a-1) e^(-r^2/2t) dr = (2t)^a Gamma(a) / 2
  const double log_radial = a * std::log(2.0 * t) + log_gamma(a) - std::log(2.0);
  const double log_den = law.alpha1 * std::log(2.0) + log_gamma(law.alpha1 + 1.0) +
                         (law.alpha1 + 1.0) * std::log(t);
  return std::exp(log_radial - log_den) * law.basis.m1_integral();
}

Estimate survival_probability(const SpectralBasis& basis, std::span<const double> y, double s,
                              const SurvivalOptions& opts) {
  const ConeSpec& cone = basis.cone();
  require_inside(cone, y, "survival_probability: y");
  if (!(s >= 0.0)) throw DomainError("survival_probability: s must be >= 0");
  if (s == 0.0) return {1.0, 0.0};

  SurvivalMode mode = opts.mode;
  if (mode == SurvivalMode::Automatic) {
    if (std::holds_alternative<Wedge>(cone.variant())) {
      mode = SurvivalMode::Series;
    } else if (is_flat_half_space(cone)) {
      mode = SurvivalMode::ClosedForm;
    } else {
      mode = SurvivalMode::MonteCarlo;
    }
  }
  switch (mode) {
    case SurvivalMode::Series:
      return {std::clamp(wedge_survival_series(basis, y, s), 0.0, 1.0), 0.0};
    case SurvivalMode::ClosedForm:
      if (!is_flat_half_space(cone)) {
        throw ConfigError("closed-form survival needs a half-space, got " + cone.to_string());
      }
      return {2.0 * normal_cdf(y[0] / std::sqrt(s)) - 1.0, 0.0};
    case SurvivalMode::MonteCarlo:
      return monte_carlo_survival(cone, y, s, opts.n, opts.dt, opts.seed, opts.workers);
    case SurvivalMode::Automatic:
      break;
  }
  throw ConfigError("unsupported survival mode");
}

Estimate entrance_density(const EntranceLaw& law, double t, std::span<const double> y,
                          const SurvivalOptions& opts) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("entrance_density: t must lie in (0, 1]");
  const ConeSpec& cone = law.basis.cone();
  require_inside(cone, y, "entrance_density: y");
  double r = 0.0;
  const double eta = cap_coordinate(cone, y, &r);
  const double power = law.alpha1 - (0.5 * law.d - 1.0);
  const double log_core = std::log(law.c) - (law.alpha1 + 1.0) * std::log(t) + power * std::log(r) -
                          r * r / (2.0 * t);
  const double core = std::exp(log_core) * law.basis.eigenfunction(1, eta);
  if (t == 1.0) return {std::max(0.0, core), 0.0};
  const Estimate w = survival_probability(law.basis, y, 1.0 - t, opts);
  return {std::max(0.0, core * w.value), std::abs(core) * w.std_error};
}

double entrance_mass(const EntranceLaw& law, int angular_nodes, double r_max, int radial_panels,
                     int radial_order) {
  const ConeSpec& cone = law.basis.cone();
  const double power = law.alpha1 - (0.5 * law.d - 1.0);
  const QuadratureRule radial = composite_gauss_legendre(radial_panels, radial_order, 0.0, r_max);
  double radial_integral = 0.0;
  for (std::size_t k = 0; k < radial.nodes.size(); ++k) {
    const double r = radial.nodes[k];
    radial_integral +=
        radial.weights[k] * std::pow(r, power + law.d - 1) * std::exp(-0.5 * r * r);
  }
  double angular_integral = 0.0;
  if (law.d == 1) {
    angular_integral = law.basis.eigenfunction(1, 0.0);
  } else {
    const QuadratureRule ang = gauss_legendre(angular_nodes, 0.0, cone.cap_extent());
    for (std::size_t k = 0; k < ang.nodes.size(); ++k) {
      angular_integral += ang.weights[k] * law.basis.eigenfunction(1, ang.nodes[k]) *
                          cap_measure_density(cone, ang.nodes[k]);
    }
  }
  return law.c * radial_integral * angular_integral;
}

double meander_exit_survival(const EntranceLaw& law, double t) {
  if (!(t >= 1.0) || !std::isfinite(t)) throw DomainError("meander_exit_survival: t must be >= 1");
  return std::pow(t, -0.5 * law.alpha1 + (law.d - 2) / 4.0);
}

RadialMarginal::RadialMarginal(double alpha1, int d) : power_(alpha1 + 0.5 * d) {
  if (!(alpha1 > 0.0) || d < 1) throw DomainError("RadialMarginal: need alpha1 > 0 and d >= 1");
  const double a = 0.5 * (power_ + 1.0);
  log_norm_ = (a - 1.0) * std::log(2.0) + log_gamma(a);
}

double RadialMarginal::density(double r) const {
  if (r <= 0.0) return 0.0;
  return std::exp(power_ * std::log(r) - 0.5 * r * r - log_norm_);
}

double RadialMarginal::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  const double upper = std::min(r, 40.0);
  const int panels = std::max(2, static_cast<int>(std::ceil(upper / 0.5)));
  const QuadratureRule rule = composite_gauss_legendre(panels, 12, 0.0, upper);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * density(rule.nodes[k]);
  return std::clamp(s, 0.0, 1.0);
}

AngularMarginal::AngularMarginal(const SpectralBasis& basis) : basis_(basis), total_(1.0) {
  total_ = 0.0;
  total_ = cdf(basis_.cone().cap_extent());
}

double AngularMarginal::cdf(double angular) const {
  const double extent = basis_.cone().cap_extent();
  const double upper = std::clamp(angular, 0.0, extent);
  if (upper == 0.0) return 0.0;
  const QuadratureRule rule = gauss_legendre(48, 0.0, upper);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    s += rule.weights[k] * basis_.eigenfunction(1, rule.nodes[k]) *
         cap_measure_density(basis_.cone(), rule.nodes[k]);
  }
  return total_ == 0.0 ? s : std::clamp(s / total_, 0.0, 1.0);
}

}  // namespace cmeander
