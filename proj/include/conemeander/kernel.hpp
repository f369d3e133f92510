#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "conemeander/sampler.hpp"
#include "conemeander/spectrum.hpp"

namespace cmeander {

/// Normalized entrance law of the cone meander.
///
/// e(t, y) = c t^(-alpha1-1) r^(alpha1-(d/2-1)) exp(-r^2/2t) m1(eta) W_y(tau > 1-t)
/// with 1/c = 2^(alpha1/2+(d-2)/4) Gamma(alpha1/2+(d+2)/4) * integral of m1.
struct EntranceLaw {
  SpectralBasis basis;
  double c;
  double alpha1;
  int d;
};

EntranceLaw make_entrance_law(SpectralBasis basis);

struct KernelValue {
  double value;
  double tail_bound;  // bound on the omitted modes j > J
  bool converged;     // tail_bound <= 1e-8
};

/// Dirichlet heat kernel of a wedge from its eigenfunction series, truncated
/// at the basis length J.
KernelValue heat_kernel_wedge(const SpectralBasis& basis, double t, std::span<const double> x,
                              std::span<const double> y);

struct LeadingFactors {
  double g;  // rho^(alpha1-(d/2-1)) m1(theta)
  double h;  // r^(alpha1-(d/2-1)) e^(-r^2/2t) m1(eta) / (2^alpha1 Gamma(alpha1+1) t^(alpha1+1))
};

LeadingFactors leading_factors(const EntranceLaw& law, std::span<const double> x, double t,
                               std::span<const double> y);

/// Closed form of the integral of h(t, .) over the cone.
double h_mass(const EntranceLaw& law, double t = 1.0);

enum class SurvivalMode { Automatic, Series, ClosedForm, MonteCarlo };

struct SurvivalOptions {
  SurvivalMode mode = SurvivalMode::Automatic;
  std::int64_t n = 100'000;  // Monte Carlo paths
  double dt = 1e-4;          // Monte Carlo step
  std::uint64_t seed = 0;
  int workers = 1;
};

/// W_y(tau_C > s).
///
/// Series (wedges): integral over the cone of the heat-kernel series, radial
/// part by composite Gauss-Legendre, angular part exact. ClosedForm
/// (half-spaces, and the pi/2 circular cone which is one): 2 Phi(a/sqrt s) - 1.
/// MonteCarlo: killed Brownian paths. Automatic picks the cheapest exact mode.
Estimate survival_probability(const SpectralBasis& basis, std::span<const double> y, double s,
                              const SurvivalOptions& opts = {});

/// e(t, y) for t in (0, 1]. The survival factor is exactly 1 at t = 1;
/// std_error is nonzero only when the survival factor is a Monte Carlo value.
Estimate entrance_density(const EntranceLaw& law, double t, std::span<const double> y,
                          const SurvivalOptions& opts = {});

/// Integral of e(1, .) over the cone by product quadrature in polar
/// coordinates: composite Gauss-Legendre radially on [0, r_max], Gauss-Legendre
/// over the cap coordinate.
double entrance_mass(const EntranceLaw& law, int angular_nodes = 64, double r_max = 12.0,
                     int radial_panels = 48, int radial_order = 16);

/// W~_{0,1}(tau_C > t) = t^(-alpha1/2+(d-2)/4), t >= 1.
double meander_exit_survival(const EntranceLaw& law, double t);

/// Radial law of |X_1| under e(1, .): density proportional to
/// r^(alpha1 + d/2) e^(-r^2/2). `alpha1` may differ from the cone's (used for
/// perturbed targets).
class RadialMarginal {
 public:
  RadialMarginal(double alpha1, int d);
  double density(double r) const;
  double cdf(double r) const;

 private:
  double power_;
  double log_norm_;
};

/// Law of the cap coordinate of X_1 under e(1, .): density proportional to
/// m1(a) times the cap measure density.
class AngularMarginal {
 public:
  explicit AngularMarginal(const SpectralBasis& basis);
  double cdf(double angular) const;

 private:
  SpectralBasis basis_;
  double total_;
};

}  // namespace cmeander
