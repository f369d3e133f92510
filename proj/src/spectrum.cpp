#include "conemeander/spectrum.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <variant>

#include "conemeander/errors.hpp"
#include "conemeander/specfun.hpp"

namespace cmeander {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre on [a, b] with doubling until successive values agree.
double doubling_quadrature(const std::function<double(double)>& f, double a, double b,
                           double tol) {
  auto integrate = [&](int n) {
    const QuadratureRule rule = gauss_legendre(n, a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
  };
  double previous = integrate(8);
  for (int n = 16; n <= 4096; n *= 2) {
    const double current = integrate(n);
    if (std::abs(current - previous) <= tol) return current;
    previous = current;
  }
  throw NumericError("quadrature did not settle to " + std::to_string(tol));
}

}  // namespace

double cap_measure_density(const ConeSpec& cone, double angular) {
  if (std::holds_alternative<Wedge>(cone.variant())) return 1.0;
  const int d = cone.dimension();
  if (d == 1) return 1.0;
  return sphere_area(d - 1) * std::pow(std::sin(angular), d - 2);
}

double sphere_area(int k) {
  if (k < 1) throw DomainError("sphere_area: dimension must be >= 1");
  // 2 pi^{k/2} / Gamma(k/2)
  return 2.0 * std::exp(0.5 * k * std::log(kPi) - log_gamma(0.5 * k));
}

double SpectralBasis::eigenfunction(std::size_t j, double angular) const {
  if (j < 1 || j > modes_.size()) {
    throw DomainError("eigenfunction: mode index " + std::to_string(j) + " not in basis");
  }
  const double extent = cone_.cap_extent();
  if (!(angular >= 0.0 && angular <= extent)) {
    std::ostringstream os;
    os << "eigenfunction: cap coordinate " << angular << " outside [0, " << extent << "]";
    throw DomainError(os.str());
  }
  return std::visit(
      [&](const auto& family) -> double {
        using T = std::decay_t<decltype(family)>;
        if constexpr (std::is_same_v<T, Wedge>) {
          return std::sqrt(2.0 / family.beta) * std::sin(j * kPi * angular / family.beta);
        } else if constexpr (std::is_same_v<T, Circular3D>) {
          return norm_ * legendre_p(degree_, std::cos(angular));
        } else {
          if (family.d == 1) return 1.0;
          return norm_ * std::cos(angular);
        }
      },
      cone_.variant());
}

SpectralBasis wedge_spectrum(double beta, int count) {
  const ConeSpec cone = ConeSpec::wedge(beta);
  if (count < 1) throw DomainError("wedge_spectrum: need at least one mode");
  SpectralBasis basis(cone);
  basis.modes_.reserve(count);
  for (int j = 1; j <= count; ++j) {
    const double alpha = j * kPi / beta;
    basis.modes_.push_back({alpha * alpha, alpha});
  }
  basis.m1_integral_ = std::sqrt(2.0 / beta) * 2.0 * beta / kPi;
  basis.degree_ = kPi / beta;
  basis.norm_ = std::sqrt(2.0 / beta);
  return basis;
}

PrincipalDegree circular_cone_principal(double theta0, double tol) {
  ConeSpec::circular(theta0);  // validates theta0
  if (!(tol > 0.0)) throw DomainError("circular_cone_principal: tol must be positive");
  const double x = std::cos(theta0);
  auto f = [x](double nu) { return legendre_p(nu, x); };

  double lo = 0.5;
  double f_lo = f(lo);
  double hi = lo;
  double f_hi = f_lo;
  bool bracketed = false;
  for (double nu = 1.0; nu <= 200.0; nu += 0.5) {
    hi = nu;
    f_hi = f(nu);
    if (f_hi == 0.0 || (f_lo > 0.0) != (f_hi > 0.0)) {
      bracketed = true;
      break;
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "circular_cone_principal: no sign change of P_nu(" << x
       << ") for nu in [0.5, 200]; theta0=" << theta0 << " is too narrow";
    throw NumericError(os.str());
  }
  double nu = hi;
  if (f_hi != 0.0) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm > 0.0) == (f_lo > 0.0)) {
        lo = mid;
        f_lo = fm;
      } else {
        hi = mid;
      }
    }
    nu = 0.5 * (lo + hi);
  }
  const double lambda1 = nu * (nu + 1.0);
  return {nu, lambda1, std::sqrt(lambda1 + 0.25)};
}

SpectralBasis circular_spectrum(double theta0, double tol) {
  const PrincipalDegree p = circular_cone_principal(theta0, tol);
  SpectralBasis basis(ConeSpec::circular(theta0));
  basis.modes_.push_back({p.lambda1, p.alpha1});
  basis.degree_ = p.nu;
  const double sq = doubling_quadrature(
      [&](double th) {
        const double v = legendre_p(p.nu, std::cos(th));
        return 2.0 * kPi * v * v * std::sin(th);
      },
      0.0, theta0, 1e-13);
  basis.norm_ = 1.0 / std::sqrt(sq);
  basis.m1_integral_ = m1_surface_integral(basis);
  return basis;
}

SpectralBasis half_space_spectrum(int d) {
  const ConeSpec cone = ConeSpec::half_space(d);
  SpectralBasis basis(cone);
  const double lambda1 = d - 1.0;
  const double shift = 0.5 * d - 1.0;
  basis.modes_.push_back({lambda1, std::sqrt(lambda1 + shift * shift)});
  basis.degree_ = 1.0;
  if (d == 1) {
    basis.norm_ = 1.0;
    basis.m1_integral_ = 1.0;
    return basis;
  }
  const double sq = doubling_quadrature(
      [&](double th) {
        const double c = std::cos(th);
        return c * c * cap_measure_density(cone, th);
      },
      0.0, kPi / 2, 1e-13);
  basis.norm_ = 1.0 / std::sqrt(sq);
  basis.m1_integral_ = m1_surface_integral(basis);
  return basis;
}

SpectralBasis spectral_basis(const ConeSpec& cone, int count) {
  return std::visit(
      [&](const auto& family) -> SpectralBasis {
        using T = std::decay_t<decltype(family)>;
        if constexpr (std::is_same_v<T, Wedge>) {
          return wedge_spectrum(family.beta, count);
        } else if constexpr (std::is_same_v<T, Circular3D>) {
          return circular_spectrum(family.theta0);
        } else {
          return half_space_spectrum(family.d);
        }
      },
      cone.variant());
}

double principal_eigenfunction(const SpectralBasis& basis, double angular) {
  return basis.eigenfunction(1, angular);
}

double m1_surface_integral(const SpectralBasis& basis) {
  const ConeSpec& cone = basis.cone();
  if (cone.dimension() == 1) return basis.eigenfunction(1, 0.0);
  return doubling_quadrature(
      [&](double a) { return basis.eigenfunction(1, a) * cap_measure_density(cone, a); }, 0.0,
      cone.cap_extent(), 1e-10);
}

double exit_exponent(const SpectralBasis& basis) {
  const int d = basis.dimension();
  return -0.5 * basis.alpha1() + (d - 2) / 4.0;
}

}  // namespace cmeander
