#pragma once

#include <vector>

#include "conemeander/cones.hpp"

namespace cmeander {

/// One Dirichlet eigenpair of the Laplace-Beltrami operator on the cap.
struct SpectralMode {
  double lambda;  // eigenvalue
  double alpha;   // sqrt(lambda + (d/2 - 1)^2)
};

/// Dirichlet spectral data of the cap O = C intersected with the unit sphere.
///
/// Wedges carry a closed-form basis of any length. Circular cones and
/// half-spaces carry only the principal (axisymmetric) mode, which is all the
/// entrance density and the exit law need.
class SpectralBasis {
 public:
  const ConeSpec& cone() const { return cone_; }
  int dimension() const { return cone_.dimension(); }
  const std::vector<SpectralMode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  double lambda1() const { return modes_.front().lambda; }
  double alpha1() const { return modes_.front().alpha; }
  // Integral of m_1 over the cap against surface measure.
  double m1_integral() const { return m1_integral_; }
  // Legendre degree of the principal mode (circular cones), 1 for half-spaces.
  double degree() const { return degree_; }
  // Constant N with m_1 = N * (angular profile), fixed by unit L2 norm.
  double normalization() const { return norm_; }

  /// m_j at a cap coordinate; j is 1-based. Throws DomainError outside the cap.
  double eigenfunction(std::size_t j, double angular) const;

  friend SpectralBasis wedge_spectrum(double beta, int count);
  friend SpectralBasis circular_spectrum(double theta0, double tol);
  friend SpectralBasis half_space_spectrum(int d);

 private:
  explicit SpectralBasis(ConeSpec cone) : cone_(cone) {}

  ConeSpec cone_;
  std::vector<SpectralMode> modes_;
  double m1_integral_ = 0.0;
  double degree_ = 0.0;
  double norm_ = 1.0;
};

/// Closed-form basis of the arc (0, beta): lambda_j = (j pi / beta)^2,
/// m_j = sqrt(2/beta) sin(j pi phi / beta).
SpectralBasis wedge_spectrum(double beta, int count);

struct PrincipalDegree {
  double nu;
  double lambda1;
  double alpha1;
};

/// Smallest nu > 0 with P_nu(cos theta0) = 0, by a 0.5-step scan of [0.5, 200]
/// and bisection down to |d nu| <= tol.
PrincipalDegree circular_cone_principal(double theta0, double tol = 1e-10);

/// Principal mode N P_nu(cos theta) of the circular cap.
SpectralBasis circular_spectrum(double theta0, double tol = 1e-10);

/// Principal mode N cos(theta) of the hemisphere in R^d (lambda_1 = d - 1).
SpectralBasis half_space_spectrum(int d);

/// Dispatch on the cone family. `count` only matters for wedges.
SpectralBasis spectral_basis(const ConeSpec& cone, int count = 50);

/// m_1 at a cap coordinate.
double principal_eigenfunction(const SpectralBasis& basis, double angular);

/// Integral of m_1 over the cap by Gauss-Legendre quadrature, doubling the
/// node count until two successive estimates agree to 1e-10.
double m1_surface_integral(const SpectralBasis& basis);

/// Exponent of the exit law, -alpha_1/2 + (d-2)/4.
double exit_exponent(const SpectralBasis& basis);

/// Density of surface measure on the cap with respect to d(cap coordinate):
/// 1 for wedges, |S^{d-2}| sin^{d-2}(theta) for colatitude coordinates.
double cap_measure_density(const ConeSpec& cone, double angular);

/// Surface measure of the unit sphere S^{k-1} in R^k (k >= 1; S^0 has 2 points).
double sphere_area(int k);

}  // namespace cmeander
