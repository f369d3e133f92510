#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "conemeander/rng.hpp"

namespace cmeander {

/// Planar wedge occupying polar angles (0, beta), beta in (0, pi].
struct Wedge {
  double beta;
  friend bool operator==(const Wedge&, const Wedge&) = default;
};
/// Circular cone in R^3 around the e1 axis with half-angle theta0 in (0, pi/2].
struct Circular3D {
  double theta0;
  friend bool operator==(const Circular3D&, const Circular3D&) = default;
};
/// Half-space {x1 > 0} in R^d, d >= 1.
struct HalfSpace {
  int d;
  friend bool operator==(const HalfSpace&, const HalfSpace&) = default;
};

/// A supported convex cone with vertex at the origin.
class ConeSpec {
 public:
  using Variant = std::variant<Wedge, Circular3D, HalfSpace>;

  // Throws DomainError if the parameters violate the family's invariants.
  explicit ConeSpec(Variant v);

  static ConeSpec wedge(double beta) { return ConeSpec(Wedge{beta}); }
  static ConeSpec circular(double theta0) { return ConeSpec(Circular3D{theta0}); }
  static ConeSpec half_space(int d) { return ConeSpec(HalfSpace{d}); }

  // Parses `wedge:<beta>`, `circular:<theta0>` or `halfspace:<d>`.
  static ConeSpec parse(const std::string& text);

  const Variant& variant() const { return v_; }
  int dimension() const;
  // Upper end of the cap coordinate range [0, extent].
  double cap_extent() const;
  std::string to_string() const;

  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;

 private:
  Variant v_;
};

/// Hyperplane through the origin, {p : normal . p > 0} on the inside.
struct LinearFacet {
  std::vector<double> normal;

  double signed_distance(std::span<const double> p) const;
};

/// The flat pieces of the boundary, when the whole boundary is flat.
/// Empty for curved cones (Circular3D with theta0 < pi/2).
std::vector<LinearFacet> linear_facets(const ConeSpec& cone);

/// Discretized path on the grid times[k] = k * dt.
struct PathSample {
  double dt = 0.0;
  int dim = 0;
  std::vector<double> times;
  std::vector<double> points;  // row-major, times.size() * dim
  RngStreamSpec seed{};
  std::int64_t redraws = 0;    // resamples or rejected attempts spent on this path

  std::size_t size() const { return times.size(); }
  std::span<const double> point(std::size_t k) const {
    return {points.data() + k * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> point(std::size_t k) {
    return {points.data() + k * dim, static_cast<std::size_t>(dim)};
  }
  void validate() const;
};

/// Membership in the open cone. Boundary points are outside.
bool contains(const ConeSpec& cone, std::span<const double> p);
/// Same predicate without dimension or finiteness checks (hot loops).
bool contains_unchecked(const ConeSpec& cone, std::span<const double> p);

struct PolarCoordinates {
  double r;
  double angular;  // polar angle (wedge) or colatitude from e1 (others)
};

PolarCoordinates polar(const ConeSpec& cone, std::span<const double> p);

/// Smallest k >= 1 with points[k] outside the cone.
std::optional<std::size_t> first_exit_index(const PathSample& path, const ConeSpec& cone);

/// Brownian scaling K_t: times are multiplied by t, points by sqrt(t).
PathSample scale_path(const PathSample& path, double t);

/// CSV with header `t,x1,...,xd`, 17 significant digits.
void write_path_csv(std::ostream& out, const PathSample& path);
PathSample read_path_csv(std::istream& in);

}  // namespace cmeander
