#include "conemeander/cones.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "conemeander/errors.hpp"

namespace cmeander {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double norm(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return std::sqrt(s);
}

void check_point(const ConeSpec& cone, std::span<const double> p) {
  if (static_cast<int>(p.size()) != cone.dimension()) {
    throw DomainError("point has dimension " + std::to_string(p.size()) + ", cone " +
                      cone.to_string() + " needs " + std::to_string(cone.dimension()));
  }
  for (double v : p) {
    if (!std::isfinite(v)) throw DomainError("point has non-finite coordinates");
  }
}

// Colatitude from e1 of a point in R^d.
double colatitude(std::span<const double> p) {
  double perp = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) perp += p[i] * p[i];
  return std::atan2(std::sqrt(perp), p[0]);
}

}  // namespace

ConeSpec::ConeSpec(Variant v) : v_(v) {
  std::visit(Overloaded{
                 [](const Wedge& w) {
                   if (!(w.beta > 0.0 && w.beta <= std::numbers::pi)) {
                     throw DomainError("wedge angle must lie in (0, pi]");
                   }
                 },
                 [](const Circular3D& c) {
                   if (!(c.theta0 > 0.0 && c.theta0 <= std::numbers::pi / 2)) {
                     throw DomainError("circular half-angle must lie in (0, pi/2]");
                   }
                 },
                 [](const HalfSpace& h) {
                   if (h.d < 1) throw DomainError("half-space dimension must be >= 1");
                 }},
             v_);
}

ConeSpec ConeSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("cone must look like wedge:<beta>, circular:<theta0> or halfspace:<d>");
  }
  const std::string family = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  std::size_t used = 0;
  try {
    if (family == "wedge") {
      const double beta = std::stod(arg, &used);
      if (used != arg.size()) throw ConfigError("trailing characters in cone '" + text + "'");
      return wedge(beta);
    }
    if (family == "circular") {
      const double theta0 = std::stod(arg, &used);
      if (used != arg.size()) throw ConfigError("trailing characters in cone '" + text + "'");
      return circular(theta0);
    }
    if (family == "halfspace") {
      const int d = std::stoi(arg, &used);
      if (used != arg.size()) throw ConfigError("trailing characters in cone '" + text + "'");
      return half_space(d);
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) throw;
    throw ConfigError("invalid cone '" + text + "': " + e.what());
  }
  throw ConfigError("unknown cone family '" + family + "'");
}

int ConeSpec::dimension() const {
  return std::visit(Overloaded{[](const Wedge&) { return 2; },
                               [](const Circular3D&) { return 3; },
                               [](const HalfSpace& h) { return h.d; }},
                    v_);
}

double ConeSpec::cap_extent() const {
  return std::visit(Overloaded{[](const Wedge& w) { return w.beta; },
                               [](const Circular3D& c) { return c.theta0; },
                               [](const HalfSpace&) { return std::numbers::pi / 2; }},
                    v_);
}

std::string ConeSpec::to_string() const {
  std::ostringstream os;
  os << std::setprecision(17);
  std::visit(Overloaded{[&](const Wedge& w) { os << "wedge:" << w.beta; },
                        [&](const Circular3D& c) { os << "circular:" << c.theta0; },
                        [&](const HalfSpace& h) { os << "halfspace:" << h.d; }},
             v_);
  return os.str();
}

double LinearFacet::signed_distance(std::span<const double> p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < normal.size(); ++i) s += normal[i] * p[i];
  return s;
}

std::vector<LinearFacet> linear_facets(const ConeSpec& cone) {
  const int d = cone.dimension();
  auto axis_facet = [d] {
    LinearFacet f{std::vector<double>(d, 0.0)};
    f.normal[0] = 1.0;
    return f;
  };
  return std::visit(
      Overloaded{[&](const Wedge& w) {
                   std::vector<LinearFacet> out{LinearFacet{{0.0, 1.0}}};
                   // beta = pi: both edges lie on the same line.
                   if (w.beta < std::numbers::pi) {
                     out.push_back(LinearFacet{{std::sin(w.beta), -std::cos(w.beta)}});
                   }
                   return out;
                 },
                 [&](const Circular3D& c) {
                   if (c.theta0 == std::numbers::pi / 2) return std::vector<LinearFacet>{axis_facet()};
                   return std::vector<LinearFacet>{};
                 },
                 [&](const HalfSpace&) { return std::vector<LinearFacet>{axis_facet()}; }},
      cone.variant());
}

void PathSample::validate() const {
  if (!(dt > 0.0)) throw DomainError("PathSample: dt must be positive");
  if (dim < 1) throw DomainError("PathSample: dim must be >= 1");
  if (points.size() != times.size() * static_cast<std::size_t>(dim)) {
    throw DomainError("PathSample: points and times lengths disagree");
  }
}

bool contains(const ConeSpec& cone, std::span<const double> p) {
  check_point(cone, p);
  return contains_unchecked(cone, p);
}

bool contains_unchecked(const ConeSpec& cone, std::span<const double> p) {
  return std::visit(Overloaded{[&](const Wedge& w) {
                                 return p[1] > 0.0 && std::atan2(p[1], p[0]) < w.beta;
                               },
                               [&](const Circular3D& c) {
                                 return p[0] > 0.0 && colatitude(p) < c.theta0;
                               },
                               [&](const HalfSpace&) { return p[0] > 0.0; }},
                    cone.variant());
}

PolarCoordinates polar(const ConeSpec& cone, std::span<const double> p) {
  check_point(cone, p);
  const double r = norm(p);
  if (r == 0.0) throw DomainError("polar: the vertex has no angular coordinate");
  const double angular = std::visit(
      Overloaded{[&](const Wedge&) { return std::atan2(p[1], p[0]); },
                 [&](const Circular3D&) { return colatitude(p); },
                 [&](const HalfSpace&) { return colatitude(p); }},
      cone.variant());
  return {r, angular};
}

std::optional<std::size_t> first_exit_index(const PathSample& path, const ConeSpec& cone) {
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (!contains(cone, path.point(k))) return k;
  }
  return std::nullopt;
}

PathSample scale_path(const PathSample& path, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("scale_path: t must be positive");
  PathSample out = path;
  const double root = std::sqrt(t);
  out.dt = path.dt * t;
  for (auto& s : out.times) s *= t;
  for (auto& v : out.points) v *= root;
  return out;
}

void write_path_csv(std::ostream& out, const PathSample& path) {
  out << "t";
  for (int i = 1; i <= path.dim; ++i) out << ",x" << i;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << path.times[k];
    for (double v : path.point(k)) out << ',' << v;
    out << '\n';
  }
}

PathSample read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("path CSV is empty");
  PathSample path;
  std::istringstream header(line);
  std::string cell;
  std::getline(header, cell, ',');
  if (cell != "t") throw ConfigError("path CSV must start with column 't'");
  while (std::getline(header, cell, ',')) {
    if (cell != "x" + std::to_string(path.dim + 1)) {
      throw ConfigError("unexpected path CSV column '" + cell + "'");
    }
    ++path.dim;
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      const double v = std::stod(cell);
      if (col == 0) {
        path.times.push_back(v);
      } else {
        path.points.push_back(v);
      }
      ++col;
    }
    if (col != path.dim + 1) throw ConfigError("path CSV row " + std::to_string(row) + " has wrong width");
  }
  path.dt = path.times.size() > 1 ? path.times[1] - path.times[0] : 0.0;
  return path;
}

}  // namespace cmeander
