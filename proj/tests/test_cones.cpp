#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "conemeander/cones.hpp"
#include "conemeander/errors.hpp"

using namespace cmeander;

namespace {

constexpr double kPi = std::numbers::pi;

PathSample line_path(std::vector<double> from, std::vector<double> to, int steps) {
  PathSample p;
  p.dim = static_cast<int>(from.size());
  p.dt = 1.0 / steps;
  for (int k = 0; k <= steps; ++k) {
    p.times.push_back(k * p.dt);
    for (std::size_t i = 0; i < from.size(); ++i) {
      p.points.push_back(from[i] + (to[i] - from[i]) * k / steps);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("ConeSpec validation and parsing") {
  CHECK_THROWS_AS(ConeSpec::wedge(0.0), DomainError);
  CHECK_THROWS_AS(ConeSpec::wedge(3.2), DomainError);
  CHECK_NOTHROW(ConeSpec::wedge(kPi));
  CHECK_THROWS_AS(ConeSpec::circular(kPi / 2 + 1e-9), DomainError);
  CHECK_THROWS_AS(ConeSpec::half_space(0), DomainError);

  CHECK(ConeSpec::parse("wedge:1.5") == ConeSpec::wedge(1.5));
  CHECK(ConeSpec::parse("circular:0.7853982").dimension() == 3);
  CHECK(ConeSpec::parse("halfspace:4").dimension() == 4);
  CHECK_THROWS_AS(ConeSpec::parse("wedge"), ConfigError);
  CHECK_THROWS_AS(ConeSpec::parse("wedge:abc"), ConfigError);
  CHECK_THROWS_AS(ConeSpec::parse("wedge:1.0x"), ConfigError);
  CHECK_THROWS_AS(ConeSpec::parse("ball:1"), ConfigError);
  CHECK_THROWS_AS(ConeSpec::parse("wedge:7"), ConfigError);

  for (const auto& c : {ConeSpec::wedge(kPi / 3), ConeSpec::circular(0.4), ConeSpec::half_space(3)}) {
    CHECK(ConeSpec::parse(c.to_string()) == c);
  }
}

TEST_CASE("contains") {
  const double p1[] = {1, 1};
  CHECK(contains(ConeSpec::wedge(kPi / 2), p1));
  const double p2[] = {-0.1, 5, 5};
  CHECK_FALSE(contains(ConeSpec::half_space(3), p2));
  const double p3[] = {1, 1, 0};
  CHECK_FALSE(contains(ConeSpec::circular(kPi / 4), p3));
  const double p4[] = {1, 0.5, 0};
  CHECK(contains(ConeSpec::circular(kPi / 4), p4));
  // Boundary is outside.
  const double edge[] = {1, 0};
  CHECK_FALSE(contains(ConeSpec::wedge(kPi / 2), edge));
  const double edge2[] = {0, 1};
  CHECK_FALSE(contains(ConeSpec::wedge(kPi / 2), edge2));
  const double origin[] = {0, 0};
  CHECK_FALSE(contains(ConeSpec::wedge(kPi), origin));
  const double neg[] = {-1, 1e-9};
  CHECK(contains(ConeSpec::wedge(kPi), neg));
  // Dimension mismatch and non-finite input.
  const double three[] = {1, 1, 1};
  CHECK_THROWS_AS(contains(ConeSpec::wedge(1.0), three), DomainError);
  const double bad[] = {NAN, 1};
  CHECK_THROWS_AS(contains(ConeSpec::wedge(1.0), bad), DomainError);
}

TEST_CASE("membership is invariant under positive scaling") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (const auto& cone : {ConeSpec::wedge(1.1), ConeSpec::wedge(kPi), ConeSpec::circular(0.6), ConeSpec::half_space(4)}) {
    const int d = cone.dimension();
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> p(d);
      for (auto& v : p) v = nd(gen);
      const bool in = contains(cone, p);
      for (double lambda : {1e-3, 0.5, 2.0, 1e3}) {
        std::vector<double> q = p;
        for (auto& v : q) v *= lambda;
        CHECK(contains(cone, q) == in);
      }
    }
  }
}

TEST_CASE("polar") {
  const double a[] = {0, 2};
  auto pa = polar(ConeSpec::wedge(kPi), a);
  CHECK(pa.r == 2.0);
  CHECK(pa.angular == doctest::Approx(kPi / 2));
  const double b[] = {3, 0};
  auto pb = polar(ConeSpec::half_space(2), b);
  CHECK(pb.r == 3.0);
  CHECK(pb.angular == 0.0);
  const double c[] = {1, 1, 0};
  auto pc = polar(ConeSpec::circular(kPi / 3), c);
  CHECK(pc.r == doctest::Approx(std::sqrt(2.0)));
  CHECK(pc.angular == doctest::Approx(kPi / 4));
  const double zero[] = {0, 0};
  CHECK_THROWS_AS(polar(ConeSpec::wedge(1.0), zero), DomainError);
}

TEST_CASE("polar then reconstruct") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const ConeSpec w = ConeSpec::wedge(2.0);
  const ConeSpec h = ConeSpec::half_space(2);
  for (int i = 0; i < 200; ++i) {
    const double r = 5 * u(gen), phi = 2.0 * u(gen);
    const double p[] = {r * std::cos(phi), r * std::sin(phi)};
    const auto pw = polar(w, p);
    CHECK(std::abs(pw.r * std::cos(pw.angular) - p[0]) < 1e-12);
    CHECK(std::abs(pw.r * std::sin(pw.angular) - p[1]) < 1e-12);
    // Half-plane x1 > 0: colatitude from e1, rebuilt in the (e1, e2) plane.
    const double q[] = {r * std::cos(phi - 1.0), r * std::sin(phi - 1.0)};
    const auto ph = polar(h, q);
    CHECK(std::abs(ph.r * std::cos(ph.angular) - q[0]) < 1e-12);
    CHECK(std::abs(ph.r * std::sin(ph.angular) - std::abs(q[1])) < 1e-12);
  }
}

TEST_CASE("first_exit_index") {
  const ConeSpec w = ConeSpec::wedge(kPi / 2);
  CHECK_FALSE(first_exit_index(line_path({1, 1}, {1, 1}, 10), w).has_value());
  PathSample jump = line_path({1, 1}, {1, 1}, 10);
  jump.points[2] = -1.0;  // second point outside
  CHECK(first_exit_index(jump, w) == std::optional<std::size_t>(1));
  // From (1, 0.9) to (1, -0.1) over 100 steps: x2 = 0.9 - k/100 hits 0 at k = 90.
  const auto k = first_exit_index(line_path({1, 0.9}, {1, -0.1}, 100), w);
  REQUIRE(k.has_value());
  CHECK(*k == 90);
  // Truncating after the exit leaves the index unchanged.
  PathSample crossing = line_path({1, 0.9}, {1, -0.1}, 100);
  crossing.times.resize(95);
  crossing.points.resize(95 * 2);
  CHECK(first_exit_index(crossing, w) == std::optional<std::size_t>(90));
}

TEST_CASE("linear facets") {
  CHECK(linear_facets(ConeSpec::wedge(kPi / 2)).size() == 2);
  CHECK(linear_facets(ConeSpec::wedge(kPi)).size() == 1);
  CHECK(linear_facets(ConeSpec::half_space(3)).size() == 1);
  CHECK(linear_facets(ConeSpec::circular(kPi / 2)).size() == 1);
  CHECK(linear_facets(ConeSpec::circular(0.5)).empty());
  // Facet distances are positive inside the cone.
  const auto f = linear_facets(ConeSpec::wedge(2.0));
  const double p[] = {std::cos(1.0), std::sin(1.0)};
  for (const auto& facet : f) CHECK(facet.signed_distance(p) == doctest::Approx(std::sin(1.0)));
}

TEST_CASE("scale_path") {
  PathSample p = line_path({0.2, 0.3}, {1.0, -0.4}, 20);
  const PathSample id = scale_path(p, 1.0);
  CHECK(id.points == p.points);
  CHECK(id.times == p.times);
  const PathSample four = scale_path(p, 4.0);
  CHECK(four.dt == doctest::Approx(4 * p.dt));
  CHECK(four.times[7] == doctest::Approx(4 * p.times[7]));
  CHECK(four.points[7] == doctest::Approx(2 * p.points[7]));
  const PathSample back = scale_path(scale_path(p, 2.0), 0.5);
  for (std::size_t i = 0; i < p.points.size(); ++i) CHECK(std::abs(back.points[i] - p.points[i]) < 1e-12);
  for (std::size_t i = 0; i < p.times.size(); ++i) CHECK(std::abs(back.times[i] - p.times[i]) < 1e-12);
  CHECK_THROWS_AS(scale_path(p, 0.0), DomainError);
  CHECK_THROWS_AS(scale_path(p, -1.0), DomainError);
}

TEST_CASE("path CSV round trip") {
  PathSample p = line_path({0.1234567890123456, 1.0 / 3}, {2.0, 1e-7}, 7);
  std::stringstream ss;
  write_path_csv(ss, p);
  const std::string text = ss.str();
  CHECK(text.rfind("t,x1,x2\n", 0) == 0);
  const PathSample q = read_path_csv(ss);
  CHECK(q.dim == 2);
  CHECK(q.points == p.points);
  CHECK(q.times == p.times);
  std::stringstream bad("t,y1\n0,1\n");
  CHECK_THROWS_AS(read_path_csv(bad), ConfigError);
}

TEST_CASE("PathSample validate") {
  PathSample p = line_path({1}, {2}, 3);
  CHECK_NOTHROW(p.validate());
  p.points.pop_back();
  CHECK_THROWS_AS(p.validate(), DomainError);
}
