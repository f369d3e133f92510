#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace cmeander {

/// Identifies one logical random stream. `stream_id` is a logical index (a
/// path or a block of paths), never a thread id, so results do not depend on
/// how streams are distributed over workers.
struct RngStreamSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const RngStreamSpec&, const RngStreamSpec&) = default;
};

using Engine = boost::random::mt19937_64;

/// Engine for a stream. Seeding goes through a seed sequence that mixes both
/// words of the seed and of the stream id.
Engine make_engine(const RngStreamSpec& spec);

/// Gaussian and uniform draws on top of an Engine.
class RandomSource {
 public:
  explicit RandomSource(const RngStreamSpec& spec) : engine_(make_engine(spec)) {}

  double normal() { return normal_(engine_); }
  // Uniform on (0, 1).
  double uniform() {
    double u = uniform_(engine_);
    while (u == 0.0) u = uniform_(engine_);
    return u;
  }

 private:
  Engine engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace cmeander
