#include "conemeander/rng.hpp"

#include <array>

#include <boost/random/seed_seq.hpp>

namespace cmeander {

Engine make_engine(const RngStreamSpec& spec) {
  const std::array<std::uint32_t, 5> words = {
      static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
      static_cast<std::uint32_t>(spec.stream_id),
      static_cast<std::uint32_t>(spec.stream_id >> 32), 0x6d65616eu};
  boost::random::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace cmeander
