#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace trusttoken {

// All randomness in the simulator flows through std::mt19937_64 seeded via
// std::seed_seq. Both are fully specified by the standard, so a given list of
// seed words produces the same stream on every conforming implementation.
// Distributions come from Boost.Random for the same reason.

using Engine = std::mt19937_64;

/// Domain tags keep independent streams apart when they share numeric seeds.
enum class StreamTag : std::uint64_t {
  kProcessVariation = 0x7076,
  kPairing = 0x7061,
  kNoise = 0x6e6f,
  kProvisioning = 0x7072,
  kChipPopulation = 0x6370,
  kStub = 0x7374,
};

inline Engine make_engine(StreamTag tag, std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> parts;
  parts.reserve(2 * (words.size() + 1));
  auto push = [&parts](std::uint64_t w) {
    parts.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    parts.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push(static_cast<std::uint64_t>(tag));
  for (auto w : words) push(w);
  std::seed_seq seq(parts.begin(), parts.end());
  return Engine(seq);
}

}  // namespace trusttoken
