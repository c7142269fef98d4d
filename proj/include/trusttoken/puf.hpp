#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace trusttoken::puf {

inline constexpr std::size_t kResponseBits = 256;
using Bits = std::bitset<kResponseBits>;

/// Behavioral parameters of the ring-oscillator array. Frequencies are in
/// hertz but only their ordering affects responses.
struct PufParams {
  std::size_t oscillator_count = 512;
  std::size_t response_bits = kResponseBits;
  double nominal_frequency = 100.0e6;
  double process_variation_sigma = 1.0e6;
  double noise_sigma = 0.0;

  /// Throws ParameterError when an invariant is violated.
  void validate() const;

  PufParams with_noise(double sigma) const {
    PufParams p = *this;
    p.noise_sigma = sigma;
    return p;
  }
};

/// One virtual die. Immutable once built.
class ChipFingerprint {
 public:
  std::uint64_t seed() const { return seed_; }
  std::span<const double> base_frequencies() const { return frequencies_; }

  bool operator==(const ChipFingerprint&) const = default;

 private:
  friend ChipFingerprint new_chip(std::uint64_t chip_seed, const PufParams& params);
  ChipFingerprint(std::uint64_t seed, std::vector<double> frequencies)
      : seed_(seed), frequencies_(std::move(frequencies)) {}

  std::uint64_t seed_;
  std::vector<double> frequencies_;
};

struct Challenge {
  std::uint16_t value = 0;

  std::array<std::uint8_t, 2> bytes() const {
    return {static_cast<std::uint8_t>(value >> 8), static_cast<std::uint8_t>(value & 0xff)};
  }
  bool operator==(const Challenge&) const = default;
};

struct Response {
  Bits bits;

  bool operator==(const Response&) const = default;
};

using OscillatorPair = std::pair<std::size_t, std::size_t>;

ChipFingerprint new_chip(std::uint64_t chip_seed, const PufParams& params);

/// Disjoint oscillator pairs selected by a challenge: a seeded permutation of
/// all oscillator indices consumed two at a time. Independent of the chip.
std::vector<OscillatorPair> challenge_pairs(Challenge challenge, const PufParams& params);

/// Bit j is 1 iff oscillator a_j runs strictly faster than b_j in this
/// measurement. With noise_sigma == 0 the measurement seed has no effect.
Response measure_response(const ChipFingerprint& chip, Challenge challenge,
                          std::uint64_t measurement_seed, const PufParams& params);

/// Noiseless reference measurement.
Response reference_response(const ChipFingerprint& chip, Challenge challenge,
                            const PufParams& params);

std::size_t hamming_distance(const Response& a, const Response& b);

/// Mean pairwise inter-chip fractional Hamming distance, in percent.
double uniqueness(std::span<const ChipFingerprint> chips, Challenge challenge,
                  const PufParams& params);

/// Fraction of 1-bits, in percent.
double randomness(const Response& response);

/// 100 minus the mean fractional distance between noisy remeasurements and the
/// noiseless reference, in percent. Remeasurement i uses measurement seed i.
double reliability(const ChipFingerprint& chip, Challenge challenge, std::size_t n_measurements,
                   const PufParams& params);

// Population campaigns ------------------------------------------------------

std::vector<ChipFingerprint> make_population(std::size_t chips, std::uint64_t master_seed,
                                             const PufParams& params);

/// Distinct challenges drawn from the master seed.
std::vector<Challenge> draw_challenges(std::size_t count, std::uint64_t master_seed);

struct PairDistance {
  Challenge challenge;
  std::size_t chip_a = 0;
  std::size_t chip_b = 0;
  std::size_t distance = 0;
};

struct PopulationMetrics {
  std::size_t chips = 0;
  std::size_t challenges = 0;
  std::size_t measurements = 0;
  double uniqueness = 0.0;    // mean over challenges, percent
  double randomness = 0.0;    // mean over chips x challenges, percent
  double reliability = 0.0;   // mean over chips x challenges, percent
  std::vector<PairDistance> pairwise;
};

/// Runs the full characterization: every chip against every challenge.
/// Reliability uses `measurements` remeasurements at params.noise_sigma.
PopulationMetrics characterize(std::span<const ChipFingerprint> chips,
                               std::span<const Challenge> challenges, std::size_t measurements,
                               const PufParams& params);

}  // namespace trusttoken::puf
