#include "trusttoken/puf.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "trusttoken/errors.hpp"
#include "trusttoken/seeding.hpp"

namespace trusttoken::puf {

void PufParams::validate() const {
  if (response_bits != kResponseBits) {
    throw ParameterError(fmt::format("response_bits must be {}, got {}", kResponseBits, response_bits));
  }
  if (oscillator_count < 2 * response_bits) {
    throw ParameterError(fmt::format("oscillator_count {} cannot supply {} disjoint pairs",
                                     oscillator_count, response_bits));
  }
  if (!(process_variation_sigma > 0.0)) {
    throw ParameterError("process_variation_sigma must be positive");
  }
  if (!(noise_sigma >= 0.0)) {
    throw ParameterError("noise_sigma must be non-negative");
  }
  if (!(noise_sigma < process_variation_sigma)) {
    throw ParameterError("noise_sigma must be smaller than process_variation_sigma");
  }
}

ChipFingerprint new_chip(std::uint64_t chip_seed, const PufParams& params) {
  params.validate();
  std::vector<double> freqs(params.oscillator_count);
  boost::random::normal_distribution<double> variation(0.0, params.process_variation_sigma);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    auto eng = make_engine(StreamTag::kProcessVariation, {chip_seed, i});
    freqs[i] = params.nominal_frequency + variation(eng);
  }
  return ChipFingerprint(chip_seed, std::move(freqs));
}

std::vector<OscillatorPair> challenge_pairs(Challenge challenge, const PufParams& params) {
  std::vector<std::size_t> order(params.oscillator_count);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Fisher-Yates with a portable index distribution; std::shuffle is not
  // specified tightly enough to be reproducible across standard libraries.
  auto eng = make_engine(StreamTag::kPairing, {challenge.value, params.oscillator_count});
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(eng)]);
  }

  std::vector<OscillatorPair> pairs(params.response_bits);
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    pairs[j] = {order[2 * j], order[2 * j + 1]};
  }
  return pairs;
}

namespace {

void check_chip(const ChipFingerprint& chip, const PufParams& params) {
  params.validate();
  if (chip.base_frequencies().size() != params.oscillator_count) {
    throw ParameterError(fmt::format("chip has {} oscillators but params declare {}",
                                     chip.base_frequencies().size(), params.oscillator_count));
  }
}

Response compare_pairs(std::span<const double> observed, std::span<const OscillatorPair> pairs) {
  Response r;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    r.bits[j] = observed[pairs[j].first] > observed[pairs[j].second];
  }
  return r;
}

Response measure_with_pairs(const ChipFingerprint& chip, Challenge challenge,
                            std::uint64_t measurement_seed, const PufParams& params,
                            std::span<const OscillatorPair> pairs) {
  auto base = chip.base_frequencies();
  if (params.noise_sigma == 0.0) return compare_pairs(base, pairs);

  std::vector<double> observed(base.begin(), base.end());
  auto eng = make_engine(StreamTag::kNoise, {chip.seed(), challenge.value, measurement_seed});
  boost::random::normal_distribution<double> noise(0.0, params.noise_sigma);
  for (auto& f : observed) f += noise(eng);
  return compare_pairs(observed, pairs);
}

}  // namespace

Response measure_response(const ChipFingerprint& chip, Challenge challenge,
                          std::uint64_t measurement_seed, const PufParams& params) {
  check_chip(chip, params);
  auto pairs = challenge_pairs(challenge, params);
  return measure_with_pairs(chip, challenge, measurement_seed, params, pairs);
}

Response reference_response(const ChipFingerprint& chip, Challenge challenge,
                            const PufParams& params) {
  return measure_response(chip, challenge, 0, params.with_noise(0.0));
}

std::size_t hamming_distance(const Response& a, const Response& b) {
  return (a.bits ^ b.bits).count();
}

double uniqueness(std::span<const ChipFingerprint> chips, Challenge challenge,
                  const PufParams& params) {
  if (chips.size() < 2) {
    throw ParameterError("uniqueness needs at least two chips");
  }
  std::vector<Response> responses;
  responses.reserve(chips.size());
  for (const auto& chip : chips) responses.push_back(reference_response(chip, challenge, params));

  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    for (std::size_t j = i + 1; j < responses.size(); ++j) {
      sum += static_cast<double>(hamming_distance(responses[i], responses[j])) / kResponseBits;
      ++pairs;
    }
  }
  return 100.0 * sum / static_cast<double>(pairs);
}

double randomness(const Response& response) {
  return 100.0 * static_cast<double>(response.bits.count()) / kResponseBits;
}

double reliability(const ChipFingerprint& chip, Challenge challenge, std::size_t n_measurements,
                   const PufParams& params) {
  if (n_measurements < 2) {
    throw ParameterError("reliability needs at least two measurements");
  }
  check_chip(chip, params);
  auto pairs = challenge_pairs(challenge, params);
  auto reference = measure_with_pairs(chip, challenge, 0, params.with_noise(0.0), pairs);

  double sum = 0.0;
  for (std::size_t i = 0; i < n_measurements; ++i) {
    auto noisy = measure_with_pairs(chip, challenge, i, params, pairs);
    sum += static_cast<double>(hamming_distance(reference, noisy)) / kResponseBits;
  }
  return 100.0 - 100.0 * sum / static_cast<double>(n_measurements);
}

std::vector<ChipFingerprint> make_population(std::size_t chips, std::uint64_t master_seed,
                                             const PufParams& params) {
  auto eng = make_engine(StreamTag::kChipPopulation, {master_seed});
  std::vector<ChipFingerprint> out;
  out.reserve(chips);
  for (std::size_t i = 0; i < chips; ++i) out.push_back(new_chip(eng(), params));
  return out;
}

std::vector<Challenge> draw_challenges(std::size_t count, std::uint64_t master_seed) {
  if (count > 65536) {
    throw ParameterError("at most 65536 distinct challenges exist");
  }
  auto eng = make_engine(StreamTag::kChipPopulation, {master_seed, 0x63686cu});
  boost::random::uniform_int_distribution<std::uint32_t> pick(0, 0xffff);
  std::unordered_set<std::uint16_t> seen;
  std::vector<Challenge> out;
  out.reserve(count);
  while (out.size() < count) {
    auto v = static_cast<std::uint16_t>(pick(eng));
    if (seen.insert(v).second) out.push_back(Challenge{v});
  }
  return out;
}

PopulationMetrics characterize(std::span<const ChipFingerprint> chips,
                               std::span<const Challenge> challenges, std::size_t measurements,
                               const PufParams& params) {
  if (chips.size() < 2) throw ParameterError("characterization needs at least two chips");
  if (challenges.empty()) throw ParameterError("characterization needs at least one challenge");

  PopulationMetrics m;
  m.chips = chips.size();
  m.challenges = challenges.size();
  m.measurements = measurements;

  double uniq_sum = 0.0;
  double rand_sum = 0.0;
  double rel_sum = 0.0;
  for (auto challenge : challenges) {
    std::vector<Response> responses;
    responses.reserve(chips.size());
    for (const auto& chip : chips) {
      responses.push_back(reference_response(chip, challenge, params));
      rand_sum += randomness(responses.back());
      rel_sum += reliability(chip, challenge, measurements, params);
    }
    double challenge_sum = 0.0;
    for (std::size_t a = 0; a < responses.size(); ++a) {
      for (std::size_t b = a + 1; b < responses.size(); ++b) {
        auto d = hamming_distance(responses[a], responses[b]);
        m.pairwise.push_back({challenge, a, b, d});
        challenge_sum += static_cast<double>(d) / kResponseBits;
      }
    }
    auto n_pairs = static_cast<double>(chips.size() * (chips.size() - 1) / 2);
    uniq_sum += 100.0 * challenge_sum / n_pairs;
  }
  auto cells = static_cast<double>(chips.size() * challenges.size());
  m.uniqueness = uniq_sum / static_cast<double>(challenges.size());
  m.randomness = rand_sum / cells;
  m.reliability = rel_sum / cells;
  return m;
}

}  // namespace trusttoken::puf
