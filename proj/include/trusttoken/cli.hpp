#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "trusttoken/soc_sim.hpp"

namespace trusttoken::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitBreached = 2;

struct RunOptions {
  std::filesystem::path config;
  std::optional<sim::Mode> mode;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;  // directory; receives report.json and events.log
};

/// 0 when every scripted attack scenario is BLOCKED, 2 when any is
/// BREACHED, 1 on configuration or I/O errors.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct PufEvalOptions {
  std::size_t chips = 20;
  std::size_t challenges = 16;
  std::size_t measurements = 100;
  std::uint64_t seed = 1;
  double noise_ratio = 0.0;  // noise_sigma / process_variation_sigma
  std::filesystem::path out;  // directory; receives puf_metrics.json and hamming.csv
};

/// 0 on success, 1 on invalid parameters or I/O errors.
int cmd_puf_eval(const PufEvalOptions& options, std::ostream& out, std::ostream& err);

}  // namespace trusttoken::cli
