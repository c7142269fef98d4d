#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "trusttoken/errors.hpp"
#include "trusttoken/soc_sim.hpp"

namespace trusttoken::config {

/// Parse failure with file/line context. what() reads "<source>:<line>: <message>".
class ConfigError : public ConfigurationError {
 public:
  ConfigError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

struct ScenarioConfig {
  std::string name;
  sim::Topology topology;
  sim::SimulationOptions options;
  sim::Script script;
  std::uint64_t max_cycles = 1000;
};

/// Grammar is documented in docs/scenario-format.md.
ScenarioConfig parse_scenario(std::string_view text, std::string source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace trusttoken::config
