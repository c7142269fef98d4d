#include "trusttoken/cli.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "trusttoken/errors.hpp"
#include "trusttoken/scenario_config.hpp"

namespace trusttoken::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  f << content;
  if (!f) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    auto cfg = config::load_scenario(options.config);
    if (options.mode) cfg.options.mode = *options.mode;
    if (options.seed) cfg.options.master_seed = *options.seed;

    auto simulation = sim::Simulation::build(cfg.topology, cfg.options);
    const auto& log = simulation.run(cfg.script, cfg.max_cycles);
    auto summary = sim::report(log);

    std::filesystem::create_directories(options.out);
    write_file(options.out / "report.json", summary.to_json() + "\n");
    write_file(options.out / "events.log", log.to_text());

    out << fmt::format("{} [{}] seed={} records={} grants={} denies={}\n", cfg.name,
                       sim::to_string(cfg.options.mode), cfg.options.master_seed, summary.records,
                       summary.grants, summary.denies);
    for (const auto& [name, verdict] : summary.scenarios) {
      out << fmt::format("  {}: {}\n", name, sim::to_string(verdict));
    }
    return summary.any_breached() ? kExitBreached : kExitOk;
  } catch (const ConfigurationError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
  } catch (const ProvisioningError& e) {
    err << "provisioning error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitConfigError;
}

int cmd_puf_eval(const PufEvalOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.chips < 2) throw ParameterError("--chips must be at least 2");
    if (options.challenges < 1) throw ParameterError("--challenges must be at least 1");

    puf::PufParams params;
    params.noise_sigma = options.noise_ratio * params.process_variation_sigma;
    params.validate();

    auto chips = puf::make_population(options.chips, options.seed, params);
    auto challenges = puf::draw_challenges(options.challenges, options.seed);
    auto metrics = puf::characterize(chips, challenges, options.measurements, params);

    nlohmann::json j;
    j["chips"] = metrics.chips;
    j["challenges"] = metrics.challenges;
    j["measurements"] = metrics.measurements;
    j["seed"] = options.seed;
    j["params"] = {{"oscillator_count", params.oscillator_count},
                   {"response_bits", params.response_bits},
                   {"nominal_frequency", params.nominal_frequency},
                   {"process_variation_sigma", params.process_variation_sigma},
                   {"noise_sigma", params.noise_sigma}};
    j["uniqueness_percent"] = metrics.uniqueness;
    j["randomness_percent"] = metrics.randomness;
    j["reliability_percent"] = metrics.reliability;
    std::size_t in_band = 0;
    for (const auto& p : metrics.pairwise) {
      double frac = static_cast<double>(p.distance) / puf::kResponseBits;
      if (frac >= 0.40 && frac <= 0.60) ++in_band;
    }
    j["pairs"] = metrics.pairwise.size();
    j["pairs_within_40_60_percent"] = in_band;

    std::string csv = "challenge,chip_a,chip_b,hamming_distance,fraction\n";
    for (const auto& p : metrics.pairwise) {
      csv += fmt::format("{},{},{},{},{:.6f}\n", p.challenge.value, p.chip_a, p.chip_b,
                         p.distance, static_cast<double>(p.distance) / puf::kResponseBits);
    }

    std::filesystem::create_directories(options.out);
    write_file(options.out / "puf_metrics.json", j.dump(2) + "\n");
    write_file(options.out / "hamming.csv", csv);

    out << fmt::format("uniqueness={:.2f}% randomness={:.2f}% reliability={:.2f}% pairs={}\n",
                       metrics.uniqueness, metrics.randomness, metrics.reliability,
                       metrics.pairwise.size());
    return kExitOk;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitConfigError;
}

}  // namespace trusttoken::cli
