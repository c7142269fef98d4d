// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails. Tolerances are fixed below and not tunable at runtime.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "policy_oracle.hpp"
#include "trusttoken/cli.hpp"
#include "trusttoken/puf.hpp"
#include "trusttoken/scenario_config.hpp"
#include "trusttoken/soc_sim.hpp"

namespace {

using namespace trusttoken;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kChips = 20;
constexpr std::size_t kChallenges = 16;
constexpr std::size_t kMeasurements = 100;
constexpr std::uint64_t kCampaignSeed = 2022;

constexpr double kUniquenessLo = 45.0, kUniquenessHi = 55.0;
constexpr double kRandomnessLo = 42.0, kRandomnessHi = 58.0;
constexpr double kReliabilityNoisyMin = 99.0;
constexpr double kNoiseRatio = 1.0 / 20.0;
constexpr double kBandLo = 0.40, kBandHi = 0.60, kBandShareMin = 0.95;
constexpr double kCampaignSecondsMax = 5.0;
constexpr double kScenarioSecondsMax = 1.0;

const std::string kScenarioDir = TRUSTTOKEN_SCENARIO_DIR;
const char* kBundled[] = {"scenario1.cfg", "scenario2.cfg", "scenario3.cfg", "smoke.cfg"};

int failures = 0;

void verdict(const std::string& id, bool pass, const std::string& what) {
  std::printf("%s [%s] %s\n", pass ? "PASS" : "FAIL", id.c_str(), what.c_str());
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

config::ScenarioConfig load(const std::string& file) {
  return config::load_scenario(kScenarioDir + "/" + file);
}

std::size_t count_attacks(const sim::Script& script) {
  std::size_t n = 0;
  for (const auto& e : script) n += std::holds_alternative<sim::AttackInjection>(e.action) ? 1 : 0;
  return n;
}

void puf_criteria() {
  puf::PufParams params;
  auto t0 = Clock::now();
  auto chips = puf::make_population(kChips, kCampaignSeed, params);
  auto challenges = puf::draw_challenges(kChallenges, kCampaignSeed);
  auto m = puf::characterize(chips, challenges, kMeasurements, params);
  double elapsed = seconds_since(t0);

  verdict("1", m.uniqueness >= kUniquenessLo && m.uniqueness <= kUniquenessHi &&
                   elapsed < kCampaignSecondsMax,
          fmt::format("uniqueness {:.2f}% over {} chips x {} challenges (target [{}, {}]), "
                      "campaign {:.3f} s (limit {} s)",
                      m.uniqueness, kChips, kChallenges, kUniquenessLo, kUniquenessHi, elapsed,
                      kCampaignSecondsMax));
  verdict("2", m.randomness >= kRandomnessLo && m.randomness <= kRandomnessHi,
          fmt::format("randomness {:.2f}% (target [{}, {}])", m.randomness, kRandomnessLo,
                      kRandomnessHi));
  verdict("3a", m.reliability == 100.0,
          fmt::format("noiseless reliability {:.4f}% over {} remeasurements (target exactly 100)",
                      m.reliability, kMeasurements));

  auto noisy = params.with_noise(params.process_variation_sigma * kNoiseRatio);
  auto mn = puf::characterize(chips, challenges, kMeasurements, noisy);
  verdict("3b", mn.reliability >= kReliabilityNoisyMin,
          fmt::format("reliability {:.2f}% at noise_sigma = pv_sigma/20 over {} remeasurements "
                      "(target >= {})",
                      mn.reliability, kMeasurements, kReliabilityNoisyMin));

  std::size_t in_band = 0;
  for (const auto& p : m.pairwise) {
    double frac = static_cast<double>(p.distance) / puf::kResponseBits;
    if (frac >= kBandLo && frac <= kBandHi) ++in_band;
  }
  double share = static_cast<double>(in_band) / static_cast<double>(m.pairwise.size());
  verdict("4", share >= kBandShareMin,
          fmt::format("{}/{} pairwise distances in [40%, 60%] = {:.2f}% (target >= {}%)", in_band,
                      m.pairwise.size(), 100 * share, 100 * kBandShareMin));
}

void scenario1() {
  auto cfg = load("scenario1.cfg");
  auto s = sim::Simulation::build(cfg.topology, cfg.options);
  const auto& log = s.run(cfg.script, cfg.max_cycles);
  auto r = sim::report(log);
  auto scripted = count_attacks(cfg.script);
  auto rsa = fmt::format("target={}", s.object_of("RSA").index);
  bool app3_denied = false;
  for (const auto& rec : log.records()) {
    if (rec.kind == EventKind::kDeny && rec.actor == "App3" &&
        rec.detail.find(rsa) != std::string::npos)
      app3_denied = true;
  }
  bool blocked = r.scenarios.count(cfg.name) && r.scenarios.at(cfg.name) == sim::ScenarioVerdict::kBlocked;
  verdict("5", blocked && r.denies == scripted && app3_denied,
          fmt::format("scenario1 {} with {} denials for {} scripted attacks; App3->RSA denied: {}",
                      blocked ? "BLOCKED" : "not blocked", r.denies, scripted,
                      app3_denied ? "yes" : "no"));
}

// Every (app, ip, attribute) decision with the app's own credentials for the target.
std::vector<bool> decision_sweep(const sim::Simulation& s) {
  std::vector<bool> out;
  for (const auto& cpu : s.topology().cpus) {
    for (const auto& app : cpu.apps) {
      auto pid = s.process_of(app.name);
      for (const auto& ip : s.topology().wrapped_ips) {
        const auto& w = s.wrapper(ip.name);
        auto sb = w.sideband();
        for (std::uint8_t a = 0; a < 8; ++a) {
          policy::AccessRequest req{pid.owner, pid, w.object(), sb.ar_token, sb.ar_id,
                                    AccessAttribute(a)};
          out.push_back(policy::evaluate(s.policy(), req, s.table()).granted());
        }
      }
    }
  }
  return out;
}

void scenario2() {
  auto cfg = load("scenario2.cfg");
  auto s = sim::Simulation::build(cfg.topology, cfg.options);
  auto before = decision_sweep(s);
  auto r = sim::report(s.run(cfg.script, cfg.max_cycles));
  auto after = decision_sweep(s);
  std::size_t tamper_attempts = 0;
  for (const auto& e : cfg.script)
    if (auto* a = std::get_if<sim::AttackInjection>(&e.action))
      tamper_attempts += a->kind == sim::AttackKind::kTamperAccessControl ? 1 : 0;
  std::size_t rejected = r.denies_by_reason.count("matrix_tamper") ? r.denies_by_reason.at("matrix_tamper") : 0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < before.size(); ++i) diff += before[i] != after[i] ? 1 : 0;
  verdict("6", tamper_attempts > 0 && rejected == tamper_attempts && diff == 0 && !r.any_breached(),
          fmt::format("{}/{} mutation attempts rejected as matrix_tamper; decision sweep of {} "
                      "requests differs in {} after the attempts",
                      rejected, tamper_attempts, before.size(), diff));
}

void scenario3() {
  sim::ScenarioVerdict verdicts[2];
  double times[2];
  sim::Mode modes[2] = {sim::Mode::kTrustToken, sim::Mode::kTrustZoneBaseline};
  auto name = load("scenario3.cfg").name;
  for (int i = 0; i < 2; ++i) {
    auto t0 = Clock::now();
    auto cfg = load("scenario3.cfg");
    cfg.options.mode = modes[i];
    auto s = sim::Simulation::build(cfg.topology, cfg.options);
    auto r = sim::report(s.run(cfg.script, cfg.max_cycles));
    times[i] = seconds_since(t0);
    verdicts[i] = r.scenarios.at(name);
  }
  verdict("7", verdicts[0] == sim::ScenarioVerdict::kBlocked &&
                   verdicts[1] == sim::ScenarioVerdict::kBreached &&
                   times[0] < kScenarioSecondsMax && times[1] < kScenarioSecondsMax,
          fmt::format("trusttoken {} in {:.4f} s, trustzone-baseline {} in {:.4f} s (limit {} s)",
                      sim::to_string(verdicts[0]), times[0], sim::to_string(verdicts[1]), times[1],
                      kScenarioSecondsMax));
}

void oracle_equivalence() {
  auto r = oracle::exhaustive_equivalence(6);
  verdict("8", r.mismatches == 0 && r.requests > 0,
          fmt::format("{} requests over all shapes (<=3 users, <=2 processes/user, <=3 objects, "
                      "8 attributes), {} mismatches against the literal evaluator",
                      r.requests, r.mismatches));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void determinism() {
  auto root = std::filesystem::temp_directory_path() / "trusttoken_acceptance";
  std::filesystem::remove_all(root);
  std::size_t compared = 0, identical = 0;
  for (auto file : kBundled) {
    for (auto mode : {sim::Mode::kTrustToken, sim::Mode::kTrustZoneBaseline}) {
      std::string outputs[2][2];
      for (int run = 0; run < 2; ++run) {
        cli::RunOptions o;
        o.config = kScenarioDir + "/" + file;
        o.mode = mode;
        o.out = root / fmt::format("{}_{}_{}", file, sim::to_string(mode), run);
        std::ostringstream out, err;
        cli::cmd_run(o, out, err);
        outputs[run][0] = slurp(o.out / "events.log");
        outputs[run][1] = slurp(o.out / "report.json");
      }
      ++compared;
      if (!outputs[0][0].empty() && outputs[0][0] == outputs[1][0] &&
          outputs[0][1] == outputs[1][1])
        ++identical;
    }
  }
  std::filesystem::remove_all(root);
  verdict("9", identical == compared,
          fmt::format("{}/{} bundled scenario runs produced byte-identical events.log and "
                      "report.json on rerun",
                      identical, compared));
}

}  // namespace

int main() {
  puf_criteria();
  scenario1();
  scenario2();
  scenario3();
  oracle_equivalence();
  determinism();
  std::printf(
      "N/A  [10] hardware utilization and power tables are not reproducible in software "
      "(documented in README)\n");
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
