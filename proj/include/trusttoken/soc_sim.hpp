#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "trusttoken/event_log.hpp"
#include "trusttoken/policy.hpp"
#include "trusttoken/puf.hpp"
#include "trusttoken/token_authority.hpp"
#include "trusttoken/trust_wrapper.hpp"

namespace trusttoken::sim {

// Topology ---------------------------------------------------------------------

struct AppSpec {
  std::string name;
  std::string user;  // user account the application runs under
};

struct CpuSpec {
  std::string name;
  std::vector<AppSpec> apps;
};

struct IpSpec {
  std::string name;
  StubKind stub = StubKind::kCustom;
  IntegrityLevel integrity = IntegrityLevel::kHigh;
};

struct Permission {
  std::string app;
  std::string ip;
  AccessAttribute attribute;
};

/// Names are resolved to ids in declaration order: users by first
/// appearance, processes per user in application order, objects in IP order.
struct Topology {
  std::vector<CpuSpec> cpus;
  std::vector<IpSpec> wrapped_ips;
  std::map<std::string, std::string> app_to_ip;
  std::vector<Permission> permissions;

  /// Throws ConfigurationError.
  void validate() const;
};

enum class Mode { kTrustToken, kTrustZoneBaseline };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

// Script -----------------------------------------------------------------------

/// An application talks to `target` through the wrapper of its mapped IP.
struct AccessIntent {
  std::string app;
  std::string target;
  AccessAttribute kind{AccessAttribute::kRead};
  std::vector<std::uint8_t> payload;
  std::optional<std::string> as_user;  // claim a different user account
};

/// Controller rolls every token over to the next epoch.
struct ReprovisionIntent {};

enum class AttackKind {
  kForgeToken,
  kCrossIpAccess,
  kTamperInterconnectSignal,
  kTamperIntegrityLevel,
  kReplayStaleToken,
  kTamperAccessControl,
};

std::string_view to_string(AttackKind kind);
std::optional<AttackKind> parse_attack_kind(std::string_view text);

enum class TokenSource { kNone, kForged, kStolen };

std::string_view to_string(TokenSource source);
std::optional<TokenSource> parse_token_source(std::string_view text);

struct AttackInjection {
  AttackKind kind = AttackKind::kForgeToken;
  std::string scenario;

  // Transaction-shaped attacks (forge_token, cross_ip_access, replay_stale_token).
  std::string app;
  std::string target;
  AccessAttribute access{AccessAttribute::kRead};
  std::vector<std::uint8_t> payload;
  std::size_t flip_bit = 0;

  // tamper_interconnect_signal: "<ip>.<awprot|arprot|ar_integrity>".
  std::string signal;

  // tamper_integrity_level.
  IntegrityLevel level = IntegrityLevel::kLow;
  TokenSource token = TokenSource::kNone;

  // tamper_access_control: `app` is the attacker, `victim` the application
  // whose matrix row is rewritten. `table_write` targets the token table.
  std::string victim;
  bool table_write = false;
};

using ScriptAction = std::variant<AccessIntent, ReprovisionIntent, AttackInjection>;

struct ScriptEntry {
  std::uint64_t cycle = 0;
  ScriptAction action;
};

using Script = std::vector<ScriptEntry>;

// Simulation -------------------------------------------------------------------

struct SimulationOptions {
  std::uint64_t master_seed = 1;
  Mode mode = Mode::kTrustToken;
  puf::PufParams puf;
  HandshakeCosts costs;
  bool strict_policy = true;
};

/// Deterministic discrete-event model of the SoC. Same-cycle events run in
/// script order. One Simulation runs one script.
class Simulation {
 public:
  /// Creates the chip, wraps and provisions every IP, builds the policy
  /// model. Throws ConfigurationError for an invalid topology.
  static Simulation build(Topology topology, SimulationOptions options);

  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;
  ~Simulation();

  /// Schedules an AWPROT-style protection-signal mutation. Throws
  /// ConfigurationError for an unknown signal name.
  void inject_awprot_style_tamper(std::string_view target_signal, std::uint64_t cycle,
                                  std::string scenario = "awprot");

  /// Processes every event with cycle < max_cycles. Throws std::logic_error
  /// when called twice.
  const EventLog& run(const Script& script, std::uint64_t max_cycles);

  const EventLog& log() const;
  Mode mode() const;
  std::uint64_t cycle() const;
  std::uint64_t initial_state_hash() const;

  const Topology& topology() const;
  const TokenTable& table() const;
  const policy::SystemModel& policy() const;
  const TrustWrapper& wrapper(std::string_view ip_name) const;
  ObjectId object_of(std::string_view ip_name) const;
  ProcessId process_of(std::string_view app_name) const;
  UserId user_of(std::string_view user_name) const;

  /// Baseline mode: current interconnect protection signal per object.
  IntegrityLevel protection_signal(std::string_view ip_name) const;

 private:
  struct State;
  explicit Simulation(std::unique_ptr<State> state);
  std::unique_ptr<State> state_;
};

// Report -----------------------------------------------------------------------

enum class ScenarioVerdict { kBlocked, kBreached };

std::string_view to_string(ScenarioVerdict verdict);

struct SummaryReport {
  std::uint64_t records = 0;
  std::uint64_t issues = 0;
  std::uint64_t grants = 0;
  std::uint64_t denies = 0;
  std::uint64_t responses = 0;
  std::uint64_t attacks_fired = 0;
  std::uint64_t attacks_blocked = 0;
  std::uint64_t attacks_succeeded = 0;
  std::map<std::string, std::uint64_t> denies_by_reason;
  std::map<std::string, ScenarioVerdict> scenarios;
  std::map<std::uint32_t, std::uint64_t> cycle_cost_histogram;

  bool any_breached() const;
  /// Serialized as a JSON object with sorted keys.
  std::string to_json() const;
};

SummaryReport report(const EventLog& log);

}  // namespace trusttoken::sim
