#include "trusttoken/soc_sim.hpp"

#include <cstring>
#include <queue>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "trusttoken/errors.hpp"

namespace trusttoken::sim {

// Names ------------------------------------------------------------------------

std::string_view to_string(Mode mode) {
  return mode == Mode::kTrustToken ? "trusttoken" : "trustzone-baseline";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "trusttoken") return Mode::kTrustToken;
  if (text == "trustzone-baseline") return Mode::kTrustZoneBaseline;
  return std::nullopt;
}

namespace {
constexpr std::pair<AttackKind, std::string_view> kAttackNames[] = {
    {AttackKind::kForgeToken, "forge_token"},
    {AttackKind::kCrossIpAccess, "cross_ip_access"},
    {AttackKind::kTamperInterconnectSignal, "tamper_interconnect_signal"},
    {AttackKind::kTamperIntegrityLevel, "tamper_integrity_level"},
    {AttackKind::kReplayStaleToken, "replay_stale_token"},
    {AttackKind::kTamperAccessControl, "tamper_access_control"},
};
}  // namespace

std::string_view to_string(AttackKind kind) {
  for (auto [k, name] : kAttackNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<AttackKind> parse_attack_kind(std::string_view text) {
  for (auto [k, name] : kAttackNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(TokenSource source) {
  switch (source) {
    case TokenSource::kNone: return "none";
    case TokenSource::kForged: return "forged";
    case TokenSource::kStolen: return "stolen";
  }
  return "none";
}

std::optional<TokenSource> parse_token_source(std::string_view text) {
  if (text == "none") return TokenSource::kNone;
  if (text == "forged") return TokenSource::kForged;
  if (text == "stolen") return TokenSource::kStolen;
  return std::nullopt;
}

std::string_view to_string(ScenarioVerdict verdict) {
  return verdict == ScenarioVerdict::kBlocked ? "BLOCKED" : "BREACHED";
}

// Topology -------------------------------------------------------------------------

void Topology::validate() const {
  if (cpus.empty()) throw ConfigurationError("topology needs at least one CPU");
  if (wrapped_ips.empty()) throw ConfigurationError("topology needs at least one wrapped IP");
  if (wrapped_ips.size() > 255) throw ConfigurationError("at most 255 wrapped IPs");

  std::set<std::string> apps;
  for (const auto& cpu : cpus) {
    for (const auto& app : cpu.apps) {
      if (!apps.insert(app.name).second) {
        throw ConfigurationError(fmt::format("application '{}' declared twice", app.name));
      }
      if (app.user.empty()) {
        throw ConfigurationError(fmt::format("application '{}' has no user", app.name));
      }
    }
  }
  std::set<std::string> ips;
  for (const auto& ip : wrapped_ips) {
    if (!ips.insert(ip.name).second) {
      throw ConfigurationError(fmt::format("IP '{}' declared twice", ip.name));
    }
  }
  for (const auto& [app, ip] : app_to_ip) {
    if (!apps.contains(app)) {
      throw ConfigurationError(fmt::format("mapping names unknown application '{}'", app));
    }
    if (!ips.contains(ip)) {
      throw ConfigurationError(fmt::format("application '{}' mapped to unknown IP '{}'", app, ip));
    }
  }
  for (const auto& p : permissions) {
    if (!apps.contains(p.app) || !ips.contains(p.ip)) {
      throw ConfigurationError(fmt::format("permission {} -> {} names an unknown endpoint", p.app,
                                           p.ip));
    }
  }
}

// Simulation state ---------------------------------------------------------------

namespace {

struct ResponseEvent {
  std::string actor;
  std::string scenario;
  std::uint64_t transaction = 0;
  std::string target;
  std::size_t bytes = 0;
};

using EventPayload = std::variant<ScriptAction, ResponseEvent>;

struct Pending {
  std::uint64_t cycle;
  std::uint64_t seq;
  EventPayload payload;
};

struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    return a.cycle != b.cycle ? a.cycle > b.cycle : a.seq > b.seq;
  }
};

// FNV-1a, used for the state fingerprint and token digests in the log.
class Fnv1a {
 public:
  void add(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ull;
    }
  }
  template <typename T>
  void add_value(const T& v) {
    add(&v, sizeof v);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

std::string token_digest(const Token& token) {
  SidebandSignals s{token, IpId{}, IntegrityLevel::kHigh};
  auto wire = s.encode();
  Fnv1a h;
  h.add(wire.data(), SidebandSignals::kTokenBytes);
  return fmt::format("{:016x}", h.value());
}

}  // namespace

struct Simulation::State {
  Topology topology;
  SimulationOptions options;
  puf::ChipFingerprint chip;
  WrapperRegistry wrappers;
  EventLog log;
  std::optional<TrustTokenController> controller;

  std::map<std::string, UserId, std::less<>> users;
  std::map<std::string, ProcessId, std::less<>> processes;
  std::map<std::string, ObjectId, std::less<>> objects;
  std::vector<std::string> object_names;
  std::map<ObjectId, IntegrityLevel> protection;
  std::map<ObjectId, Credential> boot_credentials;

  std::vector<ScriptEntry> injected;
  std::uint64_t state_hash = 0;
  std::uint64_t now = 0;
  bool ran = false;

  std::priority_queue<Pending, std::vector<Pending>, Later> queue;
  std::uint64_t next_seq = 0;

  explicit State(puf::ChipFingerprint c) : chip(std::move(c)) {}

  void schedule(std::uint64_t cycle, EventPayload payload) {
    queue.push(Pending{cycle, next_seq++, std::move(payload)});
  }

  std::optional<ObjectId> find_object(std::string_view name) const {
    auto it = objects.find(name);
    if (it == objects.end()) return std::nullopt;
    return it->second;
  }

  std::optional<ProcessId> find_process(std::string_view name) const {
    auto it = processes.find(name);
    if (it == processes.end()) return std::nullopt;
    return it->second;
  }

  TrustWrapper* mapped_wrapper(std::string_view app) {
    auto it = topology.app_to_ip.find(std::string(app));
    if (it == topology.app_to_ip.end()) return nullptr;
    return wrappers.find(objects.at(it->second));
  }

  void append(std::string actor, EventKind kind, std::string scenario, std::string detail,
              std::optional<DenialReason> reason = std::nullopt,
              std::optional<std::uint32_t> cost = std::nullopt) {
    EventRecord r;
    r.cycle = now;
    r.actor = std::move(actor);
    r.kind = kind;
    r.reason = reason;
    r.cycle_cost = cost;
    r.scenario = std::move(scenario);
    r.detail = std::move(detail);
    log.append(std::move(r));
  }

  // Baseline interconnect: only the protection signal gates isolation, and
  // there are no credentials to check.
  AuthorizationOutcome baseline_authorize(const WrappedTransaction& txn, const std::string& actor,
                                          const std::string& scenario) {
    AuthorizationOutcome out;
    out.transaction = txn.id;
    const auto costs = options.costs;
    auto level = protection.find(txn.target);
    if (level == protection.end()) {
      out.cycle_cost = costs.low;
      out.reason = DenialReason::kMalformed;
    } else if (level->second == IntegrityLevel::kLow) {
      out.cycle_cost = costs.low;
      out.granted = true;
    } else {
      out.cycle_cost = costs.high;
      if (const auto* src = std::get_if<ProcessEndpoint>(&txn.source)) {
        auto d = policy::evaluate_without_credentials(controller->policy(), src->user,
                                                      src->process, txn.target, txn.kind);
        out.granted = d.granted();
        out.reason = d.reason;
      } else {
        out.reason = DenialReason::kMalformed;
      }
    }
    append(actor, out.granted ? EventKind::kGrant : EventKind::kDeny, scenario,
           fmt::format("txn={:#x} target={}", txn.id, txn.target.index), out.reason,
           out.cycle_cost);
    return out;
  }

  AuthorizationOutcome submit(const WrappedTransaction& txn, const std::string& actor,
                              const std::string& scenario) {
    const auto* src = std::get_if<ProcessEndpoint>(&txn.source);
    append(actor, EventKind::kIssue, scenario,
           fmt::format("txn={:#x} user={} process={}.{} target={} kind={} id={} token={}",
                       txn.id, src ? src->user.index : 0, src ? src->process.owner.index : 0,
                       src ? src->process.index : 0, object_names.at(txn.target.index),
                       txn.kind.to_string(), txn.sideband.ar_id.value,
                       token_digest(txn.sideband.ar_token)));

    auto outcome = options.mode == Mode::kTrustToken
                       ? controller->authorize(txn, now, actor, scenario)
                       : baseline_authorize(txn, actor, scenario);

    auto* target = wrappers.find(txn.target);
    if (auto response = target->deliver(txn, outcome)) {
      schedule(response->ready_cycle,
               ResponseEvent{actor, scenario, txn.id, object_names.at(txn.target.index),
                             response->payload.size()});
    }
    return outcome;
  }

  void reject_malformed(const std::string& actor, const std::string& scenario,
                        std::string detail) {
    append(actor, EventKind::kIssue, scenario, detail);
    append(actor, EventKind::kDeny, scenario, std::move(detail), DenialReason::kMalformed);
  }

  /// Builds the transaction an application would put on the bus.
  std::optional<WrappedTransaction> compose(const std::string& app, const std::string& target,
                                            AccessAttribute kind,
                                            const std::vector<std::uint8_t>& payload,
                                            const std::optional<std::string>& as_user,
                                            const std::string& scenario) {
    auto process = find_process(app);
    auto object = find_object(target);
    auto* wrapper = mapped_wrapper(app);
    std::optional<UserId> user;
    if (process) user = process->owner;
    if (as_user) {
      auto it = users.find(*as_user);
      user = it == users.end() ? std::nullopt : std::optional(it->second);
    }
    if (!process || !object || !wrapper || !user || kind.empty()) {
      reject_malformed(app, scenario, fmt::format("unresolvable request {} -> {}", app, target));
      return std::nullopt;
    }
    return wrapper->issue(ProcessEndpoint{*user, *process}, *object, kind, payload, now);
  }

  void handle(const AccessIntent& intent) {
    if (auto txn = compose(intent.app, intent.target, intent.kind, intent.payload, intent.as_user,
                           "")) {
      submit(*txn, intent.app, "");
    }
  }

  void handle(const ReprovisionIntent&) {
    std::vector<IpDeclaration> decls;
    for (const auto& w : wrappers.wrappers()) {
      decls.push_back({w.object(), controller->lookup_integrity(w.object())});
    }
    auto epoch = controller->table().epoch() + 1;
    auto table = provision(chip, options.puf, decls, options.master_seed,
                           [this](const Credential& c) { wrappers.accept(c); }, epoch);
    controller->reprovision(std::move(table), now);
  }

  void conclude(const AttackInjection& a, bool blocked, std::string detail) {
    append("attacker", blocked ? EventKind::kAttackBlocked : EventKind::kAttackSucceeded,
           a.scenario, std::move(detail));
  }

  void signal_override(const AttackInjection& a, ObjectId object, IntegrityLevel level,
                       std::string_view what) {
    auto before = protection.at(object);
    protection[object] = level;
    append("interconnect", EventKind::kTransition, a.scenario,
           fmt::format("target={} {}->{} unauthenticated {}", object.index, to_string(before),
                       to_string(level), what));
    conclude(a, false, fmt::format("{} applied", what));
  }

  void handle(const AttackInjection& a) {
    append("attacker", EventKind::kAttackFired, a.scenario,
           fmt::format("kind={}", to_string(a.kind)));
    switch (a.kind) {
      case AttackKind::kForgeToken:
      case AttackKind::kCrossIpAccess:
      case AttackKind::kReplayStaleToken: {
        auto txn = compose(a.app, a.target, a.access, a.payload, std::nullopt, a.scenario);
        if (!txn) {
          conclude(a, true, "request rejected");
          return;
        }
        if (a.kind == AttackKind::kForgeToken) {
          txn->sideband.ar_token.bits.flip(a.flip_bit % puf::kResponseBits);
        } else if (a.kind == AttackKind::kReplayStaleToken) {
          auto mapped = objects.at(topology.app_to_ip.at(a.app));
          const auto& stale = boot_credentials.at(mapped);
          txn->sideband.ar_token = stale.token;
          txn->sideband.ar_id = stale.id;
        }
        auto outcome = submit(*txn, a.app, a.scenario);
        conclude(a, !outcome.granted, fmt::format("txn={:#x}", txn->id));
        return;
      }
      case AttackKind::kTamperInterconnectSignal:
      case AttackKind::kTamperIntegrityLevel: {
        std::string target_name = a.target;
        if (a.kind == AttackKind::kTamperInterconnectSignal) {
          target_name = a.signal.substr(0, a.signal.find('.'));
        }
        auto object = find_object(target_name);
        if (!object) {
          reject_malformed("attacker", a.scenario, fmt::format("unknown target {}", target_name));
          conclude(a, true, "request rejected");
          return;
        }
        auto level =
            a.kind == AttackKind::kTamperInterconnectSignal ? IntegrityLevel::kLow : a.level;
        if (options.mode == Mode::kTrustZoneBaseline) {
          signal_override(a, *object, level,
                          a.kind == AttackKind::kTamperInterconnectSignal ? a.signal
                                                                          : "ar_integrity");
          return;
        }
        Token presented{};
        auto source = a.kind == AttackKind::kTamperInterconnectSignal ? TokenSource::kNone : a.token;
        if (source != TokenSource::kNone) {
          presented = wrappers.find(*object)->sideband().ar_token;
          if (source == TokenSource::kForged) presented.bits.flip(0);
        }
        append("attacker", EventKind::kIssue, a.scenario,
               fmt::format("integrity target={} level={} token={}", object->index,
                           to_string(level), to_string(source)));
        auto outcome =
            controller->request_integrity_transition(*object, presented, level, now, "attacker",
                                                     a.scenario);
        conclude(a, !outcome.granted, fmt::format("target={}", object->index));
        return;
      }
      case AttackKind::kTamperAccessControl: {
        auto attacker = find_process(a.app);
        auto object = find_object(a.target);
        if (!attacker || !object) {
          reject_malformed("attacker", a.scenario, "unknown access-control target");
          conclude(a, true, "request rejected");
          return;
        }
        if (a.table_write) {
          if (options.mode == Mode::kTrustZoneBaseline) {
            signal_override(a, *object, IntegrityLevel::kLow, "security check");
            return;
          }
          append(a.app, EventKind::kIssue, a.scenario,
                 fmt::format("token_table write target={}", object->index));
          controller->write_table_entry(now, a.app, a.scenario);
          conclude(a, true, "token_table write refused");
          return;
        }
        auto victim = find_process(a.victim.empty() ? a.app : a.victim);
        if (!victim) {
          reject_malformed("attacker", a.scenario, "unknown access-control victim");
          conclude(a, true, "request rejected");
          return;
        }
        // The baseline crossbar does not authenticate who reconfigures it.
        auto who = options.mode == Mode::kTrustZoneBaseline ? policy::Actor::controller()
                                                            : policy::Actor::of_user(attacker->owner);
        append(a.app, EventKind::kIssue, a.scenario,
               fmt::format("matrix user={} process={} object={} attr={}", victim->owner.index,
                           victim->index, object->index, a.access.to_string()));
        bool applied = controller->modify_matrix(who, victim->owner, *victim, *object, a.access,
                                                 now, a.app, a.scenario);
        conclude(a, !applied, "matrix edit");
        return;
      }
    }
  }

  void handle(const ResponseEvent& r) {
    append(r.actor, EventKind::kResponse, r.scenario,
           fmt::format("txn={:#x} from={} bytes={}", r.transaction, r.target, r.bytes));
  }

  void compute_hash() {
    Fnv1a h;
    for (double f : chip.base_frequencies()) h.add_value(f);
    for (const auto& w : wrappers.wrappers()) {
      auto wire = w.sideband().encode();
      h.add(wire.data(), wire.size());
    }
    const auto& model = controller->policy();
    for (auto u : model.users()) {
      const auto& m = model.matrix(u);
      for (std::size_t p = 0; p < m.processes(); ++p) {
        for (std::size_t o = 0; o < m.objects(); ++o) h.add_value(m.at(p, o).bits());
      }
    }
    for (const auto& [object, level] : protection) h.add_value(level);
    state_hash = h.value();
  }
};

// Simulation ------------------------------------------------------------------------

Simulation::Simulation(std::unique_ptr<State> state) : state_(std::move(state)) {}
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;
Simulation::~Simulation() = default;

Simulation Simulation::build(Topology topology, SimulationOptions options) {
  topology.validate();
  options.puf.validate();

  auto s = std::make_unique<State>(puf::new_chip(options.master_seed, options.puf));
  s->options = options;

  std::vector<UserId> users;
  std::vector<ProcessId> processes;
  std::map<UserId, std::uint8_t> per_user;
  for (const auto& cpu : topology.cpus) {
    for (const auto& app : cpu.apps) {
      auto [it, fresh] =
          s->users.emplace(app.user, UserId{static_cast<std::uint8_t>(s->users.size())});
      if (fresh) users.push_back(it->second);
      ProcessId pid{it->second, per_user[it->second]++};
      s->processes.emplace(app.name, pid);
      processes.push_back(pid);
    }
  }

  std::vector<ObjectId> objects;
  for (std::size_t i = 0; i < topology.wrapped_ips.size(); ++i) {
    const auto& ip = topology.wrapped_ips[i];
    ObjectId id{static_cast<std::uint8_t>(i)};
    s->objects.emplace(ip.name, id);
    s->object_names.push_back(ip.name);
    objects.push_back(id);
    s->wrappers.wrap(IpCoreStub(ip.stub), id, ip.integrity);
    s->protection[id] = ip.integrity;
  }

  std::map<UserId, policy::AccessMatrix> matrices;
  for (auto u : users) matrices.emplace(u, policy::AccessMatrix(u, per_user[u], objects.size()));
  for (const auto& p : topology.permissions) {
    auto pid = s->processes.at(p.app);
    auto& m = matrices.at(pid.owner);
    auto oid = s->objects.at(p.ip);
    m.set(pid.index, oid.index,
          AccessAttribute(static_cast<std::uint8_t>(m.at(pid.index, oid.index).bits() |
                                                    p.attribute.bits())));
  }
  std::vector<policy::AccessMatrix> matrix_list;
  for (auto& [u, m] : matrices) matrix_list.push_back(std::move(m));
  auto model = policy::build_system(users, processes, objects, std::move(matrix_list),
                                    options.strict_policy)
                   .seal();

  auto table = provision(s->chip, options.puf, s->wrappers.declarations(), options.master_seed,
                         [&s](const Credential& c) {
                           s->wrappers.accept(c);
                           s->boot_credentials.emplace(c.object, c);
                         });
  s->controller.emplace(std::move(table), std::move(model), s->log, options.costs);
  s->topology = std::move(topology);
  s->compute_hash();
  return Simulation(std::move(s));
}

void Simulation::inject_awprot_style_tamper(std::string_view target_signal, std::uint64_t cycle,
                                            std::string scenario) {
  auto dot = target_signal.find('.');
  if (dot == std::string_view::npos) {
    throw ConfigurationError(fmt::format("signal '{}' is not of the form <ip>.<signal>",
                                         target_signal));
  }
  auto ip = target_signal.substr(0, dot);
  auto sig = target_signal.substr(dot + 1);
  if (!state_->objects.contains(ip)) {
    throw ConfigurationError(fmt::format("signal '{}' names unknown IP", target_signal));
  }
  if (sig != "awprot" && sig != "arprot" && sig != "ar_integrity") {
    throw ConfigurationError(fmt::format("unknown protection signal '{}'", sig));
  }
  AttackInjection a;
  a.kind = AttackKind::kTamperInterconnectSignal;
  a.signal = std::string(target_signal);
  a.scenario = std::move(scenario);
  state_->injected.push_back(ScriptEntry{cycle, std::move(a)});
}

const EventLog& Simulation::run(const Script& script, std::uint64_t max_cycles) {
  auto& s = *state_;
  if (s.ran) throw std::logic_error("simulation already ran");
  s.ran = true;

  for (const auto& entry : script) s.schedule(entry.cycle, entry.action);
  for (const auto& entry : s.injected) s.schedule(entry.cycle, entry.action);

  while (!s.queue.empty() && s.queue.top().cycle < max_cycles) {
    auto event = s.queue.top();
    s.queue.pop();
    s.now = event.cycle;
    std::visit(
        [&s](const auto& payload) {
          using T = std::decay_t<decltype(payload)>;
          if constexpr (std::is_same_v<T, ScriptAction>) {
            std::visit([&s](const auto& action) { s.handle(action); }, payload);
          } else {
            s.handle(payload);
          }
        },
        event.payload);
  }
  return s.log;
}

const EventLog& Simulation::log() const { return state_->log; }
Mode Simulation::mode() const { return state_->options.mode; }
std::uint64_t Simulation::cycle() const { return state_->now; }
std::uint64_t Simulation::initial_state_hash() const { return state_->state_hash; }
const Topology& Simulation::topology() const { return state_->topology; }
const TokenTable& Simulation::table() const { return state_->controller->table(); }
const policy::SystemModel& Simulation::policy() const { return state_->controller->policy(); }

const TrustWrapper& Simulation::wrapper(std::string_view ip_name) const {
  return *state_->wrappers.find(object_of(ip_name));
}

ObjectId Simulation::object_of(std::string_view ip_name) const {
  auto o = state_->find_object(ip_name);
  if (!o) throw std::out_of_range(fmt::format("unknown IP '{}'", ip_name));
  return *o;
}

ProcessId Simulation::process_of(std::string_view app_name) const {
  auto p = state_->find_process(app_name);
  if (!p) throw std::out_of_range(fmt::format("unknown application '{}'", app_name));
  return *p;
}

UserId Simulation::user_of(std::string_view user_name) const {
  auto it = state_->users.find(user_name);
  if (it == state_->users.end()) throw std::out_of_range(fmt::format("unknown user '{}'", user_name));
  return it->second;
}

IntegrityLevel Simulation::protection_signal(std::string_view ip_name) const {
  return state_->protection.at(object_of(ip_name));
}

}  // namespace trusttoken::sim
