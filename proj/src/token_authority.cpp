#include "trusttoken/token_authority.hpp"

#include <fmt/format.h>

#include "trusttoken/errors.hpp"

namespace trusttoken {

AuthorizationOutcome authorize(const TokenTable& table, const WrappedTransaction& txn,
                               const policy::SystemModel& policy, HandshakeCosts costs) {
  AuthorizationOutcome out;
  out.transaction = txn.id;
  if (!table.contains(txn.target)) {
    out.cycle_cost = costs.low;
    out.reason = DenialReason::kMalformed;
    return out;
  }
  if (table.integrity(txn.target) == IntegrityLevel::kLow) {
    out.cycle_cost = costs.low;
    out.granted = true;
    return out;
  }

  out.cycle_cost = costs.high;
  const auto& sb = txn.sideband;
  if (auto bad = table.check_credentials(txn.target, sb.ar_id, sb.ar_token)) {
    out.reason = *bad;
    return out;
  }
  const auto* src = std::get_if<ProcessEndpoint>(&txn.source);
  if (src == nullptr) {
    out.reason = DenialReason::kMalformed;
    return out;
  }
  policy::AccessRequest request{src->user, src->process, txn.target,
                                sb.ar_token, sb.ar_id,   txn.kind};
  auto decision = policy::evaluate(policy, request, table);
  out.granted = decision.granted();
  out.reason = decision.reason;
  return out;
}

AuthorizationOutcome request_integrity_transition(TokenTable& table, ObjectId object,
                                                  const Token& presented, IntegrityLevel level,
                                                  HandshakeCosts costs) {
  AuthorizationOutcome out;
  out.cycle_cost = costs.high;
  out.reason = table.transition(object, presented, level);
  out.granted = !out.reason.has_value();
  return out;
}

IntegrityLevel lookup_integrity(const TokenTable& table, ObjectId object) {
  return table.integrity(object);
}

TrustTokenController::TrustTokenController(TokenTable table, policy::SystemModel policy,
                                           EventLog& audit, HandshakeCosts costs)
    : table_(std::move(table)), policy_(std::move(policy)), audit_(&audit), costs_(costs) {
  if (costs_.low < 1 || costs_.high < 1) throw ParameterError("handshake costs must be >= 1");
}

void TrustTokenController::record_verdict(const AuthorizationOutcome& outcome,
                                          std::uint64_t cycle, std::string_view actor,
                                          std::string_view scenario, std::string detail) {
  EventRecord r;
  r.cycle = cycle;
  r.actor = std::string(actor);
  r.kind = outcome.granted ? EventKind::kGrant : EventKind::kDeny;
  r.reason = outcome.reason;
  r.cycle_cost = outcome.cycle_cost;
  r.scenario = std::string(scenario);
  r.detail = std::move(detail);
  audit_->append(std::move(r));
}

AuthorizationOutcome TrustTokenController::authorize(const WrappedTransaction& txn,
                                                     std::uint64_t cycle, std::string_view actor,
                                                     std::string_view scenario) {
  auto out = trusttoken::authorize(table_, txn, policy_, costs_);
  record_verdict(out, cycle, actor, scenario, fmt::format("txn={:#x} target={}", txn.id,
                                                          txn.target.index));
  return out;
}

AuthorizationOutcome TrustTokenController::request_integrity_transition(
    ObjectId object, const Token& presented, IntegrityLevel level, std::uint64_t cycle,
    std::string_view actor, std::string_view scenario) {
  std::optional<IntegrityLevel> before;
  if (table_.contains(object)) before = table_.integrity(object);
  auto out = trusttoken::request_integrity_transition(table_, object, presented, level, costs_);
  record_verdict(out, cycle, actor, scenario,
                 fmt::format("integrity target={} level={}", object.index, to_string(level)));
  if (out.granted) {
    EventRecord r;
    r.cycle = cycle;
    r.actor = "controller";
    r.kind = EventKind::kTransition;
    r.scenario = std::string(scenario);
    r.detail = fmt::format("target={} {}->{}", object.index, to_string(*before), to_string(level));
    audit_->append(std::move(r));
  }
  return out;
}

bool TrustTokenController::modify_matrix(policy::Actor who, UserId user, ProcessId process,
                                         ObjectId object, AccessAttribute attribute,
                                         std::uint64_t cycle, std::string_view actor,
                                         std::string_view scenario) {
  AuthorizationOutcome out;
  out.cycle_cost = costs_.high;
  auto detail = fmt::format("matrix user={} process={} object={} attr={}", user.index,
                            process.index, object.index, attribute.to_string());
  try {
    policy_ = policy::modify_matrix(policy_, who, user, process, object, attribute);
    out.granted = true;
  } catch (const MatrixTamperError&) {
    out.reason = DenialReason::kMatrixTamper;
  } catch (const ConfigurationError&) {
    out.reason = DenialReason::kMalformed;
  }
  record_verdict(out, cycle, actor, scenario, std::move(detail));
  return out.granted;
}

bool TrustTokenController::write_table_entry(std::uint64_t cycle, std::string_view actor,
                                             std::string_view scenario) {
  AuthorizationOutcome out;
  out.cycle_cost = costs_.high;
  out.reason = DenialReason::kMatrixTamper;
  record_verdict(out, cycle, actor, scenario, "token_table write");
  return false;
}

void TrustTokenController::reprovision(TokenTable fresh, std::uint64_t cycle) {
  table_ = std::move(fresh);
  EventRecord r;
  r.cycle = cycle;
  r.actor = "controller";
  r.kind = EventKind::kReprovision;
  r.detail = fmt::format("epoch={}", table_.epoch());
  audit_->append(std::move(r));
}

IntegrityLevel TrustTokenController::lookup_integrity(ObjectId object) const {
  return table_.integrity(object);
}

}  // namespace trusttoken
