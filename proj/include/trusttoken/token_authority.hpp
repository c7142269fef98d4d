#pragma once

#include <cstdint>
#include <string_view>

#include "trusttoken/event_log.hpp"
#include "trusttoken/policy.hpp"
#include "trusttoken/token_table.hpp"
#include "trusttoken/transaction.hpp"

namespace trusttoken {

/// Authorization handshake cost in cycles. LOW-integrity targets pass
/// straight through; HIGH-integrity targets need request + verdict.
struct HandshakeCosts {
  std::uint32_t low = 1;
  std::uint32_t high = 2;
};

/// Pure authorization decision for one transaction.
///
/// Unknown target: denied as malformed. LOW target: granted at the low cost
/// with no checks at all. HIGH target: (ar_id, ar_token) must match the table
/// entry for the target, then the policy engine must say yes for the request
/// embedded in the transaction. IP-sourced transactions carry no user or
/// process and cannot pass the policy check.
AuthorizationOutcome authorize(const TokenTable& table, const WrappedTransaction& txn,
                               const policy::SystemModel& policy, HandshakeCosts costs = {});

/// Level changes only when `presented` matches the stored token.
AuthorizationOutcome request_integrity_transition(TokenTable& table, ObjectId object,
                                                  const Token& presented, IntegrityLevel level,
                                                  HandshakeCosts costs = {});

/// Throws std::out_of_range for an unknown object.
IntegrityLevel lookup_integrity(const TokenTable& table, ObjectId object);

/// The central controller: owns the token table and the policy model and
/// writes one verdict record (grant or deny) per request to the audit log.
/// The matching issue record is the caller's responsibility.
class TrustTokenController {
 public:
  TrustTokenController(TokenTable table, policy::SystemModel policy, EventLog& audit,
                       HandshakeCosts costs = {});

  AuthorizationOutcome authorize(const WrappedTransaction& txn, std::uint64_t cycle,
                                 std::string_view actor, std::string_view scenario = {});

  AuthorizationOutcome request_integrity_transition(ObjectId object, const Token& presented,
                                                    IntegrityLevel level, std::uint64_t cycle,
                                                    std::string_view actor,
                                                    std::string_view scenario = {});

  /// Applies a matrix edit only for the controller, or the integrator before
  /// sealing. Returns whether it was applied.
  bool modify_matrix(policy::Actor who, UserId user, ProcessId process, ObjectId object,
                     AccessAttribute attribute, std::uint64_t cycle, std::string_view actor,
                     std::string_view scenario = {});

  /// Any request to overwrite table contents from outside is refused; the
  /// table is written only by provisioning.
  bool write_table_entry(std::uint64_t cycle, std::string_view actor,
                         std::string_view scenario = {});

  /// Installs a freshly provisioned table for the next epoch. Tokens of
  /// earlier epochs stop matching.
  void reprovision(TokenTable fresh, std::uint64_t cycle);

  IntegrityLevel lookup_integrity(ObjectId object) const;
  const TokenTable& table() const { return table_; }
  const policy::SystemModel& policy() const { return policy_; }
  HandshakeCosts costs() const { return costs_; }
  void seal() { policy_ = policy_.seal(); }

 private:
  void record_verdict(const AuthorizationOutcome& outcome, std::uint64_t cycle,
                      std::string_view actor, std::string_view scenario, std::string detail);

  TokenTable table_;
  policy::SystemModel policy_;
  EventLog* audit_;
  HandshakeCosts costs_;
};

}  // namespace trusttoken
