#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trusttoken/token_table.hpp"
#include "trusttoken/transaction.hpp"
#include "trusttoken/types.hpp"

namespace trusttoken {

enum class StubKind { kAes, kDes, kTrng, kRsa, kCustom };

std::string_view to_string(StubKind kind);
std::optional<StubKind> parse_stub_kind(std::string_view text);

/// Deterministic stand-in for an IP core. The transforms are distinguishable
/// in logs and nothing more; none of them is cryptographic.
class IpCoreStub {
 public:
  explicit IpCoreStub(StubKind kind) : kind_(kind) {}

  StubKind kind() const { return kind_; }
  std::vector<std::uint8_t> transform(std::span<const std::uint8_t> payload) const;

 private:
  StubKind kind_;
};

struct DeliveredResponse {
  std::vector<std::uint8_t> payload;
  std::uint64_t ready_cycle = 0;
};

class TrustWrapper {
 public:
  TrustWrapper(IpCoreStub stub, ObjectId object, IntegrityLevel declared_integrity)
      : stub_(stub), object_(object), declared_(declared_integrity) {}

  ObjectId object() const { return object_; }
  IntegrityLevel declared_integrity() const { return declared_; }
  const IpCoreStub& stub() const { return stub_; }

  bool provisioned() const { return credential_.has_value(); }
  std::optional<IpId> ip_id() const;
  std::optional<std::uint32_t> epoch() const;

  /// Boot-time push from the controller. Replaces any earlier credential.
  void accept(const Credential& credential);

  /// The signals this wrapper stamps on every transaction it issues.
  SidebandSignals sideband() const;

  /// Throws ConfigurationError when unprovisioned and ParameterError for an
  /// empty access kind.
  WrappedTransaction issue(Endpoint source, ObjectId target, AccessAttribute kind,
                           std::vector<std::uint8_t> payload, std::uint64_t cycle);

  /// Runs the stub only for a granted outcome that belongs to `txn` and
  /// targets this wrapper. The response becomes visible at
  /// issue_cycle + cycle_cost. Throws IntegrityFault on a mismatch.
  std::optional<DeliveredResponse> deliver(const WrappedTransaction& txn,
                                           const AuthorizationOutcome& outcome);

  std::uint64_t stub_invocations() const { return invocations_; }

 private:
  IpCoreStub stub_;
  ObjectId object_;
  IntegrityLevel declared_;
  std::optional<Credential> credential_;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t invocations_ = 0;
};

/// Owns every wrapper in one simulation and guards against double wrapping.
class WrapperRegistry {
 public:
  /// Throws ConfigurationError when `object` is already wrapped.
  TrustWrapper& wrap(IpCoreStub stub, ObjectId object, IntegrityLevel declared_integrity);

  TrustWrapper* find(ObjectId object);
  const TrustWrapper* find(ObjectId object) const;

  const std::deque<TrustWrapper>& wrappers() const { return wrappers_; }
  std::vector<IpDeclaration> declarations() const;

  /// Routes a controller push to the owning wrapper. Usable as a CredentialSink.
  void accept(const Credential& credential);

 private:
  std::deque<TrustWrapper> wrappers_;
};

}  // namespace trusttoken
