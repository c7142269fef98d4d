#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trusttoken/puf.hpp"
#include "trusttoken/types.hpp"

namespace trusttoken {

/// What one IP is declared with at integration time.
struct IpDeclaration {
  ObjectId object;
  IntegrityLevel level = IntegrityLevel::kHigh;
};

/// Pushed to a wrapper exactly once per provisioning epoch.
struct Credential {
  ObjectId object;
  IpId id;
  Token token;
  std::uint32_t epoch = 0;
};

struct ProvisioningFault {
  ObjectId object;
  puf::Challenge challenge;
  std::string what;
};

struct AuthorizationOutcome {
  std::uint64_t transaction = 0;
  bool granted = false;
  std::uint32_t cycle_cost = 1;
  std::optional<DenialReason> reason;
};

using CredentialSink = std::function<void(const Credential&)>;
using ResponseSource = std::function<puf::Response(puf::Challenge)>;

/// The controller's protected store. Tokens go in at provisioning and are
/// only ever compared afterwards; there is no accessor that returns one.
class TokenTable {
 public:
  TokenTable() = default;

  bool contains(ObjectId object) const { return entries_.contains(object); }
  std::size_t size() const { return entries_.size(); }
  std::vector<ObjectId> objects() const;
  std::uint32_t epoch() const { return epoch_; }
  std::span<const ProvisioningFault> faults() const { return faults_; }

  /// Throws std::out_of_range for an unknown object.
  IntegrityLevel integrity(ObjectId object) const;
  std::optional<IpId> ip_id(ObjectId object) const;

  /// nullopt when (id, token) match the entry for `object`.
  std::optional<DenialReason> check_credentials(ObjectId object, IpId id, const Token& token) const;
  bool token_matches(ObjectId object, const Token& token) const;

  /// Changes the stored level iff `token` matches. Unknown objects are
  /// rejected as malformed. Returns the denial reason, if any.
  std::optional<DenialReason> transition(ObjectId object, const Token& token, IntegrityLevel level);

 private:
  struct Entry {
    IpId id;
    Token token;
    IntegrityLevel level;
    puf::Challenge challenge;
  };

  friend TokenTable provision(const ResponseSource& measure, std::span<const IpDeclaration> ip_list,
                              std::uint64_t master_seed, const CredentialSink& sink,
                              std::uint32_t epoch);

  std::map<ObjectId, Entry> entries_;
  std::vector<ProvisioningFault> faults_;
  std::uint32_t epoch_ = 0;
};

/// Boot-time provisioning: one distinct challenge per IP drawn from
/// `master_seed`, shuffled before assignment; the noiseless PUF response
/// becomes the token. IpIds are assigned 1..n in list order. A token that
/// collides with an earlier one is recorded as a fault and re-drawn.
TokenTable provision(const puf::ChipFingerprint& chip, const puf::PufParams& params,
                     std::span<const IpDeclaration> ip_list, std::uint64_t master_seed,
                     const CredentialSink& sink = {}, std::uint32_t epoch = 0);

/// Same as above with an arbitrary response source.
TokenTable provision(const ResponseSource& measure, std::span<const IpDeclaration> ip_list,
                     std::uint64_t master_seed, const CredentialSink& sink = {},
                     std::uint32_t epoch = 0);

}  // namespace trusttoken
