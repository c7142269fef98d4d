#include "trusttoken/token_table.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "trusttoken/errors.hpp"
#include "trusttoken/seeding.hpp"

namespace trusttoken {

namespace {
constexpr int kMaxRedraws = 64;
}

std::vector<ObjectId> TokenTable::objects() const {
  std::vector<ObjectId> out;
  out.reserve(entries_.size());
  for (const auto& [object, entry] : entries_) out.push_back(object);
  return out;
}

IntegrityLevel TokenTable::integrity(ObjectId object) const {
  auto it = entries_.find(object);
  if (it == entries_.end()) {
    throw std::out_of_range(fmt::format("object {} is not provisioned", object.index));
  }
  return it->second.level;
}

std::optional<IpId> TokenTable::ip_id(ObjectId object) const {
  auto it = entries_.find(object);
  if (it == entries_.end()) return std::nullopt;
  return it->second.id;
}

std::optional<DenialReason> TokenTable::check_credentials(ObjectId object, IpId id,
                                                          const Token& token) const {
  auto it = entries_.find(object);
  if (it == entries_.end()) return DenialReason::kMalformed;
  if (it->second.id != id) return DenialReason::kIdMismatch;
  if (it->second.token != token) return DenialReason::kTokenMismatch;
  return std::nullopt;
}

bool TokenTable::token_matches(ObjectId object, const Token& token) const {
  auto it = entries_.find(object);
  return it != entries_.end() && it->second.token == token;
}

std::optional<DenialReason> TokenTable::transition(ObjectId object, const Token& token,
                                                   IntegrityLevel level) {
  auto it = entries_.find(object);
  if (it == entries_.end()) return DenialReason::kMalformed;
  if (it->second.token != token) return DenialReason::kTokenMismatch;
  it->second.level = level;
  return std::nullopt;
}

TokenTable provision(const ResponseSource& measure, std::span<const IpDeclaration> ip_list,
                     std::uint64_t master_seed, const CredentialSink& sink, std::uint32_t epoch) {
  if (ip_list.empty()) throw ProvisioningError("no IPs to provision");
  if (ip_list.size() > 255) throw ProvisioningError("ar_id space exhausted (max 255 IPs)");
  {
    std::set<ObjectId> seen;
    for (const auto& ip : ip_list) {
      if (!seen.insert(ip.object).second) {
        throw ProvisioningError(fmt::format("object {} listed twice", ip.object.index));
      }
    }
  }

  auto eng = make_engine(StreamTag::kProvisioning, {master_seed, epoch});
  boost::random::uniform_int_distribution<std::uint32_t> pick_challenge(0, 0xffff);
  std::set<std::uint16_t> used;
  auto fresh_challenge = [&] {
    for (;;) {
      auto v = static_cast<std::uint16_t>(pick_challenge(eng));
      if (used.insert(v).second) return puf::Challenge{v};
    }
  };

  std::vector<puf::Challenge> challenges;
  challenges.reserve(ip_list.size());
  for (std::size_t i = 0; i < ip_list.size(); ++i) challenges.push_back(fresh_challenge());
  for (std::size_t i = challenges.size() - 1; i > 0; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(challenges[i], challenges[pick(eng)]);
  }

  TokenTable table;
  table.epoch_ = epoch;
  std::vector<Token> issued;
  for (std::size_t i = 0; i < ip_list.size(); ++i) {
    const auto& ip = ip_list[i];
    auto challenge = challenges[i];
    auto token = Token::from_response(measure(challenge));
    int redraws = 0;
    while (std::find(issued.begin(), issued.end(), token) != issued.end()) {
      table.faults_.push_back({ip.object, challenge, "token collision"});
      if (++redraws > kMaxRedraws) {
        throw ProvisioningError(fmt::format("could not draw a unique token for object {}",
                                            ip.object.index));
      }
      challenge = fresh_challenge();
      token = Token::from_response(measure(challenge));
    }
    issued.push_back(token);
    IpId id{static_cast<std::uint8_t>(i + 1)};
    table.entries_.emplace(ip.object, TokenTable::Entry{id, token, ip.level, challenge});
    if (sink) sink(Credential{ip.object, id, token, epoch});
  }
  return table;
}

TokenTable provision(const puf::ChipFingerprint& chip, const puf::PufParams& params,
                     std::span<const IpDeclaration> ip_list, std::uint64_t master_seed,
                     const CredentialSink& sink, std::uint32_t epoch) {
  params.validate();
  return provision(
      [&](puf::Challenge c) { return puf::reference_response(chip, c, params); }, ip_list,
      master_seed, sink, epoch);
}

}  // namespace trusttoken
