#include "trusttoken/trust_wrapper.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "trusttoken/errors.hpp"

namespace trusttoken {

// Sideband wire format -------------------------------------------------------

std::array<std::uint8_t, SidebandSignals::kWireBytes> SidebandSignals::encode() const {
  std::array<std::uint8_t, kWireBytes> wire{};
  for (std::size_t byte = 0; byte < kTokenBytes; ++byte) {
    // wire[0] holds token bits 255..248.
    std::size_t low_bit = (kTokenBytes - 1 - byte) * 8;
    std::uint8_t v = 0;
    for (std::size_t b = 0; b < 8; ++b) {
      if (ar_token.bits[low_bit + b]) v |= static_cast<std::uint8_t>(1u << b);
    }
    wire[byte] = v;
  }
  wire[kTokenBytes] = ar_id.value;
  wire[kTokenBytes + 1] = ar_integrity == IntegrityLevel::kHigh ? 0x01 : 0x00;
  return wire;
}

SidebandSignals SidebandSignals::decode(std::span<const std::uint8_t> wire) {
  if (wire.size() != kWireBytes) {
    throw ParameterError(fmt::format("sideband must be {} bytes, got {}", kWireBytes, wire.size()));
  }
  std::uint8_t flags = wire[kTokenBytes + 1];
  if ((flags & 0xfe) != 0) throw ParameterError("reserved sideband flag bits set");

  SidebandSignals s;
  for (std::size_t byte = 0; byte < kTokenBytes; ++byte) {
    std::size_t low_bit = (kTokenBytes - 1 - byte) * 8;
    for (std::size_t b = 0; b < 8; ++b) s.ar_token.bits[low_bit + b] = (wire[byte] >> b) & 1u;
  }
  s.ar_id = IpId{wire[kTokenBytes]};
  s.ar_integrity = (flags & 1u) ? IntegrityLevel::kHigh : IntegrityLevel::kLow;
  return s;
}

// Stubs ----------------------------------------------------------------------

std::string_view to_string(StubKind kind) {
  switch (kind) {
    case StubKind::kAes: return "AES";
    case StubKind::kDes: return "DES";
    case StubKind::kTrng: return "TRNG";
    case StubKind::kRsa: return "RSA";
    case StubKind::kCustom: return "custom";
  }
  return "custom";
}

std::optional<StubKind> parse_stub_kind(std::string_view text) {
  for (auto k : {StubKind::kAes, StubKind::kDes, StubKind::kTrng, StubKind::kRsa,
                 StubKind::kCustom}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace {

std::uint8_t rotl8(std::uint8_t v, unsigned n) {
  return static_cast<std::uint8_t>((v << n) | (v >> (8 - n)));
}

// (b + 1)^3 mod 257 - 1 permutes 0..255 since gcd(3, 256) = 1.
std::uint8_t cube_mod_257(std::uint8_t b) {
  unsigned x = b + 1u;
  unsigned y = (x * x) % 257u;
  y = (y * x) % 257u;
  return static_cast<std::uint8_t>(y - 1u);
}

}  // namespace

std::vector<std::uint8_t> IpCoreStub::transform(std::span<const std::uint8_t> payload) const {
  std::vector<std::uint8_t> out(payload.begin(), payload.end());
  switch (kind_) {
    case StubKind::kAes:
      for (auto& b : out) b = static_cast<std::uint8_t>(b * 167u + 13u);
      break;
    case StubKind::kDes:
      for (auto& b : out) b = rotl8(b, 3);
      std::reverse(out.begin(), out.end());
      break;
    case StubKind::kTrng: {
      // Payload acts as the seed; at least one 16-byte block comes back.
      std::vector<std::uint32_t> seed(payload.begin(), payload.end());
      seed.push_back(0x74726e67u);
      std::seed_seq seq(seed.begin(), seed.end());
      std::mt19937 eng(seq);
      out.resize(std::max<std::size_t>(16, payload.size()));
      for (auto& b : out) b = static_cast<std::uint8_t>(eng() >> 24);
      break;
    }
    case StubKind::kRsa:
      for (auto& b : out) b = cube_mod_257(b);
      break;
    case StubKind::kCustom:
      break;
  }
  return out;
}

// Wrapper ----------------------------------------------------------------------

std::optional<IpId> TrustWrapper::ip_id() const {
  if (!credential_) return std::nullopt;
  return credential_->id;
}

std::optional<std::uint32_t> TrustWrapper::epoch() const {
  if (!credential_) return std::nullopt;
  return credential_->epoch;
}

void TrustWrapper::accept(const Credential& credential) {
  if (credential.object != object_) {
    throw IntegrityFault(fmt::format("credential for object {} pushed to wrapper of object {}",
                                     credential.object.index, object_.index));
  }
  credential_ = credential;
}

SidebandSignals TrustWrapper::sideband() const {
  if (!credential_) {
    throw ConfigurationError(fmt::format("wrapper of object {} is not provisioned", object_.index));
  }
  return {credential_->token, credential_->id, declared_};
}

WrappedTransaction TrustWrapper::issue(Endpoint source, ObjectId target, AccessAttribute kind,
                                       std::vector<std::uint8_t> payload, std::uint64_t cycle) {
  if (kind.empty()) throw ParameterError("transaction kind needs at least one access bit");
  WrappedTransaction txn;
  txn.sideband = sideband();
  txn.id = (static_cast<std::uint64_t>(object_.index) + 1) << 32 | next_sequence_++;
  txn.source = source;
  txn.target = target;
  txn.kind = kind;
  txn.payload = std::move(payload);
  txn.issue_cycle = cycle;
  return txn;
}

std::optional<DeliveredResponse> TrustWrapper::deliver(const WrappedTransaction& txn,
                                                       const AuthorizationOutcome& outcome) {
  if (outcome.transaction != txn.id) {
    throw IntegrityFault(fmt::format("outcome for transaction {:#x} applied to {:#x}",
                                     outcome.transaction, txn.id));
  }
  if (txn.target != object_) {
    throw IntegrityFault(fmt::format("transaction for object {} delivered to object {}",
                                     txn.target.index, object_.index));
  }
  if (!outcome.granted) return std::nullopt;
  ++invocations_;
  return DeliveredResponse{stub_.transform(txn.payload), txn.issue_cycle + outcome.cycle_cost};
}

// Registry ---------------------------------------------------------------------

TrustWrapper& WrapperRegistry::wrap(IpCoreStub stub, ObjectId object,
                                    IntegrityLevel declared_integrity) {
  if (find(object) != nullptr) {
    throw ConfigurationError(fmt::format("object {} is already wrapped", object.index));
  }
  return wrappers_.emplace_back(stub, object, declared_integrity);
}

TrustWrapper* WrapperRegistry::find(ObjectId object) {
  for (auto& w : wrappers_) {
    if (w.object() == object) return &w;
  }
  return nullptr;
}

const TrustWrapper* WrapperRegistry::find(ObjectId object) const {
  for (const auto& w : wrappers_) {
    if (w.object() == object) return &w;
  }
  return nullptr;
}

std::vector<IpDeclaration> WrapperRegistry::declarations() const {
  std::vector<IpDeclaration> out;
  out.reserve(wrappers_.size());
  for (const auto& w : wrappers_) out.push_back({w.object(), w.declared_integrity()});
  return out;
}

void WrapperRegistry::accept(const Credential& credential) {
  auto* w = find(credential.object);
  if (w == nullptr) {
    throw IntegrityFault(fmt::format("credential for unwrapped object {}", credential.object.index));
  }
  w->accept(credential);
}

}  // namespace trusttoken
