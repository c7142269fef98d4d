#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "trusttoken/types.hpp"

namespace trusttoken {

/// ar_token (256 bits), ar_id (8 bits), ar_integrity (1 bit).
///
/// Wire encoding, 34 bytes: the token as a 32-byte big-endian integer, then
/// ar_id, then a flags byte whose LSB is ar_integrity (1 = HIGH). The
/// remaining flag bits are zero and must be zero on decode.
struct SidebandSignals {
  static constexpr std::size_t kTokenBytes = 32;
  static constexpr std::size_t kWireBytes = kTokenBytes + 2;

  Token ar_token;
  IpId ar_id;
  IntegrityLevel ar_integrity = IntegrityLevel::kHigh;

  std::array<std::uint8_t, kWireBytes> encode() const;
  /// Throws ParameterError on wrong length or reserved flag bits.
  static SidebandSignals decode(std::span<const std::uint8_t> wire);

  bool operator==(const SidebandSignals&) const = default;
};

struct ProcessEndpoint {
  UserId user;
  ProcessId process;
  bool operator==(const ProcessEndpoint&) const = default;
};

struct IpEndpoint {
  ObjectId object;
  bool operator==(const IpEndpoint&) const = default;
};

using Endpoint = std::variant<ProcessEndpoint, IpEndpoint>;

/// Single-beat APB-like transaction; the address is implied by `target`.
struct WrappedTransaction {
  std::uint64_t id = 0;
  Endpoint source;
  ObjectId target;
  AccessAttribute kind;
  std::vector<std::uint8_t> payload;
  SidebandSignals sideband;
  std::uint64_t issue_cycle = 0;
};

}  // namespace trusttoken
