#pragma once

#include <bitset>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "trusttoken/puf.hpp"

namespace trusttoken {

struct UserId {
  std::uint8_t index = 0;
  auto operator<=>(const UserId&) const = default;
};

/// A process always belongs to exactly one user.
struct ProcessId {
  UserId owner;
  std::uint8_t index = 0;
  auto operator<=>(const ProcessId&) const = default;
};

/// One untrusted IP core.
struct ObjectId {
  std::uint8_t index = 0;
  auto operator<=>(const ObjectId&) const = default;
};

/// ar_id: controller-assigned identifier of a wrapped IP.
struct IpId {
  std::uint8_t value = 0;
  auto operator<=>(const IpId&) const = default;
};

/// ar_token: 256-bit PUF-derived secret. Bit i carries weight 2^i when the
/// token is read as an unsigned integer.
struct Token {
  puf::Bits bits;

  static Token from_response(const puf::Response& r) { return Token{r.bits}; }
  bool operator==(const Token&) const = default;
};

/// 3-bit r/w/e attribute: a2 -> read, a1 -> write, a0 -> execute.
class AccessAttribute {
 public:
  static constexpr std::uint8_t kRead = 0b100;
  static constexpr std::uint8_t kWrite = 0b010;
  static constexpr std::uint8_t kExecute = 0b001;

  constexpr AccessAttribute() = default;
  constexpr explicit AccessAttribute(std::uint8_t bits) : bits_(bits & 0b111) {}

  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool read() const { return (bits_ & kRead) != 0; }
  constexpr bool write() const { return (bits_ & kWrite) != 0; }
  constexpr bool execute() const { return (bits_ & kExecute) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

  /// Every bit requested in `other` is present here.
  constexpr bool covers(AccessAttribute other) const { return (other.bits_ & ~bits_) == 0; }

  constexpr bool operator==(const AccessAttribute&) const = default;

  /// "rw-" style rendering.
  std::string to_string() const;
  /// Accepts "rwe" style strings (dashes allowed) or a 0b-prefixed binary literal.
  static std::optional<AccessAttribute> parse(std::string_view text);

 private:
  std::uint8_t bits_ = 0;
};

enum class IntegrityLevel : std::uint8_t { kLow = 0, kHigh = 1 };

enum class DenialReason {
  kTokenMismatch,
  kIdMismatch,
  kMatrixDeny,
  kForeignProcess,
  kMalformed,
  kMatrixTamper,
};

std::string_view to_string(IntegrityLevel level);
std::optional<IntegrityLevel> parse_integrity(std::string_view text);
std::string_view to_string(DenialReason reason);

}  // namespace trusttoken
