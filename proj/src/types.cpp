#include "trusttoken/types.hpp"

namespace trusttoken {

std::string AccessAttribute::to_string() const {
  std::string s = "---";
  if (read()) s[0] = 'r';
  if (write()) s[1] = 'w';
  if (execute()) s[2] = 'e';
  return s;
}

std::optional<AccessAttribute> AccessAttribute::parse(std::string_view text) {
  if (text.starts_with("0b")) {
    text.remove_prefix(2);
    if (text.empty() || text.size() > 3) return std::nullopt;
    std::uint8_t v = 0;
    for (char c : text) {
      if (c != '0' && c != '1') return std::nullopt;
      v = static_cast<std::uint8_t>((v << 1) | (c - '0'));
    }
    return AccessAttribute(v);
  }
  if (text.empty()) return std::nullopt;
  std::uint8_t v = 0;
  for (char c : text) {
    switch (c) {
      case 'r': v |= kRead; break;
      case 'w': v |= kWrite; break;
      case 'e':
      case 'x': v |= kExecute; break;
      case '-': break;
      default: return std::nullopt;
    }
  }
  return AccessAttribute(v);
}

std::string_view to_string(IntegrityLevel level) {
  return level == IntegrityLevel::kHigh ? "HIGH" : "LOW";
}

std::optional<IntegrityLevel> parse_integrity(std::string_view text) {
  if (text == "HIGH" || text == "high") return IntegrityLevel::kHigh;
  if (text == "LOW" || text == "low") return IntegrityLevel::kLow;
  return std::nullopt;
}

std::string_view to_string(DenialReason reason) {
  switch (reason) {
    case DenialReason::kTokenMismatch: return "token_mismatch";
    case DenialReason::kIdMismatch: return "id_mismatch";
    case DenialReason::kMatrixDeny: return "matrix_deny";
    case DenialReason::kForeignProcess: return "foreign_process";
    case DenialReason::kMalformed: return "malformed";
    case DenialReason::kMatrixTamper: return "matrix_tamper";
  }
  return "unknown";
}

}  // namespace trusttoken
