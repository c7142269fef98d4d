#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trusttoken/types.hpp"

namespace trusttoken {

enum class EventKind {
  kIssue,
  kGrant,
  kDeny,
  kTransition,
  kResponse,
  kReprovision,
  kAttackFired,
  kAttackBlocked,
  kAttackSucceeded,
};

std::string_view to_string(EventKind kind);

struct EventRecord {
  std::uint64_t cycle = 0;
  std::string actor;
  EventKind kind = EventKind::kIssue;
  std::optional<DenialReason> reason;
  std::optional<std::uint32_t> cycle_cost;
  std::string scenario;
  std::string detail;

  bool operator==(const EventRecord&) const = default;
};

/// Append-only, cycle-ordered audit trail.
///
/// Text form, one record per line:
///   <cycle> <kind>[:<reason>] actor=<actor> [cost=<n>] [scenario=<name>] [<detail>]
class EventLog {
 public:
  /// Throws IntegrityFault if the record would move time backwards.
  void append(EventRecord record);

  const std::vector<EventRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t count(EventKind kind) const;

  static std::string format(const EventRecord& record);
  std::string to_text() const;
  void write(std::ostream& out) const;

 private:
  std::vector<EventRecord> records_;
};

}  // namespace trusttoken
