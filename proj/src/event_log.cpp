#include "trusttoken/event_log.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "trusttoken/errors.hpp"

namespace trusttoken {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kIssue: return "issue";
    case EventKind::kGrant: return "grant";
    case EventKind::kDeny: return "deny";
    case EventKind::kTransition: return "transition";
    case EventKind::kResponse: return "response";
    case EventKind::kReprovision: return "reprovision";
    case EventKind::kAttackFired: return "attack_fired";
    case EventKind::kAttackBlocked: return "attack_blocked";
    case EventKind::kAttackSucceeded: return "attack_succeeded";
  }
  return "unknown";
}

void EventLog::append(EventRecord record) {
  if (!records_.empty() && record.cycle < records_.back().cycle) {
    throw IntegrityFault(fmt::format("event at cycle {} after cycle {}", record.cycle,
                                     records_.back().cycle));
  }
  records_.push_back(std::move(record));
}

std::size_t EventLog::count(EventKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      records_.begin(), records_.end(), [kind](const EventRecord& r) { return r.kind == kind; }));
}

std::string EventLog::format(const EventRecord& r) {
  std::string line = fmt::format("{} {}", r.cycle, to_string(r.kind));
  if (r.reason) line += fmt::format(":{}", to_string(*r.reason));
  line += fmt::format(" actor={}", r.actor);
  if (r.cycle_cost) line += fmt::format(" cost={}", *r.cycle_cost);
  if (!r.scenario.empty()) line += fmt::format(" scenario={}", r.scenario);
  if (!r.detail.empty()) line += fmt::format(" {}", r.detail);
  return line;
}

std::string EventLog::to_text() const {
  std::string out;
  for (const auto& r : records_) {
    out += format(r);
    out += '\n';
  }
  return out;
}

void EventLog::write(std::ostream& out) const { out << to_text(); }

}  // namespace trusttoken
