#include <json.hpp>

#include "trusttoken/soc_sim.hpp"

namespace trusttoken::sim {

bool SummaryReport::any_breached() const {
  for (const auto& [name, verdict] : scenarios) {
    if (verdict == ScenarioVerdict::kBreached) return true;
  }
  return false;
}

std::string SummaryReport::to_json() const {
  nlohmann::json j;
  j["records"] = records;
  j["issues"] = issues;
  j["grants"] = grants;
  j["denies"] = denies;
  j["responses"] = responses;
  j["attacks"] = {{"fired", attacks_fired},
                  {"blocked", attacks_blocked},
                  {"succeeded", attacks_succeeded}};
  j["denies_by_reason"] = nlohmann::json::object();
  for (const auto& [reason, n] : denies_by_reason) j["denies_by_reason"][reason] = n;
  j["scenarios"] = nlohmann::json::object();
  for (const auto& [name, verdict] : scenarios) {
    j["scenarios"][name] = std::string(to_string(verdict));
  }
  j["cycle_cost_histogram"] = nlohmann::json::object();
  for (const auto& [cost, n] : cycle_cost_histogram) {
    j["cycle_cost_histogram"][std::to_string(cost)] = n;
  }
  return j.dump(2);
}

SummaryReport report(const EventLog& log) {
  SummaryReport r;
  r.records = log.size();
  for (const auto& rec : log.records()) {
    switch (rec.kind) {
      case EventKind::kIssue: ++r.issues; break;
      case EventKind::kGrant: ++r.grants; break;
      case EventKind::kDeny:
        ++r.denies;
        ++r.denies_by_reason[std::string(to_string(rec.reason.value_or(DenialReason::kMalformed)))];
        break;
      case EventKind::kResponse: ++r.responses; break;
      case EventKind::kAttackFired:
        ++r.attacks_fired;
        r.scenarios.try_emplace(rec.scenario, ScenarioVerdict::kBlocked);
        break;
      case EventKind::kAttackBlocked: ++r.attacks_blocked; break;
      case EventKind::kAttackSucceeded:
        ++r.attacks_succeeded;
        r.scenarios[rec.scenario] = ScenarioVerdict::kBreached;
        break;
      case EventKind::kTransition:
      case EventKind::kReprovision: break;
    }
    if ((rec.kind == EventKind::kGrant || rec.kind == EventKind::kDeny) && rec.cycle_cost) {
      ++r.cycle_cost_histogram[*rec.cycle_cost];
    }
  }
  return r;
}

}  // namespace trusttoken::sim
