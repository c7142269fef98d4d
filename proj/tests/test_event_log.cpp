#include <gtest/gtest.h>

#include <sstream>

#include "trusttoken/errors.hpp"
#include "trusttoken/event_log.hpp"

namespace {

using namespace trusttoken;

TEST(EventLog, FormatsAllFields) {
  EventRecord r{12, "App3", EventKind::kDeny, DenialReason::kIdMismatch, 2u, "scenario1",
                "txn=0x1"};
  EXPECT_EQ(EventLog::format(r), "12 deny:id_mismatch actor=App3 cost=2 scenario=scenario1 txn=0x1");
}

TEST(EventLog, FormatsMinimalRecord) {
  EventRecord r{0, "controller", EventKind::kReprovision, std::nullopt, std::nullopt, "", ""};
  EXPECT_EQ(EventLog::format(r), "0 reprovision actor=controller");
}

TEST(EventLog, RejectsTimeGoingBackwards) {
  EventLog log;
  log.append({5, "a", EventKind::kIssue, {}, {}, "", ""});
  log.append({5, "a", EventKind::kGrant, {}, 2u, "", ""});
  EXPECT_THROW(log.append({4, "a", EventKind::kIssue, {}, {}, "", ""}), IntegrityFault);
  EXPECT_EQ(log.size(), 2u);
}

TEST(EventLog, CountsAndText) {
  EventLog log;
  log.append({1, "a", EventKind::kIssue, {}, {}, "", ""});
  log.append({1, "a", EventKind::kDeny, DenialReason::kMalformed, 1u, "", ""});
  log.append({2, "a", EventKind::kIssue, {}, {}, "", ""});
  EXPECT_EQ(log.count(EventKind::kIssue), 2u);
  EXPECT_EQ(log.count(EventKind::kDeny), 1u);
  std::ostringstream os;
  log.write(os);
  EXPECT_EQ(os.str(), log.to_text());
  EXPECT_EQ(log.to_text(), "1 issue actor=a\n1 deny:malformed actor=a cost=1\n2 issue actor=a\n");
}

TEST(EventKind, NamesAreStable) {
  EXPECT_EQ(to_string(EventKind::kAttackSucceeded), "attack_succeeded");
  EXPECT_EQ(to_string(EventKind::kAttackBlocked), "attack_blocked");
  EXPECT_EQ(to_string(DenialReason::kMatrixTamper), "matrix_tamper");
  EXPECT_EQ(to_string(DenialReason::kForeignProcess), "foreign_process");
}

}  // namespace
