#include <gtest/gtest.h>

#include <map>
#include <set>
#include <vector>

#include "trusttoken/errors.hpp"
#include "trusttoken/token_authority.hpp"

namespace {

using namespace trusttoken;

constexpr UserId kU0{0};
constexpr ProcessId kP0{kU0, 0};

std::vector<IpDeclaration> four_ips(IntegrityLevel level = IntegrityLevel::kHigh) {
  return {{ObjectId{0}, level}, {ObjectId{1}, level}, {ObjectId{2}, level}, {ObjectId{3}, level}};
}

struct Provisioned {
  TokenTable table;
  std::map<std::uint8_t, Credential> creds;  // by object index
};

Provisioned provision_four(std::uint64_t seed, IntegrityLevel level = IntegrityLevel::kHigh) {
  puf::PufParams params;
  auto chip = puf::new_chip(seed, params);
  Provisioned p;
  auto decls = four_ips(level);
  p.table = provision(chip, params, decls, seed,
                      [&](const Credential& c) { p.creds[c.object.index] = c; });
  return p;
}

// One user with one process that may use every object fully.
policy::SystemModel open_policy() {
  policy::AccessMatrix m(kU0, 1, 4);
  for (std::size_t o = 0; o < 4; ++o) m.set(0, o, AccessAttribute(0b111));
  return policy::build_system({kU0}, {kP0},
                              {ObjectId{0}, ObjectId{1}, ObjectId{2}, ObjectId{3}}, {m});
}

WrappedTransaction txn_for(const Credential& c, ObjectId target,
                           AccessAttribute kind = AccessAttribute(AccessAttribute::kRead)) {
  WrappedTransaction t;
  t.id = 77;
  t.source = ProcessEndpoint{kU0, kP0};
  t.target = target;
  t.kind = kind;
  t.sideband = SidebandSignals{c.token, c.id, IntegrityLevel::kHigh};
  return t;
}

TEST(Provision, FourIpsGetDistinctTokensAndIds) {
  auto p = provision_four(1);
  ASSERT_EQ(p.table.size(), 4u);
  ASSERT_EQ(p.creds.size(), 4u);
  std::set<std::uint8_t> ids;
  for (auto& [o, c] : p.creds) {
    ids.insert(c.id.value);
    for (auto& [o2, c2] : p.creds)
      if (o != o2) {
        EXPECT_FALSE(c.token == c2.token);
      }
    EXPECT_EQ(p.table.ip_id(ObjectId{o}), c.id);
    EXPECT_TRUE(p.table.token_matches(ObjectId{o}, c.token));
  }
  EXPECT_EQ(ids, (std::set<std::uint8_t>{1, 2, 3, 4}));
  EXPECT_TRUE(p.table.faults().empty());
}

TEST(Provision, DeterministicForSeed) {
  auto a = provision_four(5);
  auto b = provision_four(5);
  for (std::uint8_t o = 0; o < 4; ++o) EXPECT_EQ(a.creds[o].token, b.creds[o].token);
  auto c = provision_four(6);
  EXPECT_FALSE(a.creds[0].token == c.creds[0].token);
}

TEST(Provision, EmptyListRejected) {
  puf::PufParams params;
  auto chip = puf::new_chip(1, params);
  std::vector<IpDeclaration> none;
  EXPECT_THROW(provision(chip, params, none, 1), ProvisioningError);
}

TEST(Provision, DuplicateObjectRejected) {
  puf::PufParams params;
  auto chip = puf::new_chip(1, params);
  std::vector<IpDeclaration> dup{{ObjectId{0}, IntegrityLevel::kHigh},
                                 {ObjectId{0}, IntegrityLevel::kLow}};
  EXPECT_THROW(provision(chip, params, dup, 1), ProvisioningError);
}

TEST(Provision, TokenCollisionIsRecordedAndRedrawn) {
  // The first two measurements return the same response; later ones differ.
  int calls = 0;
  ResponseSource source = [&](puf::Challenge c) {
    puf::Response r;
    if (calls++ >= 2) r.bits = puf::Bits(c.value) << 7 | puf::Bits(calls);
    return r;
  };
  std::vector<IpDeclaration> two{{ObjectId{0}, IntegrityLevel::kHigh},
                                 {ObjectId{1}, IntegrityLevel::kHigh}};
  std::vector<Credential> pushed;
  auto table = provision(source, two, 9, [&](const Credential& c) { pushed.push_back(c); });
  ASSERT_EQ(table.faults().size(), 1u);
  EXPECT_EQ(table.faults()[0].object, ObjectId{1});
  ASSERT_EQ(pushed.size(), 2u);
  EXPECT_FALSE(pushed[0].token == pushed[1].token);
}

TEST(Provision, PersistentCollisionGivesUp) {
  ResponseSource constant = [](puf::Challenge) { return puf::Response{}; };
  std::vector<IpDeclaration> two{{ObjectId{0}, IntegrityLevel::kHigh},
                                 {ObjectId{1}, IntegrityLevel::kHigh}};
  EXPECT_THROW(provision(constant, two, 1), ProvisioningError);
}

TEST(Authorize, ValidTransactionGranted) {
  auto p = provision_four(1);
  auto out = authorize(p.table, txn_for(p.creds[2], ObjectId{2}), open_policy());
  EXPECT_TRUE(out.granted);
  EXPECT_EQ(out.cycle_cost, 2u);
  EXPECT_EQ(out.transaction, 77u);
  EXPECT_FALSE(out.reason.has_value());
}

TEST(Authorize, ForgedTokenDenied) {
  auto p = provision_four(1);
  auto t = txn_for(p.creds[2], ObjectId{2});
  t.sideband.ar_token.bits.flip(200);
  auto out = authorize(p.table, t, open_policy());
  EXPECT_FALSE(out.granted);
  EXPECT_EQ(out.reason, DenialReason::kTokenMismatch);
}

TEST(Authorize, CrossedIdsDenied) {
  auto p = provision_four(1);
  // Credentials of object 1 presented against object 3.
  auto out = authorize(p.table, txn_for(p.creds[1], ObjectId{3}), open_policy());
  EXPECT_FALSE(out.granted);
  EXPECT_EQ(out.reason, DenialReason::kIdMismatch);
}

TEST(Authorize, UnknownTargetIsMalformed) {
  auto p = provision_four(1);
  auto out = authorize(p.table, txn_for(p.creds[0], ObjectId{9}), open_policy());
  EXPECT_FALSE(out.granted);
  EXPECT_EQ(out.reason, DenialReason::kMalformed);
}

TEST(Authorize, IpSourcedTransactionCannotPassPolicy) {
  auto p = provision_four(1);
  auto t = txn_for(p.creds[0], ObjectId{0});
  t.source = IpEndpoint{ObjectId{1}};
  auto out = authorize(p.table, t, open_policy());
  EXPECT_FALSE(out.granted);
  EXPECT_EQ(out.reason, DenialReason::kMalformed);
}

TEST(Authorize, LowIntegrityBypassesChecksAtLowCost) {
  auto p = provision_four(1, IntegrityLevel::kLow);
  auto t = txn_for(p.creds[0], ObjectId{0});
  t.sideband.ar_token.bits.flip(0);
  t.sideband.ar_id = IpId{200};
  auto out = authorize(p.table, t, open_policy());
  EXPECT_TRUE(out.granted);
  EXPECT_EQ(out.cycle_cost, 1u);
}

TEST(Transition, CorrectTokenChangesLevel) {
  auto p = provision_four(1);
  auto out = request_integrity_transition(p.table, ObjectId{1}, p.creds[1].token,
                                          IntegrityLevel::kLow);
  EXPECT_TRUE(out.granted);
  EXPECT_EQ(lookup_integrity(p.table, ObjectId{1}), IntegrityLevel::kLow);
}

TEST(Transition, WrongTokenLeavesLevel) {
  auto p = provision_four(1);
  auto out = request_integrity_transition(p.table, ObjectId{1}, p.creds[2].token,
                                          IntegrityLevel::kLow);
  EXPECT_FALSE(out.granted);
  EXPECT_EQ(out.reason, DenialReason::kTokenMismatch);
  EXPECT_EQ(lookup_integrity(p.table, ObjectId{1}), IntegrityLevel::kHigh);
}

TEST(Transition, UnknownObject) {
  auto p = provision_four(1);
  EXPECT_EQ(request_integrity_transition(p.table, ObjectId{8}, p.creds[0].token,
                                         IntegrityLevel::kLow)
                .reason,
            DenialReason::kMalformed);
  EXPECT_THROW(lookup_integrity(p.table, ObjectId{8}), std::out_of_range);
}

TEST(Controller, EveryRequestAppendsOneVerdict) {
  auto p = provision_four(1);
  EventLog log;
  TrustTokenController ctl(p.table, open_policy(), log);
  auto good = txn_for(p.creds[0], ObjectId{0});
  auto bad = txn_for(p.creds[0], ObjectId{1});
  ctl.authorize(good, 1, "app");
  EXPECT_EQ(log.size(), 1u);
  EXPECT_EQ(log.records().back().kind, EventKind::kGrant);
  for (int i = 0; i < 5; ++i) ctl.authorize(bad, 2 + i, "app");
  EXPECT_EQ(log.size(), 6u);
  EXPECT_EQ(log.count(EventKind::kDeny), 5u);
  EXPECT_EQ(log.records().back().reason, DenialReason::kIdMismatch);
  EXPECT_EQ(log.records().back().cycle_cost, 2u);
}

TEST(Controller, TransitionLogsVerdictAndTransition) {
  auto p = provision_four(1);
  EventLog log;
  TrustTokenController ctl(p.table, open_policy(), log);
  ctl.request_integrity_transition(ObjectId{3}, p.creds[3].token, IntegrityLevel::kLow, 4, "ip");
  EXPECT_EQ(log.count(EventKind::kGrant), 1u);
  EXPECT_EQ(log.count(EventKind::kTransition), 1u);
  EXPECT_EQ(ctl.lookup_integrity(ObjectId{3}), IntegrityLevel::kLow);
  ctl.request_integrity_transition(ObjectId{2}, Token{}, IntegrityLevel::kLow, 5, "ip");
  EXPECT_EQ(log.count(EventKind::kDeny), 1u);
  EXPECT_EQ(log.count(EventKind::kTransition), 1u);
}

TEST(Controller, MatrixAndTableTamperRefused) {
  auto p = provision_four(1);
  EventLog log;
  TrustTokenController ctl(p.table, open_policy(), log);
  ctl.seal();
  EXPECT_FALSE(ctl.modify_matrix(policy::Actor::of_user(kU0), kU0, kP0, ObjectId{0},
                                 AccessAttribute(0), 1, "app"));
  EXPECT_FALSE(ctl.modify_matrix(policy::Actor::integrator(), kU0, kP0, ObjectId{0},
                                 AccessAttribute(0), 2, "integrator"));
  EXPECT_FALSE(ctl.write_table_entry(3, "app"));
  EXPECT_EQ(log.count(EventKind::kDeny), 3u);
  for (const auto& r : log.records()) EXPECT_EQ(r.reason, DenialReason::kMatrixTamper);
  EXPECT_EQ(ctl.policy().matrix(kU0).at(0, 0), AccessAttribute(0b111));
  EXPECT_TRUE(ctl.modify_matrix(policy::Actor::controller(), kU0, kP0, ObjectId{0},
                                AccessAttribute(0b100), 4, "controller"));
  EXPECT_EQ(ctl.policy().matrix(kU0).at(0, 0), AccessAttribute(0b100));
}

TEST(Controller, ReprovisionInvalidatesOldTokens) {
  auto p = provision_four(1);
  EventLog log;
  TrustTokenController ctl(p.table, open_policy(), log);
  puf::PufParams params;
  auto chip = puf::new_chip(1, params);
  auto decls = four_ips();
  ctl.reprovision(provision(chip, params, decls, 1, {}, 1), 10);
  EXPECT_EQ(ctl.table().epoch(), 1u);
  EXPECT_EQ(log.count(EventKind::kReprovision), 1u);
  auto out = ctl.authorize(txn_for(p.creds[0], ObjectId{0}), 11, "app");
  EXPECT_FALSE(out.granted);
}

TEST(Controller, RejectsZeroCosts) {
  auto p = provision_four(1);
  EventLog log;
  EXPECT_THROW(TrustTokenController(p.table, open_policy(), log, HandshakeCosts{0, 2}),
               ParameterError);
}

}  // namespace
