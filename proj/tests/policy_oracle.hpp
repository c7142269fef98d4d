#pragma once

// Straight-line reference evaluator for the access rules, written against
// plain arrays so it shares no code with the policy engine under test.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "trusttoken/policy.hpp"
#include "trusttoken/token_table.hpp"

namespace oracle {

using namespace trusttoken;

struct PlainModel {
  std::vector<std::size_t> procs_per_user;  // index = user
  std::size_t objects = 0;
  // cells[user][process][object] = 3-bit attribute
  std::vector<std::vector<std::vector<std::uint8_t>>> cells;
};

struct PlainCredential {
  std::uint8_t id = 0;
  Token token;
};

/// Yes only when: the request names a known user, process and object; the
/// process belongs to the user; the presented id and token equal the
/// object's credentials; in strict mode the attribute keeps confidentiality
/// (r or e) or integrity (w or e); and the matrix cell has every requested bit.
inline bool literal_decision(const PlainModel& m, const std::vector<PlainCredential>& creds,
                             std::size_t user, std::size_t proc_owner, std::size_t proc_index,
                             std::size_t object, std::uint8_t id, const Token& token,
                             std::uint8_t attr, bool strict) {
  if (user >= m.procs_per_user.size()) return false;
  if (proc_owner >= m.procs_per_user.size()) return false;
  if (proc_index >= m.procs_per_user[proc_owner]) return false;
  if (object >= m.objects) return false;
  if (proc_owner != user) return false;
  if (creds[object].id != id) return false;
  if (!(creds[object].token == token)) return false;
  bool a2 = (attr >> 2) & 1, a1 = (attr >> 1) & 1, a0 = attr & 1;
  bool confidentiality = a2 || a0;
  bool integrity = a1 || a0;
  if (strict && !confidentiality && !integrity) return false;
  std::uint8_t cell = m.cells[user][proc_index][object];
  for (int bit = 0; bit < 3; ++bit) {
    bool requested = (attr >> bit) & 1;
    bool present = (cell >> bit) & 1;
    if (requested && !present) return false;
  }
  return true;
}

inline policy::SystemModel to_system(const PlainModel& m, bool strict) {
  std::vector<UserId> users;
  std::vector<ProcessId> processes;
  std::vector<ObjectId> objects;
  std::vector<policy::AccessMatrix> matrices;
  for (std::size_t u = 0; u < m.procs_per_user.size(); ++u) {
    UserId uid{static_cast<std::uint8_t>(u)};
    users.push_back(uid);
    policy::AccessMatrix mat(uid, m.procs_per_user[u], m.objects);
    for (std::size_t p = 0; p < m.procs_per_user[u]; ++p) {
      processes.push_back(ProcessId{uid, static_cast<std::uint8_t>(p)});
      for (std::size_t o = 0; o < m.objects; ++o) mat.set(p, o, AccessAttribute(m.cells[u][p][o]));
    }
    matrices.push_back(mat);
  }
  for (std::size_t o = 0; o < m.objects; ++o) objects.push_back(ObjectId{static_cast<std::uint8_t>(o)});
  return policy::build_system(users, processes, objects, matrices, strict);
}

/// Every shape with 1..3 users, 1..2 processes per user and 1..3 objects.
inline std::vector<PlainModel> all_shapes() {
  std::vector<PlainModel> shapes;
  for (std::size_t users = 1; users <= 3; ++users) {
    for (std::size_t mask = 0; mask < (1u << users); ++mask) {
      for (std::size_t objects = 1; objects <= 3; ++objects) {
        PlainModel m;
        m.objects = objects;
        for (std::size_t u = 0; u < users; ++u) m.procs_per_user.push_back(((mask >> u) & 1) ? 2 : 1);
        shapes.push_back(m);
      }
    }
  }
  return shapes;
}

/// Fills every cell; `fill` receives a running cell counter.
inline PlainModel filled(PlainModel m, const std::function<std::uint8_t(std::size_t)>& fill) {
  std::size_t n = 0;
  m.cells.assign(m.procs_per_user.size(), {});
  for (std::size_t u = 0; u < m.procs_per_user.size(); ++u) {
    m.cells[u].assign(m.procs_per_user[u], std::vector<std::uint8_t>(m.objects, 0));
    for (auto& row : m.cells[u])
      for (auto& c : row) c = fill(n++) & 0b111;
  }
  return m;
}

/// Provisions a table with one distinct synthetic token per object and
/// records the pushed credentials.
inline TokenTable make_table(std::size_t objects, std::vector<PlainCredential>& creds,
                             std::uint64_t seed) {
  std::vector<IpDeclaration> decls;
  for (std::size_t o = 0; o < objects; ++o)
    decls.push_back({ObjectId{static_cast<std::uint8_t>(o)}, IntegrityLevel::kHigh});
  creds.assign(objects, {});
  ResponseSource source = [](puf::Challenge c) {
    std::mt19937_64 g(c.value);
    puf::Response r;
    for (std::size_t i = 0; i < puf::kResponseBits; ++i) r.bits[i] = (g() & 1) != 0;
    return r;
  };
  return provision(source, decls, seed, [&](const Credential& c) {
    creds[c.object.index] = PlainCredential{c.id.value, c.token};
  });
}

struct SweepResult {
  std::size_t requests = 0;
  std::size_t mismatches = 0;
  std::size_t granted = 0;
};

/// Enumerates every (user, process, object, attribute) combination, with
/// correct, wrong-id and wrong-token credentials, and compares verdicts.
inline void sweep(const PlainModel& m, bool strict, SweepResult& out) {
  std::vector<PlainCredential> creds;
  TokenTable table = make_table(m.objects, creds, 17 + m.objects);
  auto model = to_system(m, strict);
  for (std::size_t u = 0; u < m.procs_per_user.size(); ++u) {
    for (std::size_t owner = 0; owner < m.procs_per_user.size(); ++owner) {
      for (std::size_t p = 0; p < m.procs_per_user[owner]; ++p) {
        for (std::size_t o = 0; o < m.objects; ++o) {
          for (std::uint8_t a = 0; a < 8; ++a) {
            for (int variant = 0; variant < 3; ++variant) {
              std::uint8_t id = creds[o].id;
              Token token = creds[o].token;
              if (variant == 1) id = static_cast<std::uint8_t>(id + 1);
              if (variant == 2) token.bits.flip(0);
              policy::AccessRequest req{UserId{static_cast<std::uint8_t>(u)},
                                        ProcessId{UserId{static_cast<std::uint8_t>(owner)},
                                                  static_cast<std::uint8_t>(p)},
                                        ObjectId{static_cast<std::uint8_t>(o)},
                                        token,
                                        IpId{id},
                                        AccessAttribute(a)};
              bool got = policy::evaluate(model, req, table).granted();
              bool want = literal_decision(m, creds, u, owner, p, o, id, token, a, strict);
              ++out.requests;
              if (got != want) ++out.mismatches;
              if (got) ++out.granted;
            }
          }
        }
      }
    }
  }
}

/// Runs the sweep for every shape under several matrix fillings: all-zero,
/// all-seven, a cyclic pattern and seeded random fillings.
inline SweepResult exhaustive_equivalence(std::size_t random_fillings = 6) {
  SweepResult result;
  for (const auto& shape : all_shapes()) {
    std::vector<std::function<std::uint8_t(std::size_t)>> fills{
        [](std::size_t) { return std::uint8_t{0}; },
        [](std::size_t) { return std::uint8_t{7}; },
        [](std::size_t n) { return static_cast<std::uint8_t>(n % 8); },
    };
    for (std::size_t r = 0; r < random_fillings; ++r) {
      auto g = std::make_shared<std::mt19937>(static_cast<unsigned>(r * 1000 + shape.objects));
      fills.push_back([g](std::size_t) { return static_cast<std::uint8_t>((*g)() % 8); });
    }
    for (const auto& fill : fills) {
      auto m = filled(shape, fill);
      sweep(m, true, result);
      sweep(m, false, result);
    }
  }
  return result;
}

}  // namespace oracle
