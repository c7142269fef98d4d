#pragma once

// Access-decision engine over the security tuple {U, P, O, T, I, A, D, M}.
//
// Users own processes, processes request access to objects (untrusted IP
// cores), and every user has exactly one m x k access matrix of r/w/e
// attributes. A request is granted only when the requesting process belongs to
// the requesting user, the presented (ar_id, ar_token) match the controller's
// table entry for the object, and the user's matrix cell covers every
// requested attribute bit.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "trusttoken/token_table.hpp"
#include "trusttoken/types.hpp"

namespace trusttoken::policy {

class AccessMatrix {
 public:
  AccessMatrix(UserId owner, std::size_t processes, std::size_t objects);

  UserId owner() const { return owner_; }
  std::size_t processes() const { return processes_; }
  std::size_t objects() const { return objects_; }

  AccessAttribute at(std::size_t process, std::size_t object) const;
  void set(std::size_t process, std::size_t object, AccessAttribute attribute);

  bool operator==(const AccessMatrix&) const = default;

 private:
  UserId owner_;
  std::size_t processes_;
  std::size_t objects_;
  std::vector<AccessAttribute> cells_;
};

/// The six enumerated members (u, p, o, t, i, a).
struct AccessRequest {
  UserId user;
  ProcessId process;
  ObjectId object;
  Token token;
  IpId ip_id;
  AccessAttribute attribute;
};

enum class Verdict { kYes, kNo };

struct Decision {
  Verdict verdict = Verdict::kNo;
  std::optional<DenialReason> reason;

  static Decision yes() { return {Verdict::kYes, std::nullopt}; }
  static Decision no(DenialReason r) { return {Verdict::kNo, r}; }
  bool granted() const { return verdict == Verdict::kYes; }
  bool operator==(const Decision&) const = default;
};

enum class ActorKind { kController, kIntegrator, kUser };

struct Actor {
  ActorKind kind = ActorKind::kUser;
  UserId user;

  static Actor controller() { return {ActorKind::kController, {}}; }
  static Actor integrator() { return {ActorKind::kIntegrator, {}}; }
  static Actor of_user(UserId u) { return {ActorKind::kUser, u}; }
};

/// Immutable once built; modify_matrix returns a new model.
class SystemModel {
 public:
  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ProcessId>& processes() const { return processes_; }
  const std::vector<ObjectId>& objects() const { return objects_; }

  bool has_user(UserId u) const;
  bool has_process(ProcessId p) const;
  bool has_object(ObjectId o) const;

  /// Throws std::out_of_range for an unknown user.
  const AccessMatrix& matrix(UserId u) const;

  /// Strict mode denies requests that preserve neither confidentiality nor
  /// integrity (attribute 0b000).
  bool strict() const { return strict_; }

  /// Once sealed (simulation started), the integrator can no longer edit matrices.
  bool sealed() const { return sealed_; }
  SystemModel seal() const;

  bool operator==(const SystemModel&) const = default;

 private:
  friend SystemModel build_system(std::vector<UserId> users, std::vector<ProcessId> processes,
                                  std::vector<ObjectId> objects,
                                  std::vector<AccessMatrix> matrices, bool strict);
  friend SystemModel modify_matrix(const SystemModel& model, Actor actor, UserId user,
                                   ProcessId process, ObjectId object,
                                   AccessAttribute attribute);
  SystemModel() = default;

  std::vector<UserId> users_;
  std::vector<ProcessId> processes_;
  std::vector<ObjectId> objects_;
  std::map<UserId, AccessMatrix> matrices_;
  bool strict_ = true;
  bool sealed_ = false;
};

/// Validates and assembles a model. Per user, process indices must be
/// 0..m-1; object indices must be 0..k-1. Each user needs exactly one
/// matrix of shape m x k. Throws ConfigurationError otherwise.
SystemModel build_system(std::vector<UserId> users, std::vector<ProcessId> processes,
                         std::vector<ObjectId> objects, std::vector<AccessMatrix> matrices,
                         bool strict = true);

Decision evaluate(const SystemModel& model, const AccessRequest& request, const TokenTable& table);

/// Everything evaluate checks except the (ar_id, ar_token) credentials. This
/// is what a signal-gated interconnect without tokens can enforce.
Decision evaluate_without_credentials(const SystemModel& model, UserId user, ProcessId process,
                                      ObjectId object, AccessAttribute attribute);

bool classify_confidentiality(AccessAttribute attribute);
bool classify_integrity(AccessAttribute attribute);

/// Only the controller, or the integrator while the model is unsealed, may
/// rewrite a cell. Anyone else gets MatrixTamperError and no change.
SystemModel modify_matrix(const SystemModel& model, Actor actor, UserId user, ProcessId process,
                          ObjectId object, AccessAttribute attribute);

}  // namespace trusttoken::policy
