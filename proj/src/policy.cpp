#include "trusttoken/policy.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "trusttoken/errors.hpp"

namespace trusttoken::policy {

AccessMatrix::AccessMatrix(UserId owner, std::size_t processes, std::size_t objects)
    : owner_(owner), processes_(processes), objects_(objects), cells_(processes * objects) {}

AccessAttribute AccessMatrix::at(std::size_t process, std::size_t object) const {
  if (process >= processes_ || object >= objects_) {
    throw std::out_of_range(fmt::format("cell ({}, {}) outside {}x{} matrix", process, object,
                                        processes_, objects_));
  }
  return cells_[process * objects_ + object];
}

void AccessMatrix::set(std::size_t process, std::size_t object, AccessAttribute attribute) {
  if (process >= processes_ || object >= objects_) {
    throw std::out_of_range(fmt::format("cell ({}, {}) outside {}x{} matrix", process, object,
                                        processes_, objects_));
  }
  cells_[process * objects_ + object] = attribute;
}

bool SystemModel::has_user(UserId u) const {
  return std::find(users_.begin(), users_.end(), u) != users_.end();
}

bool SystemModel::has_process(ProcessId p) const {
  return std::find(processes_.begin(), processes_.end(), p) != processes_.end();
}

bool SystemModel::has_object(ObjectId o) const {
  return std::find(objects_.begin(), objects_.end(), o) != objects_.end();
}

const AccessMatrix& SystemModel::matrix(UserId u) const {
  auto it = matrices_.find(u);
  if (it == matrices_.end()) throw std::out_of_range(fmt::format("unknown user {}", u.index));
  return it->second;
}

SystemModel SystemModel::seal() const {
  SystemModel m = *this;
  m.sealed_ = true;
  return m;
}

SystemModel build_system(std::vector<UserId> users, std::vector<ProcessId> processes,
                         std::vector<ObjectId> objects, std::vector<AccessMatrix> matrices,
                         bool strict) {
  if (std::set<UserId>(users.begin(), users.end()).size() != users.size()) {
    throw ConfigurationError("duplicate user id");
  }
  if (std::set<ProcessId>(processes.begin(), processes.end()).size() != processes.size()) {
    throw ConfigurationError("duplicate process id");
  }
  std::sort(objects.begin(), objects.end());
  for (std::size_t k = 0; k < objects.size(); ++k) {
    if (objects[k].index != k) {
      throw ConfigurationError("object indices must be unique and dense from 0");
    }
  }

  std::map<UserId, std::size_t> process_count;
  for (auto u : users) process_count[u] = 0;
  for (const auto& p : processes) {
    auto it = process_count.find(p.owner);
    if (it == process_count.end()) {
      throw ConfigurationError(fmt::format("process {} owned by unknown user {}", p.index,
                                           p.owner.index));
    }
    ++it->second;
  }
  for (const auto& p : processes) {
    if (p.index >= process_count[p.owner]) {
      throw ConfigurationError(fmt::format(
          "process indices of user {} must be dense from 0", p.owner.index));
    }
  }

  SystemModel model;
  for (auto& m : matrices) {
    auto owner = m.owner();
    if (!process_count.contains(owner)) {
      throw ConfigurationError(fmt::format("matrix for unknown user {}", owner.index));
    }
    if (model.matrices_.contains(owner)) {
      // The user -> matrix map has to be one-to-one.
      throw ConfigurationError(fmt::format("user {} has more than one matrix", owner.index));
    }
    if (m.processes() != process_count[owner] || m.objects() != objects.size()) {
      throw ConfigurationError(fmt::format(
          "matrix of user {} is {}x{}, expected {}x{}", owner.index, m.processes(), m.objects(),
          process_count[owner], objects.size()));
    }
    model.matrices_.emplace(owner, std::move(m));
  }
  for (auto u : users) {
    if (!model.matrices_.contains(u)) {
      throw ConfigurationError(fmt::format("user {} has no matrix", u.index));
    }
  }

  model.users_ = std::move(users);
  model.processes_ = std::move(processes);
  model.objects_ = std::move(objects);
  model.strict_ = strict;
  return model;
}

namespace {

Decision check_attribute(const SystemModel& model, UserId user, ProcessId process,
                         ObjectId object, AccessAttribute attribute) {
  if (model.strict() && !classify_confidentiality(attribute) && !classify_integrity(attribute)) {
    return Decision::no(DenialReason::kMalformed);
  }
  auto cell = model.matrix(user).at(process.index, object.index);
  if (!cell.covers(attribute)) return Decision::no(DenialReason::kMatrixDeny);
  return Decision::yes();
}

std::optional<Decision> check_identity(const SystemModel& model, UserId user, ProcessId process,
                                       ObjectId object) {
  if (!model.has_user(user) || !model.has_process(process) || !model.has_object(object)) {
    return Decision::no(DenialReason::kMalformed);
  }
  if (process.owner != user) return Decision::no(DenialReason::kForeignProcess);
  return std::nullopt;
}

}  // namespace

Decision evaluate(const SystemModel& model, const AccessRequest& request,
                  const TokenTable& table) {
  if (auto d = check_identity(model, request.user, request.process, request.object)) return *d;
  if (auto bad = table.check_credentials(request.object, request.ip_id, request.token)) {
    return Decision::no(*bad);
  }
  return check_attribute(model, request.user, request.process, request.object, request.attribute);
}

Decision evaluate_without_credentials(const SystemModel& model, UserId user, ProcessId process,
                                      ObjectId object, AccessAttribute attribute) {
  if (auto d = check_identity(model, user, process, object)) return *d;
  return check_attribute(model, user, process, object, attribute);
}

bool classify_confidentiality(AccessAttribute attribute) {
  return attribute.read() || attribute.execute();
}

bool classify_integrity(AccessAttribute attribute) {
  return attribute.write() || attribute.execute();
}

SystemModel modify_matrix(const SystemModel& model, Actor actor, UserId user, ProcessId process,
                          ObjectId object, AccessAttribute attribute) {
  bool allowed = actor.kind == ActorKind::kController ||
                 (actor.kind == ActorKind::kIntegrator && !model.sealed());
  if (!allowed) {
    throw MatrixTamperError(fmt::format("actor may not modify the access matrix of user {}",
                                        user.index));
  }
  if (!model.has_user(user) || !model.has_process(process) || process.owner != user ||
      !model.has_object(object)) {
    throw ConfigurationError("matrix modification names an unknown cell");
  }
  SystemModel updated = model;
  updated.matrices_.at(user).set(process.index, object.index, attribute);
  return updated;
}

}  // namespace trusttoken::policy
