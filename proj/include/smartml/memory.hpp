#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "smartml/resolver.hpp"
#include "smartml/value.hpp"

namespace smartml {

class MemoryError : public std::runtime_error {
public:
  explicit MemoryError(const std::string& m) : std::runtime_error(m) {}
};

using VolatileMemory = std::map<std::string, ValuePtr>;

struct Instance {
  std::string type;
  std::map<std::string, ValuePtr> fields;
};
using InstancePtr = std::shared_ptr<const Instance>;

// Persistent (copy-on-write) store of contract instances. Writes return a new
// memory; old handles keep reading the old state, which is what snapshots in
// the rollback list rely on.
class PermanentMemory {
public:
  PermanentMemory() = default;

  bool has(const std::string& id) const { return instances_.count(id) > 0; }

  const Instance& instance(const std::string& id) const {
    auto it = instances_.find(id);
    if (it == instances_.end()) throw MemoryError("unknown instance '" + id + "'");
    return *it->second;
  }

  ValuePtr read(const std::string& id, const std::string& field) const {
    const Instance& inst = instance(id);
    auto it = inst.fields.find(field);
    if (it == inst.fields.end())
      throw MemoryError("instance '" + id + "' has no field '" + field + "'");
    return it->second;
  }

  PermanentMemory write(const std::string& id, const std::string& field, ValuePtr v) const {
    const Instance& inst = instance(id);
    if (!inst.fields.count(field))
      throw MemoryError("instance '" + id + "' has no field '" + field + "'");
    auto updated = std::make_shared<Instance>(inst);
    updated->fields[field] = std::move(v);
    PermanentMemory out = *this;
    out.instances_[id] = std::move(updated);
    return out;
  }

  // Allocates a fresh instance. `fieldValues` must cover every declared and
  // inherited field; the built-in balance defaults to 0.
  std::pair<PermanentMemory, std::string> alloc(
      const ContractInfo& info, const std::string& typeName,
      std::map<std::string, ValuePtr> fieldValues) const {
    auto inst = std::make_shared<Instance>();
    inst->type = typeName;
    for (const auto& f : info.allFields) {
      auto it = fieldValues.find(f.name);
      if (it == fieldValues.end()) {
        if (f.name == kBalanceField) {
          inst->fields[f.name] = Value::ofInt(0);
          continue;
        }
        throw MemoryError("missing field '" + f.name + "' for new " + typeName);
      }
      inst->fields[f.name] = it->second;
      fieldValues.erase(it);
    }
    if (!fieldValues.empty())
      throw MemoryError("unknown field '" + fieldValues.begin()->first + "' for new " + typeName);
    PermanentMemory out = *this;
    std::string id = typeName + "#" + std::to_string(out.nextId_++);
    out.instances_.emplace(id, std::move(inst));
    return {std::move(out), std::move(id)};
  }

  const std::map<std::string, InstancePtr>& instances() const { return instances_; }

  json toJson() const {
    json insts = json::object();
    for (const auto& [id, inst] : instances_) {
      json fields = json::object();
      for (const auto& [name, v] : inst->fields) fields[name] = valueToJson(v);
      insts[id] = json{{"type", inst->type}, {"fields", fields}};
    }
    return json{{"instances", insts}};
  }

  std::string canonical() const { return toJson().dump(); }

private:
  std::map<std::string, InstancePtr> instances_;
  uint64_t nextId_ = 1;
};

inline json volatileToJson(const VolatileMemory& vol) {
  json out = json::object();
  for (const auto& [name, v] : vol) out[name] = valueToJson(v);
  return out;
}

// Runtime type of a value; contract references consult the store.
inline Type runtimeType(const PermanentMemory& pm, const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Int: return Type::Int();
    case Value::Kind::Bool: return Type::Bool();
    case Value::Kind::String: return Type::String();
    case Value::Kind::Unit: return Type::Unit();
    case Value::Kind::Adt: return Type::Adt(v->adtName);
    case Value::Kind::Address:
      if (pm.has(v->s)) return Type::Contract(pm.instance(v->s).type);
      return Type::Address();
    case Value::Kind::Contract:
      if (pm.has(v->s)) return Type::Contract(pm.instance(v->s).type);
      return Type::Address();
  }
  return Type::Unit();
}

}  // namespace smartml
