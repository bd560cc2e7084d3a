#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smartml/ast.hpp"
#include "smartml/json.hpp"

namespace smartml {

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

// Semantic values. Integers are arbitrary precision; addresses and contract
// references both carry an instance id and compare by it.
struct Value {
  enum class Kind { Int, Bool, String, Address, Contract, Adt, Unit };

  Kind kind = Kind::Unit;
  BigInt i;
  bool b = false;
  std::string s;                 // string payload or instance id
  std::string adtName;           // Adt
  std::string ctor;              // Adt
  std::vector<ValuePtr> fieldsV; // Adt constructor arguments

  static ValuePtr unit() {
    static ValuePtr v = std::make_shared<Value>();
    return v;
  }
  static ValuePtr ofInt(BigInt n) {
    auto v = std::make_shared<Value>();
    v->kind = Kind::Int;
    v->i = std::move(n);
    return v;
  }
  static ValuePtr ofBool(bool b) {
    auto v = std::make_shared<Value>();
    v->kind = Kind::Bool;
    v->b = b;
    return v;
  }
  static ValuePtr ofString(std::string s) {
    auto v = std::make_shared<Value>();
    v->kind = Kind::String;
    v->s = std::move(s);
    return v;
  }
  static ValuePtr address(std::string id) {
    auto v = std::make_shared<Value>();
    v->kind = Kind::Address;
    v->s = std::move(id);
    return v;
  }
  static ValuePtr contractRef(std::string id) {
    auto v = std::make_shared<Value>();
    v->kind = Kind::Contract;
    v->s = std::move(id);
    return v;
  }
  static ValuePtr adt(std::string adtName, std::string ctor, std::vector<ValuePtr> args) {
    auto v = std::make_shared<Value>();
    v->kind = Kind::Adt;
    v->adtName = std::move(adtName);
    v->ctor = std::move(ctor);
    v->fieldsV = std::move(args);
    return v;
  }

  bool isRef() const { return kind == Kind::Address || kind == Kind::Contract; }

  bool truthy() const { return kind == Kind::Bool && b; }
};

inline bool valueEq(const ValuePtr& a, const ValuePtr& b) {
  if (a->isRef() && b->isRef()) return a->s == b->s;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Value::Kind::Int: return a->i == b->i;
    case Value::Kind::Bool: return a->b == b->b;
    case Value::Kind::String: return a->s == b->s;
    case Value::Kind::Unit: return true;
    case Value::Kind::Adt: {
      if (a->adtName != b->adtName || a->ctor != b->ctor ||
          a->fieldsV.size() != b->fieldsV.size())
        return false;
      for (size_t i = 0; i < a->fieldsV.size(); ++i)
        if (!valueEq(a->fieldsV[i], b->fieldsV[i])) return false;
      return true;
    }
    default: return false;
  }
}

// Tagged-union JSON form; schema documented in docs/formats.md.
inline json valueToJson(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Int: return json{{"t", "int"}, {"v", v->i.str()}};
    case Value::Kind::Bool: return json{{"t", "bool"}, {"v", v->b}};
    case Value::Kind::String: return json{{"t", "string"}, {"v", v->s}};
    case Value::Kind::Address: return json{{"t", "address"}, {"v", v->s}};
    case Value::Kind::Contract: return json{{"t", "contract"}, {"v", v->s}};
    case Value::Kind::Unit: return json{{"t", "unit"}};
    case Value::Kind::Adt: {
      json args = json::array();
      for (const auto& a : v->fieldsV) args.push_back(valueToJson(a));
      return json{{"t", "adt"}, {"adt", v->adtName}, {"ctor", v->ctor}, {"args", args}};
    }
  }
  return {};
}

inline std::string valueToString(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Int: return v->i.str();
    case Value::Kind::Bool: return v->b ? "true" : "false";
    case Value::Kind::String: return "\"" + v->s + "\"";
    case Value::Kind::Address:
    case Value::Kind::Contract: return v->s;
    case Value::Kind::Unit: return "unit";
    case Value::Kind::Adt: {
      if (v->fieldsV.empty()) return v->ctor;
      std::string out = v->ctor + "(";
      for (size_t i = 0; i < v->fieldsV.size(); ++i) {
        if (i) out += ", ";
        out += valueToString(v->fieldsV[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

// Runtime type of a value, for residual re-checking and diagnostics.
// Contract refs need the permanent memory to name their declared type, so
// that lives in memory.hpp.

}  // namespace smartml
