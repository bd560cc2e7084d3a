#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smartml/memory.hpp"

namespace smartml {

// --- trace events -----------------------------------------------------------

struct TraceEvent {
  enum class Kind { CallEnter, CallReturn, FieldWrite, FieldRead, Revert };

  Kind kind;
  std::string caller;   // CallEnter
  std::string callee;   // CallEnter / CallReturn: the instance acted on
  std::string method;   // CallEnter / CallReturn
  bool transactional = false;  // CallEnter
  bool ok = false;             // CallReturn
  std::string field;    // FieldWrite / FieldRead (callee = instance)
  int depth = 0;        // Revert: open transactions remaining afterwards

  static TraceEvent callEnter(std::string caller, std::string callee, std::string method,
                              bool trans) {
    TraceEvent e;
    e.kind = Kind::CallEnter;
    e.caller = std::move(caller);
    e.callee = std::move(callee);
    e.method = std::move(method);
    e.transactional = trans;
    return e;
  }
  static TraceEvent callReturn(std::string callee, std::string method, bool ok) {
    TraceEvent e;
    e.kind = Kind::CallReturn;
    e.callee = std::move(callee);
    e.method = std::move(method);
    e.ok = ok;
    return e;
  }
  static TraceEvent fieldWrite(std::string inst, std::string field) {
    TraceEvent e;
    e.kind = Kind::FieldWrite;
    e.callee = std::move(inst);
    e.field = std::move(field);
    return e;
  }
  static TraceEvent fieldRead(std::string inst, std::string field) {
    TraceEvent e;
    e.kind = Kind::FieldRead;
    e.callee = std::move(inst);
    e.field = std::move(field);
    return e;
  }
  static TraceEvent revert(int depth) {
    TraceEvent e;
    e.kind = Kind::Revert;
    e.depth = depth;
    return e;
  }

  json toJson() const {
    switch (kind) {
      case Kind::CallEnter:
        return json{{"event", "call_enter"},
                    {"caller", caller},
                    {"callee", callee},
                    {"method", method},
                    {"transactional", transactional}};
      case Kind::CallReturn:
        return json{{"event", "call_return"}, {"callee", callee}, {"method", method}, {"ok", ok}};
      case Kind::FieldWrite:
        return json{{"event", "field_write"}, {"instance", callee}, {"field", field}};
      case Kind::FieldRead:
        return json{{"event", "field_read"}, {"instance", callee}, {"field", field}};
      case Kind::Revert:
        return json{{"event", "revert"}, {"depth", depth}};
    }
    return {};
  }
};

using Trace = std::vector<TraceEvent>;

inline std::string traceToJsonLines(const Trace& t) {
  std::string out;
  for (const auto& e : t) {
    out += e.toJson().dump();
    out += '\n';
  }
  return out;
}

// --- continuations ----------------------------------------------------------

// Immutable cons-list of pending statements; blocks are flattened lazily.
struct ContNode;
using ContPtr = std::shared_ptr<const ContNode>;

struct ContNode {
  StmtPtr head;
  ContPtr tail;
};

inline ContPtr contPush(StmtPtr s, ContPtr tail) {
  auto n = std::make_shared<ContNode>();
  n->head = std::move(s);
  n->tail = std::move(tail);
  return n;
}

inline ContPtr contOfBlock(const StmtPtr& block, ContPtr tail) {
  if (!block) return tail;
  if (block->kind != StmtKind::Block) return contPush(block, std::move(tail));
  ContPtr out = std::move(tail);
  for (auto it = block->stmts.rbegin(); it != block->stmts.rend(); ++it)
    out = contPush(*it, out);
  return out;
}

// --- frames and configurations ---------------------------------------------

// Suspended caller record. Internal calls save no snapshot; transactional
// frames mark the hole of a pending try and carry its abort/success bodies.
struct Frame {
  enum class Kind { Internal, Transaction };

  Kind kind = Kind::Internal;
  std::string contract;       // suspended instance
  std::string method;
  VolatileMemory savedVolatile;
  std::string savedSender;
  BigInt savedAmount;
  ExprPtr bindLValue;                      // assignment-form call sites (Var or this.f)
  std::optional<std::string> abortVar;     // Transaction
  StmtPtr abortBody;                       // Transaction; null = rethrow
  StmtPtr successBody;                     // Transaction; may be null
  ContPtr rest;               // continuation after the call statement
};

struct Configuration {
  std::string active;                 // current contract instance id
  std::vector<Frame> stack;           // front = most recent caller
  VolatileMemory vol;
  PermanentMemory pm;
  std::vector<PermanentMemory> rollback;  // front = most recent snapshot
  std::string method;
  ContPtr cont;
  std::string sender;
  BigInt amount;

  int openTransactions() const {
    int n = 0;
    for (const auto& f : stack)
      if (f.kind == Frame::Kind::Transaction) ++n;
    return n;
  }

  // Rollback depth must equal open transactions plus the initial snapshot.
  bool rollbackInvariant() const {
    return static_cast<int>(rollback.size()) == openTransactions() + 1;
  }

  json toJson() const {
    json frames = json::array();
    for (const auto& f : stack) {
      frames.push_back(json{{"contract", f.contract},
                            {"method", f.method},
                            {"kind", f.kind == Frame::Kind::Transaction ? "transaction" : "internal"},
                            {"volatile", volatileToJson(f.savedVolatile)}});
    }
    return json{{"active", active},
                {"method", method},
                {"sender", sender},
                {"amount", amount.str()},
                {"stack", frames},
                {"rollbackDepth", rollback.size()},
                {"volatile", volatileToJson(vol)},
                {"permanent", pm.toJson()}};
  }
};

inline Configuration snapshot(Configuration cfg) {
  cfg.rollback.insert(cfg.rollback.begin(), cfg.pm);
  return cfg;
}

inline Configuration revert(Configuration cfg) {
  if (cfg.rollback.empty()) throw MemoryError("revert with empty rollback list");
  cfg.pm = cfg.rollback.front();
  cfg.rollback.erase(cfg.rollback.begin());
  return cfg;
}

}  // namespace smartml
