#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "smartml/interp.hpp"
#include "smartml/monitor.hpp"

namespace smartml {

// Deterministic bounded random source. Values are derived with modulo
// arithmetic from the raw engine so runs are reproducible byte for byte.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t raw() { return eng_(); }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(eng_() % static_cast<uint64_t>(n)); }
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }  // inclusive
  bool chance(int percent) { return below(100) < percent; }

private:
  std::mt19937_64 eng_;
};

struct FuzzedTrace {
  std::string entryContract;
  std::string entryMethod;
  RunStatus status = RunStatus::Terminated;
  Trace trace;
  Configuration final;
  long steps = 0;
};

struct FuzzOptions {
  long fuel = 4000;
  int maxListLen = 3;
  int intLo = -10;
  int intHi = 10;
  int maxNestedNew = 2;
};

// Generates initial configurations (random constructor and method arguments,
// every declared method as an entry point in rotation) and runs each to a
// complete trace. Deterministic for a fixed seed.
class Fuzzer {
public:
  Fuzzer(const ResolvedProgram& rp, uint64_t seed, FuzzOptions opts = {})
      : rp_(rp), interp_(rp), rng_(seed), opts_(opts) {
    for (const auto& c : rp_.ast.contracts) {
      const ContractInfo& info = rp_.contract(c.name);
      for (const auto& m : info.methodOrder) entries_.emplace_back(c.name, m);
    }
  }

  bool hasEntries() const { return !entries_.empty(); }

  std::vector<FuzzedTrace> traces(int budget) {
    std::vector<FuzzedTrace> out;
    for (int t = 0; t < budget && hasEntries(); ++t) out.push_back(one(t));
    return out;
  }

  FuzzedTrace one(int index) {
    const auto& [contract, method] = entries_[static_cast<size_t>(index) % entries_.size()];
    FuzzedTrace ft;
    ft.entryContract = contract;
    ft.entryMethod = method;

    PermanentMemory pm;
    std::string id;
    try {
      auto [pm2, id2] = allocInstance(pm, contract, 0);
      pm = std::move(pm2);
      id = std::move(id2);
    } catch (const EvalThrow& t) {
      ft.status = RunStatus::Aborted;
      return ft;  // constructor itself failed; nothing to run
    } catch (const EvalStuck& s) {
      ft.status = RunStatus::Stuck;
      ft.final.pm = pm;
      return ft;
    }

    const MethodDecl& m = *rp_.contract(contract).methods.at(method).decl;
    std::vector<ValuePtr> args;
    for (const auto& p : m.params) args.push_back(randomValue(pm, p.type, 0));
    BigInt amount = rng_.range(0, 3);

    Configuration cfg = interp_.initial(pm, id, method, std::move(args), "@env", amount);
    // The environment's transfer credits the entry instance up front.
    if (amount != 0) {
      ValuePtr bal = cfg.pm.read(id, kBalanceField);
      cfg.pm = cfg.pm.write(id, kBalanceField, Value::ofInt(bal->i + amount));
      cfg.rollback = {cfg.pm};
    }
    RunResult r = interp_.run(std::move(cfg), opts_.fuel);
    ft.status = r.status;
    ft.trace = std::move(r.trace);
    ft.final = std::move(r.final);
    ft.steps = r.steps;
    return ft;
  }

  // Random value of a given type; contract-typed values allocate a fresh
  // instance (depth-bounded).
  ValuePtr randomValue(PermanentMemory& pm, const Type& t, int depth) {
    switch (t.kind) {
      case TypeKind::Int: return Value::ofInt(rng_.range(opts_.intLo, opts_.intHi));
      case TypeKind::Bool: return Value::ofBool(rng_.chance(50));
      case TypeKind::String: {
        static const char* pool[] = {"", "a", "xy", "hello"};
        return Value::ofString(pool[rng_.below(4)]);
      }
      case TypeKind::Address: {
        // Prefer an existing instance; fall back to the environment account.
        std::vector<std::string> ids;
        for (const auto& [iid, _] : pm.instances()) ids.push_back(iid);
        if (!ids.empty() && rng_.chance(80))
          return Value::address(ids[static_cast<size_t>(rng_.below(static_cast<int>(ids.size())))]);
        return Value::address("@env");
      }
      case TypeKind::Adt: return randomAdtValue(pm, t.name, depth);
      case TypeKind::Contract: {
        if (depth >= opts_.maxNestedNew) {
          for (const auto& [iid, inst] : pm.instances())
            if (rp_.isSubcontract(inst->type, t.name)) return Value::contractRef(iid);
        }
        auto [pm2, id] = allocInstance(pm, t.name, depth + 1);
        pm = std::move(pm2);
        return Value::contractRef(id);
      }
      default: return Value::unit();
    }
  }

private:
  std::pair<PermanentMemory, std::string> allocInstance(PermanentMemory pm,
                                                        const std::string& type, int depth) {
    const ContractInfo& info = rp_.contract(type);
    std::vector<ValuePtr> args;
    for (const auto& p : info.decl->ctor.params) args.push_back(randomValue(pm, p.type, depth));
    return interp_.execConstructor(std::move(pm), type, std::move(args), "@env");
  }

  ValuePtr randomAdtValue(PermanentMemory& pm, const std::string& adtName, int depth) {
    const AdtInfo& info = rp_.adt(adtName);
    std::vector<const AdtCtorDecl*> nullary, recursive;
    for (const auto& [name, c] : info.ctors)
      (c->params.empty() ? nullary : recursive).push_back(c);
    const AdtCtorDecl* pick = nullptr;
    bool goDeep = depth < opts_.maxListLen && !recursive.empty() && rng_.chance(60);
    if (goDeep) {
      pick = recursive[static_cast<size_t>(rng_.below(static_cast<int>(recursive.size())))];
    } else if (!nullary.empty()) {
      pick = nullary[static_cast<size_t>(rng_.below(static_cast<int>(nullary.size())))];
    } else if (!recursive.empty()) {
      pick = recursive[0];
    } else {
      throw EvalStuck{"datatype " + adtName + " has no constructors"};
    }
    std::vector<ValuePtr> args;
    for (const auto& p : pick->params) {
      // Recursive positions step the depth; primitive payloads do not.
      int d = p.type.isAdt() ? depth + 1 : depth;
      args.push_back(randomValue(pm, p.type, d));
    }
    return Value::adt(adtName, pick->name, std::move(args));
  }

  const ResolvedProgram& rp_;
  Interp interp_;
  Rng rng_;
  FuzzOptions opts_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace smartml
