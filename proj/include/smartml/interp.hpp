#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smartml/eval.hpp"
#include "smartml/runtime.hpp"

namespace smartml {

enum class RunStatus { Terminated, Aborted, Stuck, FuelExhausted };

struct StepOut {
  enum class S { Next, Terminated, Aborted, Stuck };
  S s = S::Next;
  Configuration cfg;
  ValuePtr value;           // Terminated result / Aborted error
  std::string stuckReason;
};

struct RunResult {
  RunStatus status = RunStatus::Terminated;
  ValuePtr value;           // Terminated
  ValuePtr error;           // Aborted
  std::string stuckReason;  // Stuck
  Trace trace;
  Configuration final;
  long steps = 0;
};

// One-step structural operational semantics over configurations. Each step
// applies exactly the rule selected by the head of the continuation.
class Interp {
public:
  explicit Interp(const ResolvedProgram& rp, long adtFuelPerStep = 200000)
      : rp_(rp), adtFuelPerStep_(adtFuelPerStep) {}

  const ResolvedProgram& program() const { return rp_; }

  // --- construction ---------------------------------------------------------

  // Runs a constructor chain and allocates one instance. Initializer
  // expressions may allocate nested instances via `new`.
  std::pair<PermanentMemory, std::string> execConstructor(PermanentMemory pm,
                                                          const std::string& typeName,
                                                          std::vector<ValuePtr> args,
                                                          const std::string& sender) const {
    const ContractInfo& info = rp_.contract(typeName);
    std::map<std::string, ValuePtr> fields;
    pm = initFields(std::move(pm), typeName, std::move(args), sender, fields);
    auto [pm2, id] = pm.alloc(info, typeName, std::move(fields));
    return {std::move(pm2), std::move(id)};
  }

  // Initial configuration: entry instance, empty stack, one rollback snapshot.
  Configuration initial(PermanentMemory pm, const std::string& instanceId,
                        const std::string& method, std::vector<ValuePtr> args,
                        const std::string& sender, BigInt amount) const {
    const ContractInfo& info = rp_.contract(pm.instance(instanceId).type);
    auto it = info.methods.find(method);
    if (it == info.methods.end())
      throw NameError({}, pm.instance(instanceId).type + " has no method '" + method + "'");
    const MethodDecl& m = *it->second.decl;
    if (m.params.size() != args.size())
      throw NameError({}, "entry method '" + method + "' expects " +
                              std::to_string(m.params.size()) + " argument(s)");
    Configuration cfg;
    cfg.active = instanceId;
    cfg.pm = std::move(pm);
    cfg.rollback = {cfg.pm};
    cfg.method = method;
    cfg.sender = sender;
    cfg.amount = std::move(amount);
    for (size_t i = 0; i < args.size(); ++i) cfg.vol[m.params[i].name] = std::move(args[i]);
    cfg.cont = contOfBlock(m.body, nullptr);
    return cfg;
  }

  // --- stepping -------------------------------------------------------------

  StepOut step(const Configuration& cfg0, Trace& events) const {
    long fuel = adtFuelPerStep_;
    size_t mark = events.size();
    try {
      return dispatch(Configuration(cfg0), events, fuel);
    } catch (const EvalThrow& t) {
      // Evaluation errors become thrown error values in the current state.
      return unwindThrow(cfg0, t.error, events);
    } catch (const EvalStuck& s) {
      events.resize(mark);
      StepOut out;
      out.s = StepOut::S::Stuck;
      out.cfg = cfg0;
      out.stuckReason = s.reason;
      return out;
    } catch (const MemoryError& m) {
      events.resize(mark);
      StepOut out;
      out.s = StepOut::S::Stuck;
      out.cfg = cfg0;
      out.stuckReason = m.what();
      return out;
    }
  }

  RunResult run(Configuration cfg, long fuel, bool emitEntryEvents = true) const {
    RunResult res;
    if (emitEntryEvents)
      res.trace.push_back(TraceEvent::callEnter(cfg.sender, cfg.active, cfg.method, true));
    for (;;) {
      if (res.steps >= fuel) {
        res.status = RunStatus::FuelExhausted;
        res.final = std::move(cfg);
        return res;
      }
      StepOut out = step(cfg, res.trace);
      ++res.steps;
      switch (out.s) {
        case StepOut::S::Next:
          cfg = std::move(out.cfg);
          if (!cfg.rollbackInvariant())
            throw std::logic_error("rollback depth out of sync with open transactions");
          break;
        case StepOut::S::Terminated:
          res.status = RunStatus::Terminated;
          res.value = out.value;
          res.final = std::move(out.cfg);
          if (emitEntryEvents)
            res.trace.push_back(TraceEvent::callReturn(res.final.active, res.final.method, true));
          return res;
        case StepOut::S::Aborted:
          res.status = RunStatus::Aborted;
          res.error = out.value;
          res.final = std::move(out.cfg);
          return res;
        case StepOut::S::Stuck:
          res.status = RunStatus::Stuck;
          res.stuckReason = out.stuckReason;
          res.final = std::move(out.cfg);
          return res;
      }
    }
  }

private:
  // Blocks flatten transparently; they are structure, not computation.
  static ContPtr normalize(ContPtr c) {
    while (c && c->head->kind == StmtKind::Block) c = contOfBlock(c->head, c->tail);
    return c;
  }

  EvalCtx evalCtx(const Configuration& cfg, Trace& events, long& fuel) const {
    return EvalCtx{rp_, cfg.vol, cfg.pm, cfg.active, cfg.sender, cfg.amount, &events, &fuel};
  }

  StepOut dispatch(Configuration cfg, Trace& events, long& fuel) const {
    cfg.cont = normalize(cfg.cont);
    if (!cfg.cont) {
      // Method body exhausted: implicit `return` of unit.
      return doReturn(std::move(cfg), Value::unit(), events);
    }
    const StmtPtr stmt = cfg.cont->head;
    ContPtr rest = cfg.cont->tail;
    const EvalCtx ctx = evalCtx(cfg, events, fuel);

    switch (stmt->kind) {
      case StmtKind::Block:
        throw EvalStuck{"unnormalized block"};

      case StmtKind::If: {
        ValuePtr c = evalExpr(ctx, stmt->cond);
        if (c->kind != Value::Kind::Bool) throw EvalStuck{"if condition is not boolean"};
        cfg.cont = c->b ? contOfBlock(stmt->thenBody, rest)
                        : (stmt->elseBody ? contOfBlock(stmt->elseBody, rest) : rest);
        return next(std::move(cfg));
      }

      case StmtKind::While: {
        ValuePtr c = evalExpr(ctx, stmt->cond);
        if (c->kind != Value::Kind::Bool) throw EvalStuck{"while condition is not boolean"};
        if (c->b) {
          cfg.cont = contOfBlock(stmt->thenBody, contPush(stmt, rest));
        } else {
          cfg.cont = rest;
        }
        return next(std::move(cfg));
      }

      case StmtKind::Let: {
        ContPtr scopeCont = contOfBlock(stmt->scope, rest);
        if (stmt->callStmt) {
          return doCall(std::move(cfg), *stmt->callStmt, varLValue(stmt), std::nullopt, scopeCont,
                        events, fuel);
        }
        ValuePtr v;
        if (stmt->rhsIsNew) {
          auto [pm2, id] = allocNew(cfg.pm, stmt->rhs, ctx, events, fuel);
          cfg.pm = std::move(pm2);
          v = Value::contractRef(id);
        } else {
          v = evalExpr(ctx, stmt->rhs);
        }
        cfg.vol[stmt->var] = std::move(v);
        cfg.cont = scopeCont;
        return next(std::move(cfg));
      }

      case StmtKind::Assert: {
        ValuePtr c = evalExpr(ctx, stmt->cond);
        if (c->kind != Value::Kind::Bool) throw EvalStuck{"assert on non-boolean"};
        if (!c->b) return unwindThrow(cfg, Value::ofString("assertion failed"), events);
        cfg.cont = rest;
        return next(std::move(cfg));
      }

      case StmtKind::Assign: {
        ValuePtr v;
        if (stmt->rhsIsNew) {
          auto [pm2, id] = allocNew(cfg.pm, stmt->rhs, ctx, events, fuel);
          cfg.pm = std::move(pm2);
          v = Value::contractRef(id);
        } else {
          v = evalExpr(ctx, stmt->rhs);
        }
        bindLValue(cfg, stmt->lvalue, std::move(v), events);
        cfg.cont = rest;
        return next(std::move(cfg));
      }

      case StmtKind::Return: {
        ValuePtr v = stmt->rhs ? evalExpr(ctx, stmt->rhs) : Value::unit();
        cfg.cont = rest;
        return doReturn(std::move(cfg), std::move(v), events);
      }

      case StmtKind::Throw: {
        ValuePtr v = evalExpr(ctx, stmt->rhs);
        return unwindThrow(cfg, std::move(v), events);
      }

      case StmtKind::Call:
        return doCall(std::move(cfg), *stmt, nullptr, std::nullopt, rest, events, fuel);

      case StmtKind::CallAssign:
        return doCall(std::move(cfg), *stmt, stmt->lvalue, std::nullopt, rest, events, fuel);

      case StmtKind::Try: {
        const Stmt& inner = *stmt->callStmt;
        TryInfo info{stmt->abortVar, stmt->abortBody, stmt->successBody};
        ExprPtr bind = inner.kind == StmtKind::CallAssign ? inner.lvalue : nullptr;
        return doCall(std::move(cfg), inner, bind, info, rest, events, fuel);
      }
    }
    throw EvalStuck{"no rule for statement"};
  }

  static ExprPtr varLValue(const StmtPtr& let) {
    auto e = mkExpr(ExprKind::Var, let->pos);
    const_cast<Expr&>(*e).name = let->var;
    return e;
  }

  void bindLValue(Configuration& cfg, const ExprPtr& lv, ValuePtr v, Trace& events) const {
    if (lv->kind == ExprKind::Var) {
      cfg.vol[lv->name] = std::move(v);
      return;
    }
    if (lv->kind == ExprKind::FieldAccess) {
      cfg.pm = cfg.pm.write(cfg.active, lv->name, std::move(v));
      events.push_back(TraceEvent::fieldWrite(cfg.active, lv->name));
      return;
    }
    throw EvalStuck{"bad assignment target"};
  }

  std::pair<PermanentMemory, std::string> allocNew(PermanentMemory pm, const ExprPtr& newExpr,
                                                   const EvalCtx& ctx, Trace& events,
                                                   long& fuel) const {
    std::vector<ValuePtr> args;
    args.reserve(newExpr->args.size());
    for (const auto& a : newExpr->args) args.push_back(evalExpr(ctx, a));
    return execConstructor(std::move(pm), newExpr->name, std::move(args), ctx.active);
  }

  struct TryInfo {
    std::optional<std::string> abortVar;
    StmtPtr abortBody;
    StmtPtr successBody;
  };

  // --- calls ----------------------------------------------------------------

  StepOut doCall(Configuration cfg, const Stmt& call, ExprPtr bindLV,
                 std::optional<TryInfo> tryInfo, ContPtr rest, Trace& events, long& fuel) const {
    const EvalCtx ctx = evalCtx(cfg, events, fuel);

    bool internal = call.recv->kind == ExprKind::This && !call.transfer && !tryInfo;
    if (internal) {
      const std::string& type = cfg.pm.instance(cfg.active).type;
      const ContractInfo& info = rp_.contract(type);
      auto it = info.methods.find(call.method);
      if (it == info.methods.end())
        throw EvalStuck{type + " has no method '" + call.method + "'"};
      const MethodDecl& m = *it->second.decl;
      if (m.params.size() != call.args.size()) throw EvalStuck{"arity mismatch"};
      VolatileMemory calleeVol;
      for (size_t i = 0; i < call.args.size(); ++i)
        calleeVol[m.params[i].name] = evalExpr(ctx, call.args[i]);

      Frame f;
      f.kind = Frame::Kind::Internal;
      f.contract = cfg.active;
      f.method = cfg.method;
      f.savedVolatile = cfg.vol;
      f.savedSender = cfg.sender;
      f.savedAmount = cfg.amount;
      f.bindLValue = std::move(bindLV);
      f.rest = rest;
      cfg.stack.insert(cfg.stack.begin(), std::move(f));

      events.push_back(TraceEvent::callEnter(cfg.active, cfg.active, call.method, false));
      cfg.vol = std::move(calleeVol);
      cfg.method = call.method;
      cfg.cont = contOfBlock(m.body, nullptr);
      return next(std::move(cfg));
    }

    // Transactional call: snapshot, hole-bearing frame, sender/amount rebind.
    ValuePtr recvV = evalExpr(ctx, call.recv);
    BigInt amt = 0;
    if (call.transfer) {
      ValuePtr a = evalExpr(ctx, call.transfer);
      if (a->kind != Value::Kind::Int) throw EvalStuck{"transfer amount is not an integer"};
      amt = a->i;
    }
    if (!recvV->isRef()) throw EvalStuck{"method call on non-contract value"};
    const std::string callee = recvV->s;

    // Failures of the call itself (bad target, bad funds) raise inside the
    // transaction so this try's own abort clause observes them.
    ValuePtr entryError;
    const MethodDecl* m = nullptr;
    if (!cfg.pm.has(callee)) {
      entryError = Value::ofString("call target '" + callee + "' is not a contract instance");
    } else {
      const std::string& type = cfg.pm.instance(callee).type;
      const ContractInfo& info = rp_.contract(type);
      auto it = info.methods.find(call.method);
      if (it == info.methods.end()) {
        entryError = Value::ofString(type + " has no method '" + call.method + "'");
      } else {
        m = it->second.decl;
        if (m->params.size() != call.args.size()) throw EvalStuck{"arity mismatch"};
      }
    }
    if (amt < 0) entryError = Value::ofString("negative transfer amount");

    VolatileMemory calleeVol;
    if (!entryError) {
      for (size_t i = 0; i < call.args.size(); ++i)
        calleeVol[m->params[i].name] = evalExpr(ctx, call.args[i]);
    }

    cfg = snapshot(std::move(cfg));
    Frame f;
    f.kind = Frame::Kind::Transaction;
    f.contract = cfg.active;
    f.method = cfg.method;
    f.savedVolatile = cfg.vol;
    f.savedSender = cfg.sender;
    f.savedAmount = cfg.amount;
    f.bindLValue = std::move(bindLV);
    if (tryInfo) {
      f.abortVar = tryInfo->abortVar;
      f.abortBody = tryInfo->abortBody;
      f.successBody = tryInfo->successBody;
    }
    f.rest = rest;
    const std::string caller = cfg.active;
    cfg.stack.insert(cfg.stack.begin(), std::move(f));
    events.push_back(TraceEvent::callEnter(caller, callee, call.method, true));

    if (!entryError && amt != 0) {
      ValuePtr have = cfg.pm.read(caller, kBalanceField);
      if (have->i < amt) {
        entryError = Value::ofString("insufficient balance");
      } else {
        cfg.pm = cfg.pm.write(caller, kBalanceField, Value::ofInt(have->i - amt));
        events.push_back(TraceEvent::fieldWrite(caller, kBalanceField));
        ValuePtr calleeBal = cfg.pm.read(callee, kBalanceField);
        cfg.pm = cfg.pm.write(callee, kBalanceField, Value::ofInt(calleeBal->i + amt));
        events.push_back(TraceEvent::fieldWrite(callee, kBalanceField));
      }
    }

    cfg.sender = caller;
    cfg.amount = amt;
    cfg.method = call.method;
    if (entryError) {
      // The pseudo-callee immediately throws; active stays meaningful.
      cfg.active = cfg.pm.has(callee) ? callee : caller;
      cfg.vol = {};
      auto thr = mkStmt(StmtKind::Throw, call.pos);
      auto lit = mkExpr(ExprKind::StringLit, call.pos);
      const_cast<Expr&>(*lit).strValue = entryError->s;
      const_cast<Stmt&>(*thr).rhs = lit;
      cfg.cont = contPush(thr, nullptr);
    } else {
      cfg.active = callee;
      cfg.vol = std::move(calleeVol);
      cfg.cont = contOfBlock(m->body, nullptr);
    }
    return next(std::move(cfg));
  }

  // --- returns and unwinding ------------------------------------------------

  StepOut doReturn(Configuration cfg, ValuePtr v, Trace& events) const {
    if (cfg.stack.empty()) {
      StepOut out;
      out.s = StepOut::S::Terminated;
      out.value = std::move(v);
      out.cfg = std::move(cfg);
      return out;
    }
    Frame f = cfg.stack.front();
    cfg.stack.erase(cfg.stack.begin());
    events.push_back(TraceEvent::callReturn(cfg.active, cfg.method, true));

    if (f.kind == Frame::Kind::Transaction) {
      // ReturnFromTry I / III: keep the callee's permanent memory, drop the
      // matching snapshot, resume with the success body.
      if (cfg.rollback.empty()) throw EvalStuck{"rollback list underflow"};
      cfg.rollback.erase(cfg.rollback.begin());
      cfg.sender = f.savedSender;
      cfg.amount = f.savedAmount;
    }
    cfg.active = f.contract;
    cfg.method = f.method;
    cfg.vol = f.savedVolatile;
    if (f.bindLValue) bindLValue(cfg, f.bindLValue, std::move(v), events);
    cfg.cont = f.kind == Frame::Kind::Transaction && f.successBody
                   ? contOfBlock(f.successBody, f.rest)
                   : f.rest;
    return next(std::move(cfg));
  }

  StepOut unwindThrow(Configuration cfg, ValuePtr err, Trace& events) const {
    events.push_back(TraceEvent::callReturn(cfg.active, cfg.method, false));
    while (!cfg.stack.empty()) {
      Frame f = cfg.stack.front();
      cfg.stack.erase(cfg.stack.begin());
      if (f.kind == Frame::Kind::Internal) {
        // The parent invocation dies with the throw still in flight.
        events.push_back(TraceEvent::callReturn(f.contract, f.method, false));
        continue;
      }
      // ReturnFromTry II: restore the snapshot and run the abort body with
      // the pattern variable bound to the thrown error.
      cfg = revert(std::move(cfg));
      events.push_back(TraceEvent::revert(static_cast<int>(cfg.rollback.size()) - 1));
      cfg.active = f.contract;
      cfg.method = f.method;
      cfg.vol = f.savedVolatile;
      cfg.sender = f.savedSender;
      cfg.amount = f.savedAmount;
      if (f.abortBody) {
        if (f.abortVar) cfg.vol[*f.abortVar] = err;
        cfg.cont = contOfBlock(f.abortBody, f.rest);
      } else {
        // Bare external call: default abort rethrows.
        auto thr = mkStmt(StmtKind::Throw, {});
        auto lit = mkExpr(ExprKind::StringLit, {});
        const_cast<Expr&>(*lit).strValue =
            err->kind == Value::Kind::String ? err->s : valueToString(err);
        const_cast<Stmt&>(*thr).rhs = lit;
        cfg.cont = contPush(thr, f.rest);
      }
      return next(std::move(cfg));
    }
    // Uncaught at top level: the whole run aborts and the permanent memory
    // reverts to the initial snapshot.
    if (!cfg.rollback.empty()) {
      cfg.pm = cfg.rollback.back();
      cfg.rollback.clear();
      events.push_back(TraceEvent::revert(0));
    }
    StepOut out;
    out.s = StepOut::S::Aborted;
    out.value = std::move(err);
    out.cfg = std::move(cfg);
    return out;
  }

  static StepOut next(Configuration cfg) {
    StepOut out;
    out.s = StepOut::S::Next;
    out.cfg = std::move(cfg);
    return out;
  }

  // Field initialization for a constructor chain, parents first.
  PermanentMemory initFields(PermanentMemory pm, const std::string& typeName,
                             std::vector<ValuePtr> args, const std::string& sender,
                             std::map<std::string, ValuePtr>& fields) const {
    const ContractInfo& info = rp_.contract(typeName);
    const ConstructorDecl& ctor = info.decl->ctor;
    if (ctor.params.size() != args.size())
      throw EvalThrow{Value::ofString("constructor arity mismatch for " + typeName)};
    VolatileMemory env;
    for (size_t i = 0; i < args.size(); ++i) env[ctor.params[i].name] = std::move(args[i]);

    long fuel = adtFuelPerStep_;
    auto evalInit = [&](const ExprPtr& e) -> ValuePtr {
      if (e->kind == ExprKind::New) {
        std::vector<ValuePtr> nargs;
        EvalCtx ctx{rp_, env, pm, "", sender, 0, nullptr, &fuel};
        for (const auto& a : e->args) nargs.push_back(evalExpr(ctx, a));
        auto [pm2, id] = execConstructor(std::move(pm), e->name, std::move(nargs), sender);
        pm = std::move(pm2);
        return Value::contractRef(id);
      }
      EvalCtx ctx{rp_, env, pm, "", sender, 0, nullptr, &fuel};
      return evalExpr(ctx, e);
    };

    if (ctor.superArgs) {
      std::vector<ValuePtr> superVals;
      for (const auto& a : *ctor.superArgs) superVals.push_back(evalInit(a));
      pm = initFields(std::move(pm), *info.parent, std::move(superVals), sender, fields);
    }
    for (const auto& init : ctor.inits) fields[init.field] = evalInit(init.init);
    return pm;
  }

  const ResolvedProgram& rp_;
  long adtFuelPerStep_;
};

}  // namespace smartml
