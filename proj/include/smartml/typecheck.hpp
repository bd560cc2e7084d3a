#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smartml/json.hpp"
#include "smartml/locs.hpp"

namespace smartml {

// --- lock sets ---------------------------------------------------------------

struct LockPair {
  AliasSet aliases;
  std::string method;

  bool operator==(const LockPair& o) const { return method == o.method && aliases == o.aliases; }
  bool operator<(const LockPair& o) const {
    return method < o.method || (method == o.method && aliases < o.aliases);
  }
};

using LockSet = std::set<LockPair>;

inline bool lockConflict(const ResolvedProgram& rp, const IdentityTable& ids, const LockSet& delta,
                         const AliasSet& recv, const std::string& method,
                         LockPair* conflicting = nullptr) {
  for (const auto& lp : delta) {
    if (lp.method != method) continue;
    if (aliasSetsIntersect(rp, ids, lp.aliases, recv)) {
      if (conflicting) *conflicting = lp;
      return true;
    }
  }
  return false;
}

// --- partial state -----------------------------------------------------------

// Θ: contract-typed memory locations to alias sets. Unlisted locations default
// to the Top set of their declared type.
struct Theta {
  std::map<std::string, AliasSet> vars;
  std::map<LocKey, AliasSet> fieldLocs;

  bool operator==(const Theta& o) const { return vars == o.vars && fieldLocs == o.fieldLocs; }

  static Theta join(const Theta& a, const Theta& b) {
    Theta out = a;
    for (const auto& [k, v] : b.vars) {
      auto it = out.vars.find(k);
      if (it == out.vars.end()) out.vars[k] = v;
      else it->second = aliasUnion(it->second, v);
    }
    for (const auto& [k, v] : b.fieldLocs) {
      auto it = out.fieldLocs.find(k);
      if (it == out.fieldLocs.end()) out.fieldLocs[k] = v;
      else it->second = aliasUnion(it->second, v);
    }
    return out;
  }
};

// --- typing context ----------------------------------------------------------

struct TypingContext {
  std::map<std::string, Type> gamma;
  LockSet delta;
  Theta theta;
  LocMultiset sigma;
};

// --- reports -----------------------------------------------------------------

struct CheckFailure {
  SourcePos pos;
  std::string rule;       // the failed premise's rule
  std::string message;
  std::string contractCtx;   // contract whose code hosts the failing site
  std::string methodCtx;     // method hosting the failing site
  std::string lockedMethod;  // lock conflicts: the method of the pair
  std::string receiverAliases;
  std::vector<std::string> callPath;  // Cnt-Ok root down to the failing site

  json toJson() const {
    return json{{"line", pos.line},       {"col", pos.col},
                {"rule", rule},           {"message", message},
                {"contract", contractCtx}, {"method", methodCtx},
                {"lockedMethod", lockedMethod}, {"receiverAliases", receiverAliases},
                {"callPath", callPath}};
  }
};

struct RuleApplication {
  std::string rule;       // "Call-Safe" or "Call"
  std::string contractCtx;
  std::string methodCtx;
  std::string calleeMethod;
  SourcePos pos;
};

struct ContractReport {
  std::string contract;
  bool ok = true;
  std::vector<CheckFailure> failures;

  json toJson() const {
    json fs = json::array();
    for (const auto& f : failures) fs.push_back(f.toJson());
    return json{{"contract", contract}, {"verdict", ok ? "ok" : "rejected"}, {"failures", fs}};
  }
};

struct CheckReport {
  bool ok = true;
  std::vector<ContractReport> contracts;
  std::vector<RuleApplication> ruleApplications;
  std::vector<std::string> derivation;  // indented rule trace for --explain

  json toJson(bool withDerivation = false) const {
    json cs = json::array();
    for (const auto& c : contracts) cs.push_back(c.toJson());
    json out{{"verdict", ok ? "ok" : "rejected"}, {"contracts", cs}};
    if (withDerivation) out["derivation"] = derivation;
    return out;
  }
};

struct CheckReject {
  CheckFailure failure;
};

// --- the checker --------------------------------------------------------------

// Flow-sensitive reentrancy checking: locks Δ, partial state Θ, pending-access
// multiset Σ. Every call descent locks both the current method and the callee
// pair, so any aliased call cycle conflicts on its closing edge; an
// in-progress table short-circuits re-entrant checks of the same body under
// an equal-or-wider lock set.
class CheckEngine {
public:
  explicit CheckEngine(const ResolvedProgram& rp) : rp_(rp), locs_(rp, ids_) {}

  CheckReport checkProgram() {
    CheckReport report;
    for (const auto& c : rp_.ast.contracts) {
      report.contracts.push_back(checkContract(c.name));
      report.ok = report.ok && report.contracts.back().ok;
    }
    report.ruleApplications = ruleApps_;
    report.derivation = derivation_;
    return report;
  }

  ContractReport checkContract(const std::string& name) {
    ContractReport report;
    report.contract = name;
    const ContractInfo& info = rp_.contract(name);
    IdentId self = ids_.fresh(name);
    logLine(0, "Cnt-Ok " + name + "  (this ↦ " + ids_.nameOf(self) + ")");

    checkConstructor(report, info, name);

    for (const auto& mname : info.methodOrder) {
      callPath_ = {name + "." + mname};
      try {
        Theta theta;
        theta.vars["this"] = {self};
        checkMethodBody(name, mname, {self}, {}, theta, 1);
      } catch (const CheckReject& r) {
        report.ok = false;
        report.failures.push_back(r.failure);
      }
    }
    return report;
  }

  // Re-checks a residual continuation (preservation property): the statements
  // must type under the method's environment extended with `extraGamma`.
  bool checkResidual(const std::string& contractType, const std::string& method,
                     const std::vector<StmtPtr>& stmts, const std::map<std::string, Type>& extraGamma,
                     std::string* err = nullptr) {
    try {
      const ContractInfo& info = rp_.contract(contractType);
      IdentId self = ids_.fresh(contractType);
      TypingContext ctx;
      seedGamma(ctx.gamma, info);
      auto mit = info.methods.find(method);
      if (mit != info.methods.end())
        for (const auto& p : mit->second.decl->params) ctx.gamma[p.name] = p.type;
      for (const auto& [k, v] : extraGamma) ctx.gamma[k] = v;
      ctx.theta.vars["this"] = {self};
      for (const auto& [k, v] : ctx.gamma)
        if (v.isContract() && !ctx.theta.vars.count(k)) ctx.theta.vars[k] = {ids_.top(v.name)};
      auto block = mkStmt(StmtKind::Block);
      const_cast<Stmt&>(*block).stmts = stmts;
      ctx.sigma = locs_.ofStmt({self}, contractType, block);
      callPath_ = {contractType + "." + method + " (residual)"};
      checkStmt(std::move(ctx), {self}, contractType, method, block, 1);
      return true;
    } catch (const CheckReject& r) {
      if (err) *err = r.failure.message;
      return false;
    }
  }

  const IdentityTable& identities() const { return ids_; }

private:
  // --- environment helpers ---

  void seedGamma(std::map<std::string, Type>& gamma, const ContractInfo& info) const {
    for (const auto& f : info.allFields) gamma[f.name] = f.type;
  }

  [[noreturn]] void reject(SourcePos pos, const std::string& rule, const std::string& message,
                           const std::string& contractCtx, const std::string& methodCtx,
                           const std::string& lockedMethod = "",
                           const std::string& receiverAliases = "") const {
    CheckFailure f;
    f.pos = pos;
    f.rule = rule;
    f.message = message;
    f.contractCtx = contractCtx;
    f.methodCtx = methodCtx;
    f.lockedMethod = lockedMethod;
    f.receiverAliases = receiverAliases;
    f.callPath = callPath_;
    throw CheckReject{f};
  }

  void logLine(int depth, const std::string& line) {
    derivation_.push_back(std::string(static_cast<size_t>(depth) * 2, ' ') + line);
  }

  // --- value typing (Appendix-B rules plus the extended literals) ---

  Type typeValue(const TypingContext& ctx, const std::string& contractType, const ExprPtr& e) const {
    switch (e->kind) {
      case ExprKind::IntLit: return Type::Int();
      case ExprKind::BoolLit: return Type::Bool();
      case ExprKind::StringLit: return Type::String();
      case ExprKind::Amount: return Type::Int();
      case ExprKind::Sender: return Type::Address();
      case ExprKind::This: return Type::Contract(contractType);
      case ExprKind::Var: {
        auto it = ctx.gamma.find(e->name);
        if (it == ctx.gamma.end())
          reject(e->pos, "Var", "variable '" + e->name + "' has no type", contractType, "");
        return it->second;
      }
      case ExprKind::FieldAccess: {
        const FieldDecl* f = rp_.contract(contractType).findField(e->name);
        if (!f) reject(e->pos, "Var", "unknown field '" + e->name + "'", contractType, "");
        return f->type;
      }
      case ExprKind::AdtAccess: {
        const AdtInfo& info = rp_.adt(e->adtName);
        for (const auto& [cn, ctor] : info.ctors)
          for (const auto& p : ctor->params)
            if (p.name == e->name) return p.type;
        reject(e->pos, "Var", "unknown component '" + e->name + "'", contractType, "");
      }
      case ExprKind::Not: {
        requireType(ctx, contractType, e->lhs, Type::Bool(), "Op");
        return Type::Bool();
      }
      case ExprKind::Binary: {
        Type l = typeValue(ctx, contractType, e->lhs);
        Type r = typeValue(ctx, contractType, e->rhs);
        if (isArith(e->op) || isComparison(e->op)) {
          if (l != Type::Int() || r != Type::Int())
            reject(e->pos, isArith(e->op) ? "Op" : "BOp",
                   "operator needs int operands, got " + l.str() + " and " + r.str(), contractType,
                   "");
          return isArith(e->op) ? Type::Int() : Type::Bool();
        }
        if (isLogic(e->op)) {
          if (l != Type::Bool() || r != Type::Bool())
            reject(e->pos, "BOp", "boolean operator on " + l.str() + " and " + r.str(),
                   contractType, "");
          return Type::Bool();
        }
        // equality: operands of one subtyping-related type
        if (!rp_.isSubtype(l, r) && !rp_.isSubtype(r, l))
          reject(e->pos, "BOp", "cannot compare " + l.str() + " with " + r.str(), contractType, "");
        return Type::Bool();
      }
      case ExprKind::AdtCall: {
        const AdtInfo& info = rp_.adt(e->adtName);
        std::vector<Param> params;
        Type ret = Type::Unit();
        if (e->isAdtCtor) {
          params = info.ctors.at(e->name)->params;
          ret = Type::Adt(e->adtName);
        } else {
          const AdtFunction& fn = *info.functions.at(e->name);
          params = fn.params;
          ret = fn.returnType;
        }
        for (size_t i = 0; i < e->args.size(); ++i)
          requireSubtype(ctx, contractType, e->args[i], params[i].type, "Op");
        return ret;
      }
      case ExprKind::New: {
        const ContractInfo& info = rp_.contract(e->name);
        const auto& params = info.decl->ctor.params;
        for (size_t i = 0; i < e->args.size(); ++i)
          requireSubtype(ctx, contractType, e->args[i], params[i].type, "Op");
        return Type::Contract(e->name);
      }
      case ExprKind::DotCall:
        reject(e->pos, "Op", "unresolved call in expression", contractType, "");
    }
    reject(e->pos, "Op", "untypeable expression", contractType, "");
  }

  void requireType(const TypingContext& ctx, const std::string& contractType, const ExprPtr& e,
                   const Type& want, const std::string& rule) const {
    Type got = typeValue(ctx, contractType, e);
    if (got != want)
      reject(e->pos, rule, "expected " + want.str() + ", got " + got.str(), contractType, "");
  }

  void requireSubtype(const TypingContext& ctx, const std::string& contractType, const ExprPtr& e,
                      const Type& want, const std::string& rule) const {
    Type got = typeValue(ctx, contractType, e);
    if (!rp_.isSubtype(got, want))
      reject(e->pos, rule, "expected " + want.str() + ", got " + got.str(), contractType, "");
  }

  // --- Θ lookups ---

  AliasSet thetaOfVar(const TypingContext& ctx, const std::string& name) {
    auto it = ctx.theta.vars.find(name);
    if (it != ctx.theta.vars.end()) return it->second;
    auto g = ctx.gamma.find(name);
    if (g != ctx.gamma.end() && g->second.isContract()) return {ids_.top(g->second.name)};
    return {};
  }

  AliasSet thetaOfLoc(const TypingContext& ctx, const LocKey& key, const Type& declared) {
    auto it = ctx.theta.fieldLocs.find(key);
    if (it != ctx.theta.fieldLocs.end()) return it->second;
    if (declared.isContract()) return {ids_.top(declared.name)};
    return {};
  }

  AliasSet thetaOfReceiver(TypingContext& ctx, const AliasSet& self,
                           const std::string& contractType, const ExprPtr& recv,
                           const std::vector<std::string>& candidates) {
    switch (recv->kind) {
      case ExprKind::This:
        return thetaOfVar(ctx, "this");
      case ExprKind::Var:
        return thetaOfVar(ctx, recv->name);
      case ExprKind::FieldAccess: {
        const FieldDecl* f = rp_.contract(contractType).findField(recv->name);
        AliasSet out;
        for (IdentId id : self) {
          AliasSet part = thetaOfLoc(ctx, {id, recv->name}, f->type);
          out.insert(part.begin(), part.end());
        }
        return out;
      }
      case ExprKind::Sender: {
        // Maximally conservative: sender may be any instance of any contract
        // type that declares the invoked method.
        AliasSet out;
        for (const auto& c : candidates) out.insert(ids_.top(c));
        return out;
      }
      default:
        return {};
    }
  }

  // --- statement rules ---

  TypingContext checkStmt(TypingContext ctx, const AliasSet& self, const std::string& contractType,
                          const std::string& method, const StmtPtr& s, int depth) {
    switch (s->kind) {
      case StmtKind::Block: {
        // Succ: thread contexts left to right.
        for (const auto& inner : s->stmts)
          ctx = checkStmt(std::move(ctx), self, contractType, method, inner, depth);
        return ctx;
      }

      case StmtKind::If: {
        requireType(ctx, contractType, s->cond, Type::Bool(), "If-Else");
        TypingContext thenOut = checkStmt(ctx, self, contractType, method, s->thenBody, depth);
        TypingContext elseOut =
            s->elseBody ? checkStmt(ctx, self, contractType, method, s->elseBody, depth) : ctx;
        TypingContext out;
        out.gamma = ctx.gamma;
        out.delta = thenOut.delta;
        out.delta.insert(elseOut.delta.begin(), elseOut.delta.end());
        out.theta = Theta::join(thenOut.theta, elseOut.theta);
        out.sigma = ctx.sigma;
        out.sigma.subtract(locs_.ofStmt(self, contractType, s));
        return out;
      }

      case StmtKind::While: {
        requireType(ctx, contractType, s->cond, Type::Bool(), "While");
        // fixpoint(Γi; Δi; Θi; Σi ⊢ s ⟹ …): join with Δ/Θ unions and Σ
        // pointwise minimum until stable.
        TypingContext j = ctx;
        for (int iter = 0;; ++iter) {
          if (iter > 64) throw std::logic_error("while fixpoint failed to stabilize");
          TypingContext t = checkStmt(j, self, contractType, method, s->thenBody, depth);
          LockSet delta = j.delta;
          delta.insert(t.delta.begin(), t.delta.end());
          Theta theta = Theta::join(j.theta, t.theta);
          LocMultiset sigma = LocMultiset::pointwiseMin(j.sigma, t.sigma);
          if (delta == j.delta && theta == j.theta && sigma == j.sigma) break;
          j.delta = std::move(delta);
          j.theta = std::move(theta);
          j.sigma = std::move(sigma);
        }
        TypingContext out = std::move(j);
        out.gamma = ctx.gamma;
        out.sigma = ctx.sigma;
        out.sigma.subtract(locs_.ofStmt(self, contractType, s));
        return out;
      }

      case StmtKind::Let: {
        Type bound;
        if (s->callStmt) {
          ctx = checkCall(std::move(ctx), self, contractType, method, *s->callStmt, depth, &bound);
          ctx.gamma[s->var] = bound;
          if (bound.isContract()) ctx.theta.vars[s->var] = {ids_.top(bound.name)};
        } else {
          bound = typeValue(ctx, contractType, s->rhs);
          if (s->declType) {
            if (!rp_.isSubtype(bound, *s->declType))
              reject(s->pos, "Let", "initializer type " + bound.str() + " does not match " +
                                        s->declType->str(), contractType, method);
            bound = *s->declType;
          }
          ctx.gamma[s->var] = bound;
          if (bound.isContract()) ctx.theta.vars[s->var] = assignAliases(ctx, self, contractType, s->rhs, bound);
          ctx.sigma.subtract(locs_.ofExpr(self, contractType, s->rhs));
        }
        return checkStmt(std::move(ctx), self, contractType, method, s->scope, depth);
      }

      case StmtKind::Assert: {
        requireType(ctx, contractType, s->cond, Type::Bool(), "Assert");
        ctx.sigma.subtract(locs_.ofExpr(self, contractType, s->cond));
        return ctx;
      }

      case StmtKind::Assign: {
        Type lt = typeValue(ctx, contractType, s->lvalue);
        Type rt = typeValue(ctx, contractType, s->rhs);
        if (!rp_.isSubtype(rt, lt))
          reject(s->pos, lt.isContract() ? "Assign-Cnt" : "Assign",
                 "cannot assign " + rt.str() + " to " + lt.str(), contractType, method);
        if (lt.isContract()) {
          AliasSet aliases = assignAliases(ctx, self, contractType, s->rhs, rt);
          if (s->lvalue->kind == ExprKind::Var) {
            ctx.theta.vars[s->lvalue->name] = aliases;
          } else {
            for (IdentId id : self) ctx.theta.fieldLocs[{id, s->lvalue->name}] = aliases;
          }
        }
        ctx.sigma.subtract(locs_.ofStmt(self, contractType, s));
        return ctx;
      }

      case StmtKind::Return: {
        if (s->rhs) {
          Type rt = typeValue(ctx, contractType, s->rhs);
          Type want = methodReturnType(contractType, method);
          if (!rp_.isSubtype(rt, want))
            reject(s->pos, "Return", "returning " + rt.str() + " from a method of type " +
                                         want.str(), contractType, method);
          ctx.sigma.subtract(locs_.ofExpr(self, contractType, s->rhs));
        }
        return ctx;
      }

      case StmtKind::Throw: {
        typeValue(ctx, contractType, s->rhs);  // must type; any type may be thrown
        ctx.sigma.subtract(locs_.ofExpr(self, contractType, s->rhs));
        return ctx;
      }

      case StmtKind::Call:
      case StmtKind::CallAssign:
        return checkCall(std::move(ctx), self, contractType, method, *s, depth, nullptr);

      case StmtKind::Try: {
        // Try-Abort: abort and success both check from the call's output.
        TypingContext afterCall =
            checkCall(ctx, self, contractType, method, *s->callStmt, depth, nullptr);
        TypingContext abortCtx = afterCall;
        if (s->abortVar) abortCtx.gamma[*s->abortVar] = Type::String();
        TypingContext abortOut =
            checkStmt(std::move(abortCtx), self, contractType, method, s->abortBody, depth);
        TypingContext successOut =
            checkStmt(afterCall, self, contractType, method, s->successBody, depth);
        TypingContext out;
        out.gamma = ctx.gamma;
        out.delta = afterCall.delta;
        out.delta.insert(abortOut.delta.begin(), abortOut.delta.end());
        out.delta.insert(successOut.delta.begin(), successOut.delta.end());
        out.theta = Theta::join(afterCall.theta, Theta::join(abortOut.theta, successOut.theta));
        out.sigma = ctx.sigma;
        out.sigma.subtract(locs_.ofStmt(self, contractType, s));
        return out;
      }
    }
    return ctx;
  }

  // Assign-Cnt: copying a memory location copies its aliases; any other rhs
  // is approximated by the Top set of its static type.
  AliasSet assignAliases(TypingContext& ctx, const AliasSet& self, const std::string& contractType,
                         const ExprPtr& rhs, const Type& rhsType) {
    if (rhs->kind == ExprKind::Var) return thetaOfVar(ctx, rhs->name);
    if (rhs->kind == ExprKind::This) return thetaOfVar(ctx, "this");
    if (rhs->kind == ExprKind::FieldAccess) {
      const FieldDecl* f = rp_.contract(contractType).findField(rhs->name);
      AliasSet out;
      for (IdentId id : self) {
        AliasSet part = thetaOfLoc(ctx, {id, rhs->name}, f->type);
        out.insert(part.begin(), part.end());
      }
      return out;
    }
    return {ids_.top(rhsType.isContract() ? rhsType.name : contractType)};
  }

  Type methodReturnType(const std::string& contractType, const std::string& method) const {
    const ContractInfo& info = rp_.contract(contractType);
    auto it = info.methods.find(method);
    if (it == info.methods.end()) return Type::Unit();
    return it->second.decl->returnType;
  }

  // --- the call rules ---

  TypingContext checkCall(TypingContext ctx, const AliasSet& self, const std::string& contractType,
                          const std::string& method, const Stmt& call, int depth, Type* resultOut) {
    // mtype / argument typing.
    Type recvType = receiverType(ctx, contractType, call.recv);
    std::vector<std::string> candidates;
    if (recvType.isContract()) {
      candidates = {recvType.name};
    } else if (recvType.kind == TypeKind::Address) {
      candidates = rp_.contractsDeclaring(call.method);
      if (candidates.empty())
        reject(call.pos, "Call", "no contract declares '" + call.method + "'", contractType,
               method);
    } else {
      reject(call.pos, "Call", "receiver of type " + recvType.str() + " is not a contract",
             contractType, method);
    }
    Type retType = Type::Unit();
    for (const auto& cand : candidates) {
      const ContractInfo& info = rp_.contract(cand);
      auto mit = info.methods.find(call.method);
      if (mit == info.methods.end())
        reject(call.pos, "Call", cand + " has no method '" + call.method + "'", contractType,
               method);
      const MethodDecl& m = *mit->second.decl;
      if (m.params.size() != call.args.size())
        reject(call.pos, "Call", "arity mismatch calling '" + call.method + "'", contractType,
               method);
      for (size_t i = 0; i < call.args.size(); ++i)
        requireSubtype(ctx, contractType, call.args[i], m.params[i].type, "Call");
      retType = m.returnType;
    }
    if (call.transfer) requireSubtype(ctx, contractType, call.transfer, Type::Int(), "Call");
    if (resultOut) *resultOut = retType;

    AliasSet recvAliases = thetaOfReceiver(ctx, self, contractType, call.recv, candidates);
    if (recvAliases.empty())
      for (const auto& cand : candidates) recvAliases.insert(ids_.top(cand));

    // Shared premise of Call-Safe and Call: the receiver/method pair must not
    // be locked (footnote: the pair stands for one pair per alias).
    LockPair conflict;
    if (lockConflict(rp_, ids_, ctx.delta, recvAliases, call.method, &conflict)) {
      logLine(depth,
              "✗ ⟨" + aliasSetStr(ids_, recvAliases) + ", " + call.method + "⟩ ∩ Δ ≠ ∅");
      reject(call.pos, "Call",
             "method '" + call.method + "' is locked for receiver aliasing " +
                 aliasSetStr(ids_, conflict.aliases),
             contractType, method, call.method, aliasSetStr(ids_, recvAliases));
    }

    // Recursive premise: the callee body checks with the current method and
    // the callee pair locked.
    LockSet recDelta = ctx.delta;
    recDelta.insert({thetaOfVar(ctx, "this"), method});
    recDelta.insert({recvAliases, call.method});
    for (const auto& cand : candidates) {
      AliasSet calleeSelf = restrictToType(recvAliases, cand);
      callPath_.push_back(cand + "." + call.method);
      checkMethodBody(cand, call.method, calleeSelf, recDelta, ctx.theta, depth + 1);
      callPath_.pop_back();
    }

    // Rule selection: Call-Safe if no relevant access is pending after the
    // call, or an internal call whose body touches only irrelevant fields.
    LocMultiset after = ctx.sigma;
    after.subtract(locs_.ofStmt(self, contractType, stmtOf(call)));
    bool sigmaSafe = allIrrelevant(rp_, ids_, after);
    bool internalSafe = false;
    if (!sigmaSafe && recvAliases == thetaOfVar(ctx, "this")) {
      internalSafe = true;
      for (const auto& cand : candidates) {
        LocMultiset bodyLocs = locs_.ofMethod(recvAliases, cand, call.method);
        if (!allIrrelevant(rp_, ids_, bodyLocs)) {
          internalSafe = false;
          break;
        }
      }
    }
    bool safe = sigmaSafe || internalSafe;
    logLine(depth, std::string(safe ? "Call-Safe " : "Call ") + contractType + "." + method +
                       " ⊢ " + printReceiver(call.recv) + "." + call.method + "(…)");
    ruleApps_.push_back({safe ? "Call-Safe" : "Call", contractType, method, call.method, call.pos});
    if (!safe) ctx.delta.insert({recvAliases, call.method});

    // Assignment-form binding.
    if (call.kind == StmtKind::CallAssign && call.lvalue) {
      Type lt = typeValue(ctx, contractType, call.lvalue);
      if (!rp_.isSubtype(retType, lt))
        reject(call.pos, "Assign", "cannot assign " + retType.str() + " to " + lt.str(),
               contractType, method);
      if (lt.isContract()) {
        AliasSet aliases = {ids_.top(retType.isContract() ? retType.name : lt.name)};
        if (call.lvalue->kind == ExprKind::Var) {
          ctx.theta.vars[call.lvalue->name] = aliases;
        } else {
          for (IdentId id : self) ctx.theta.fieldLocs[{id, call.lvalue->name}] = aliases;
        }
      }
    }

    ctx.sigma.subtract(locs_.ofStmt(self, contractType, stmtOf(call)));
    return ctx;
  }

  static StmtPtr stmtOf(const Stmt& s) { return std::make_shared<Stmt>(s); }

  AliasSet restrictToType(const AliasSet& s, const std::string& type) {
    AliasSet out;
    for (IdentId id : s) {
      const std::string& t = ids_.typeOf(id);
      if (rp_.isSubcontract(t, type) || rp_.isSubcontract(type, t)) out.insert(id);
    }
    if (out.empty()) out.insert(ids_.top(type));
    return out;
  }

  Type receiverType(const TypingContext& ctx, const std::string& contractType,
                    const ExprPtr& recv) const {
    return typeValue(ctx, contractType, recv);
  }

  std::string printReceiver(const ExprPtr& recv) const {
    switch (recv->kind) {
      case ExprKind::This: return "this";
      case ExprKind::Sender: return "sender";
      case ExprKind::Var: return recv->name;
      case ExprKind::FieldAccess: return "this." + recv->name;
      default: return "?";
    }
  }

  // --- Mth-Ok ---

  struct InProgress {
    std::string contract;
    std::string method;
    AliasSet self;
    LockSet delta;
  };

  void checkMethodBody(const std::string& contractType, const std::string& method,
                       const AliasSet& self, const LockSet& delta, const Theta& callerTheta,
                       int depth) {
    // Coinductive cut: a body already being checked under an equal-or-smaller
    // lock set need not be re-entered (its own descents carry the locks that
    // rule out harmful cycles).
    for (const auto& ip : inProgress_) {
      if (ip.contract == contractType && ip.method == method && ip.self == self &&
          std::includes(delta.begin(), delta.end(), ip.delta.begin(), ip.delta.end()))
        return;
    }
    MemoKey key{contractType, method, self, delta};
    auto hit = memo_.find(key);
    if (hit != memo_.end()) {
      if (hit->second) return;
      // replay the recorded failure
      throw CheckReject{failureMemo_.at(key)};
    }

    const ContractInfo& info = rp_.contract(contractType);
    auto mit = info.methods.find(method);
    if (mit == info.methods.end())
      reject({}, "Mth-Ok", contractType + " has no method '" + method + "'", contractType, method);
    const MethodDecl& m = *mit->second.decl;

    logLine(depth, "Mth-Ok " + contractType + "." + method + "  Δ=" + lockSetStr(delta));

    TypingContext ctx;
    seedGamma(ctx.gamma, info);
    for (const auto& p : m.params) ctx.gamma[p.name] = p.type;
    ctx.delta = delta;
    ctx.theta = callerTheta;
    ctx.theta.vars["this"] = self;
    for (const auto& p : m.params)
      if (p.type.isContract()) ctx.theta.vars[p.name] = {ids_.top(p.type.name)};
    ctx.sigma = locs_.ofStmt(self, contractType, m.body);

    inProgress_.push_back({contractType, method, self, delta});
    try {
      checkStmt(std::move(ctx), self, contractType, method, m.body, depth);
    } catch (const CheckReject& r) {
      inProgress_.pop_back();
      memo_[key] = false;
      failureMemo_[key] = r.failure;
      throw;
    }
    inProgress_.pop_back();
    memo_[key] = true;
  }

  std::string lockSetStr(const LockSet& delta) const {
    std::string out = "{";
    bool first = true;
    for (const auto& lp : delta) {
      if (!first) out += ", ";
      out += "⟨" + aliasSetStr(ids_, lp.aliases) + ", " + lp.method + "⟩";
      first = false;
    }
    return out + "}";
  }

  // Constructor shape: already structurally validated by the resolver; here
  // the initializer expressions must type against the field declarations.
  void checkConstructor(ContractReport& report, const ContractInfo& info,
                        const std::string& name) {
    try {
      TypingContext ctx;
      for (const auto& p : info.decl->ctor.params) ctx.gamma[p.name] = p.type;
      for (const auto& init : info.decl->ctor.inits) {
        const FieldDecl* f = info.findField(init.field);
        requireSubtype(ctx, name, init.init, f->type, "Cnt-Ok");
      }
      if (info.decl->ctor.superArgs) {
        const ContractInfo& pinfo = rp_.contract(*info.parent);
        const auto& pparams = pinfo.decl->ctor.params;
        for (size_t i = 0; i < pparams.size(); ++i)
          requireSubtype(ctx, name, (*info.decl->ctor.superArgs)[i], pparams[i].type, "Cnt-Ok");
      }
    } catch (const CheckReject& r) {
      report.ok = false;
      report.failures.push_back(r.failure);
    }
  }

  struct MemoKey {
    std::string contract;
    std::string method;
    AliasSet self;
    LockSet delta;

    bool operator<(const MemoKey& o) const {
      if (contract != o.contract) return contract < o.contract;
      if (method != o.method) return method < o.method;
      if (self != o.self) return self < o.self;
      return delta < o.delta;
    }
  };

  const ResolvedProgram& rp_;
  IdentityTable ids_;
  LocsComputer locs_;
  std::vector<InProgress> inProgress_;
  std::map<MemoKey, bool> memo_;
  std::map<MemoKey, CheckFailure> failureMemo_;
  std::vector<RuleApplication> ruleApps_;
  std::vector<std::string> derivation_;
  std::vector<std::string> callPath_;
};

inline CheckReport checkProgram(const ResolvedProgram& rp) {
  return CheckEngine(rp).checkProgram();
}

}  // namespace smartml
