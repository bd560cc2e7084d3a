#pragma once

#include <string>
#include <vector>

#include "smartml/memory.hpp"
#include "smartml/runtime.hpp"

namespace smartml {

// A SmartML-level error value in flight. Uniformly catchable by try/abort.
struct EvalThrow {
  ValuePtr error;
};

// No semantic rule applies (ill-typed input reached the evaluator).
struct EvalStuck {
  std::string reason;
};

inline EvalThrow throwString(const std::string& tag) {
  return EvalThrow{Value::ofString(tag)};
}

struct EvalCtx {
  const ResolvedProgram& rp;
  const VolatileMemory& vol;
  const PermanentMemory& pm;
  std::string active;   // empty inside constructors (no `this` yet)
  std::string sender;
  BigInt amount;
  Trace* sink = nullptr;      // field-read events
  long* adtFuel = nullptr;    // shared reduction budget for ADT functions

  EvalCtx withVol(const VolatileMemory& v) const {
    EvalCtx c = *this;
    return EvalCtx{c.rp, v, c.pm, c.active, c.sender, c.amount, c.sink, c.adtFuel};
  }
};

inline ValuePtr evalExpr(const EvalCtx& ctx, const ExprPtr& e);

inline ValuePtr evalAdtFunction(const EvalCtx& ctx, const std::string& adtName,
                                const AdtFunction& fn, std::vector<ValuePtr> args);

inline const AdtFunction& adtFunctionOf(const ResolvedProgram& rp, const std::string& adtName,
                                        const std::string& fname) {
  const AdtInfo& info = rp.adt(adtName);
  auto it = info.functions.find(fname);
  if (it == info.functions.end())
    throw EvalStuck{"no ADT function '" + fname + "' on " + adtName};
  return *it->second;
}

inline ValuePtr evalAdtBody(const EvalCtx& ctx, const std::string& adtName, const AdtBodyPtr& body,
                            VolatileMemory env) {
  const AdtBody* cur = body.get();
  for (;;) {
    EvalCtx inner = ctx.withVol(env);
    switch (cur->kind) {
      case AdtBodyKind::Return:
        return evalExpr(inner, cur->expr);
      case AdtBodyKind::If: {
        ValuePtr c = evalExpr(inner, cur->expr);
        if (c->kind != Value::Kind::Bool) throw EvalStuck{"ADT if condition is not boolean"};
        cur = (c->b ? cur->thenBody : cur->elseBody).get();
        break;
      }
      case AdtBodyKind::Switch: {
        ValuePtr scrut = evalExpr(inner, cur->expr);
        const AdtBody* chosen = nullptr;
        for (const auto& [pat, caseBody] : cur->cases) {
          if (pat.isCtor) {
            if (scrut->kind == Value::Kind::Adt && scrut->ctor == pat.ctorName) {
              chosen = caseBody.get();
              break;
            }
          } else {
            ValuePtr lit = evalExpr(inner, pat.literal);
            if (valueEq(scrut, lit)) {
              chosen = caseBody.get();
              break;
            }
          }
        }
        if (!chosen && cur->defaultCase) chosen = cur->defaultCase.get();
        if (!chosen) throw throwString("non-exhaustive switch in " + adtName);
        cur = chosen;
        break;
      }
      case AdtBodyKind::LocalBind: {
        env[cur->bindName] = evalExpr(inner, cur->expr);
        cur = cur->rest.get();
        break;
      }
    }
  }
}

inline ValuePtr evalAdtFunction(const EvalCtx& ctx, const std::string& adtName,
                                const AdtFunction& fn, std::vector<ValuePtr> args) {
  if (args.size() != fn.params.size())
    throw EvalStuck{"arity mismatch calling ADT function '" + fn.name + "'"};
  if (ctx.adtFuel) {
    if (*ctx.adtFuel <= 0) throw throwString("ADT evaluation budget exhausted");
    --*ctx.adtFuel;
  }
  VolatileMemory env;
  for (size_t i = 0; i < args.size(); ++i) env[fn.params[i].name] = std::move(args[i]);
  return evalAdtBody(ctx, adtName, fn.body, std::move(env));
}

inline ValuePtr evalExpr(const EvalCtx& ctx, const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::IntLit: return Value::ofInt(e->intValue);
    case ExprKind::BoolLit: return Value::ofBool(e->boolValue);
    case ExprKind::StringLit: return Value::ofString(e->strValue);
    case ExprKind::Var: {
      auto it = ctx.vol.find(e->name);
      if (it == ctx.vol.end()) throw EvalStuck{"unbound variable '" + e->name + "'"};
      return it->second;
    }
    case ExprKind::This:
      if (ctx.active.empty()) throw EvalStuck{"'this' is not available here"};
      return Value::contractRef(ctx.active);
    case ExprKind::Sender: return Value::address(ctx.sender);
    case ExprKind::Amount: return Value::ofInt(ctx.amount);
    case ExprKind::FieldAccess: {
      if (ctx.active.empty()) throw EvalStuck{"field access outside a contract"};
      ValuePtr v = ctx.pm.read(ctx.active, e->name);
      if (ctx.sink) ctx.sink->push_back(TraceEvent::fieldRead(ctx.active, e->name));
      return v;
    }
    case ExprKind::AdtAccess: {
      ValuePtr base = evalExpr(ctx, e->lhs);
      if (base->kind != Value::Kind::Adt)
        throw EvalStuck{"component access on non-ADT value"};
      const AdtInfo& info = ctx.rp.adt(base->adtName);
      auto it = info.ctors.find(base->ctor);
      if (it != info.ctors.end()) {
        const auto& params = it->second->params;
        for (size_t i = 0; i < params.size(); ++i)
          if (params[i].name == e->name) return base->fieldsV[i];
      }
      throw throwString("value " + base->ctor + " has no component '" + e->name + "'");
    }
    case ExprKind::Not: {
      ValuePtr v = evalExpr(ctx, e->lhs);
      if (v->kind != Value::Kind::Bool) throw EvalStuck{"'!' on non-boolean"};
      return Value::ofBool(!v->b);
    }
    case ExprKind::Binary: {
      if (isLogic(e->op)) {
        ValuePtr l = evalExpr(ctx, e->lhs);
        if (l->kind != Value::Kind::Bool) throw EvalStuck{"boolean operator on non-boolean"};
        // short-circuit
        if (e->op == BinOp::And && !l->b) return Value::ofBool(false);
        if (e->op == BinOp::Or && l->b) return Value::ofBool(true);
        ValuePtr r = evalExpr(ctx, e->rhs);
        if (r->kind != Value::Kind::Bool) throw EvalStuck{"boolean operator on non-boolean"};
        return Value::ofBool(r->b);
      }
      ValuePtr l = evalExpr(ctx, e->lhs);
      ValuePtr r = evalExpr(ctx, e->rhs);
      if (isEquality(e->op)) {
        bool eq = valueEq(l, r);
        return Value::ofBool(e->op == BinOp::Eq ? eq : !eq);
      }
      if (l->kind != Value::Kind::Int || r->kind != Value::Kind::Int)
        throw EvalStuck{"arithmetic on non-integers"};
      switch (e->op) {
        case BinOp::Add: return Value::ofInt(l->i + r->i);
        case BinOp::Sub: return Value::ofInt(l->i - r->i);
        case BinOp::Mul: return Value::ofInt(l->i * r->i);
        case BinOp::Div: {
          if (r->i == 0) throw throwString("division by zero");
          // truncate toward zero
          BigInt q = l->i / r->i;
          return Value::ofInt(q);
        }
        case BinOp::Le: return Value::ofBool(l->i <= r->i);
        case BinOp::Ge: return Value::ofBool(l->i >= r->i);
        case BinOp::Lt: return Value::ofBool(l->i < r->i);
        case BinOp::Gt: return Value::ofBool(l->i > r->i);
        default: throw EvalStuck{"bad operator"};
      }
    }
    case ExprKind::AdtCall: {
      std::vector<ValuePtr> args;
      args.reserve(e->args.size());
      for (const auto& a : e->args) args.push_back(evalExpr(ctx, a));
      if (e->isAdtCtor) {
        const AdtInfo& info = ctx.rp.adt(e->adtName);
        auto it = info.ctors.find(e->name);
        if (it == info.ctors.end() || it->second->params.size() != args.size())
          throw EvalStuck{"bad constructor application '" + e->name + "'"};
        return Value::adt(e->adtName, e->name, std::move(args));
      }
      const AdtFunction& fn = adtFunctionOf(ctx.rp, e->adtName, e->name);
      return evalAdtFunction(ctx, e->adtName, fn, std::move(args));
    }
    case ExprKind::DotCall:
      throw EvalStuck{"unresolved dotted call"};
    case ExprKind::New:
      throw EvalStuck{"'new' outside a right-hand side"};
  }
  throw EvalStuck{"unknown expression"};
}

}  // namespace smartml
