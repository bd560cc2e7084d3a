#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smartml/ast.hpp"

namespace smartml {

// Every contract instance carries an implicit integer `balance` field that the
// value-transfer machinery debits and credits. Declaring `int balance;`
// explicitly refers to the same slot.
inline constexpr const char* kBalanceField = "balance";

struct MethodRef {
  const MethodDecl* decl = nullptr;
  std::string owner;  // declaring contract
};

struct ContractInfo {
  const ContractDecl* decl = nullptr;
  std::optional<std::string> parent;
  std::vector<FieldDecl> allFields;           // parent chain first, then own, then builtin
  std::map<std::string, size_t> fieldIndex;
  std::map<std::string, MethodRef> methods;   // own + inherited
  std::vector<std::string> methodOrder;       // deterministic listing order

  const FieldDecl* findField(const std::string& name) const {
    auto it = fieldIndex.find(name);
    return it == fieldIndex.end() ? nullptr : &allFields[it->second];
  }
};

struct AdtInfo {
  const AdtDecl* decl = nullptr;
  std::map<std::string, const AdtCtorDecl*> ctors;
  std::map<std::string, const AdtFunction*> functions;
};

class ResolvedProgram {
public:
  Program ast;
  std::map<std::string, AdtInfo> adts;
  std::map<std::string, ContractInfo> contracts;

  ResolvedProgram() = default;
  ResolvedProgram(const ResolvedProgram&) = delete;
  ResolvedProgram& operator=(const ResolvedProgram&) = delete;
  ResolvedProgram(ResolvedProgram&&) = default;
  ResolvedProgram& operator=(ResolvedProgram&&) = default;

  const ContractInfo& contract(const std::string& name) const {
    auto it = contracts.find(name);
    if (it == contracts.end()) throw NameError({}, "unknown contract '" + name + "'");
    return it->second;
  }

  const AdtInfo& adt(const std::string& name) const {
    auto it = adts.find(name);
    if (it == adts.end()) throw NameError({}, "unknown datatype '" + name + "'");
    return it->second;
  }

  bool isContract(const std::string& name) const { return contracts.count(name) > 0; }
  bool isAdt(const std::string& name) const { return adts.count(name) > 0; }

  // Reflexive-transitive `extends` relation.
  bool isSubcontract(const std::string& sub, const std::string& super) const {
    std::string cur = sub;
    for (;;) {
      if (cur == super) return true;
      auto it = contracts.find(cur);
      if (it == contracts.end() || !it->second.parent) return false;
      cur = *it->second.parent;
    }
  }

  bool isSubtype(const Type& a, const Type& b) const {
    if (a == b) return true;
    if (a.isContract() && b.isContract()) return isSubcontract(a.name, b.name);
    if (a.isContract() && b.kind == TypeKind::Address) return true;
    return false;
  }

  // Contracts declaring method `m` (targets for an address-typed receiver).
  std::vector<std::string> contractsDeclaring(const std::string& m) const {
    std::vector<std::string> out;
    for (const auto& [name, info] : contracts)
      if (info.methods.count(m)) out.push_back(name);
    return out;
  }
};

class Resolver {
public:
  ResolvedProgram resolve(const Program& input) {
    ResolvedProgram rp;
    rp.ast = input;  // shallow copy; bodies are rewritten below
    collectDeclarations(rp);

    // Rewrite ADT function bodies, then contract bodies.
    for (auto& adt : rp.ast.adts) {
      for (auto& fn : adt.functions) {
        Env env;
        for (const auto& p : fn.params) bind(env, p.name, p.type, fn.pos);
        fn.body = resolveAdtBody(rp, adt, fn, fn.body, env);
      }
    }
    for (auto& c : rp.ast.contracts) resolveContract(rp, c);

    // Tables point into rp.ast; rebuild now that bodies changed.
    rp.adts.clear();
    rp.contracts.clear();
    collectDeclarations(rp);
    return rp;
  }

private:
  struct Binding {
    Type type;
    std::string internalName;
  };
  using Env = std::vector<std::pair<std::string, Binding>>;  // innermost last

  int renameCounter_ = 0;

  const Binding* lookup(const Env& env, const std::string& name) const {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  void bind(Env& env, const std::string& name, Type t, SourcePos pos) {
    for (const auto& [n, _] : env)
      if (n == name)
        throw NameError(pos, "duplicate parameter '" + name + "'");
    env.emplace_back(name, Binding{std::move(t), name});
  }

  // Locals that shadow an existing binding are alpha-renamed so every local
  // in a method body has a unique name.
  std::string bindLocal(Env& env, const std::string& name, Type t) {
    std::string internal = name;
    if (lookup(env, name)) internal = name + "__" + std::to_string(++renameCounter_);
    env.emplace_back(name, Binding{std::move(t), internal});
    return internal;
  }

  // --- declaration tables ---

  void collectDeclarations(ResolvedProgram& rp) {
    std::set<std::string> names;
    for (const auto& a : rp.ast.adts) {
      if (!names.insert(a.name).second)
        throw NameError(a.pos, "duplicate declaration '" + a.name + "'");
      AdtInfo info;
      info.decl = &a;
      for (const auto& c : a.ctors) {
        if (!info.ctors.emplace(c.name, &c).second)
          throw NameError(c.pos, "duplicate constructor '" + c.name + "' in " + a.name);
      }
      for (const auto& f : a.functions) {
        if (!info.functions.emplace(f.name, &f).second)
          throw NameError(f.pos, "duplicate function '" + f.name + "' in " + a.name);
        if (info.ctors.count(f.name))
          throw NameError(f.pos, "'" + f.name + "' is both a constructor and a function");
      }
      rp.adts.emplace(a.name, std::move(info));
    }
    for (const auto& c : rp.ast.contracts) {
      if (!names.insert(c.name).second)
        throw NameError(c.pos, "duplicate declaration '" + c.name + "'");
      rp.contracts.emplace(c.name, ContractInfo{&c, c.parent, {}, {}, {}, {}});
    }

    // Inheritance: existence + acyclicity, then field/method tables.
    for (auto& [name, info] : rp.contracts) {
      if (!info.parent) continue;
      if (!rp.contracts.count(*info.parent))
        throw NameError(info.decl->pos, name + " extends unknown contract '" + *info.parent + "'");
    }
    for (auto& [name, info] : rp.contracts) {
      std::set<std::string> seen{name};
      std::optional<std::string> cur = info.parent;
      while (cur) {
        if (!seen.insert(*cur).second)
          throw NameError(info.decl->pos, "cyclic 'extends' chain through '" + name + "'");
        cur = rp.contracts.at(*cur).parent;
      }
    }
    for (auto& [name, info] : rp.contracts) buildContractTables(rp, name, info);
  }

  void buildContractTables(ResolvedProgram& rp, const std::string& name, ContractInfo& info) {
    if (!info.fieldIndex.empty() || !info.allFields.empty()) return;
    std::vector<const ContractDecl*> chain;  // root first
    for (std::optional<std::string> cur = name; cur;) {
      const auto& ci = rp.contracts.at(*cur);
      chain.insert(chain.begin(), ci.decl);
      cur = ci.parent;
    }
    bool declaredBalance = false;
    for (const ContractDecl* decl : chain) {
      for (const auto& f : decl->fields) {
        if (f.name == kBalanceField) {
          if (f.type != Type::Int())
            throw NameError(f.pos, "'balance' is the built-in value slot and must be int");
          if (declaredBalance)
            throw NameError(f.pos, "duplicate field 'balance'");
          declaredBalance = true;
          continue;  // appended once below
        }
        if (info.fieldIndex.count(f.name))
          throw NameError(f.pos, "duplicate field '" + f.name + "' in hierarchy of " + name);
        info.fieldIndex[f.name] = info.allFields.size();
        info.allFields.push_back(f);
      }
      for (const auto& m : decl->methods) {
        if (info.methods.count(m.name)) {
          if (decl == chain.back() || rp.contracts.at(info.methods[m.name].owner).decl != decl)
            throw NameError(m.pos, "duplicate method '" + m.name + "' in hierarchy of " + name);
        }
        if (!info.methods.count(m.name)) {
          info.methods[m.name] = {&m, decl->name};
          info.methodOrder.push_back(m.name);
        }
        std::set<std::string> pnames;
        for (const auto& p : m.params)
          if (!pnames.insert(p.name).second)
            throw NameError(m.pos, "duplicate parameter '" + p.name + "' in " + m.name);
      }
    }
    FieldDecl bal;
    bal.name = kBalanceField;
    bal.type = Type::Int();
    bal.irrelevant = false;
    info.fieldIndex[bal.name] = info.allFields.size();
    info.allFields.push_back(bal);
  }

  // --- types ---

  Type normalizeType(const ResolvedProgram& rp, const Type& t, SourcePos pos) const {
    if (t.kind == TypeKind::Adt || t.kind == TypeKind::Contract) {
      if (rp.isAdt(t.name)) return Type::Adt(t.name);
      if (rp.isContract(t.name)) return Type::Contract(t.name);
      throw NameError(pos, "unknown type '" + t.name + "'");
    }
    return t;
  }

  std::vector<Param> normalizeParams(const ResolvedProgram& rp, const std::vector<Param>& ps,
                                     SourcePos pos) const {
    std::vector<Param> out;
    for (const auto& p : ps) out.push_back({p.name, normalizeType(rp, p.type, pos)});
    return out;
  }

  // --- ADT bodies ---

  AdtBodyPtr resolveAdtBody(const ResolvedProgram& rp, const AdtDecl& adt, const AdtFunction& fn,
                            const AdtBodyPtr& body, Env env) {
    auto out = std::make_shared<AdtBody>(*body);
    switch (body->kind) {
      case AdtBodyKind::Return:
        out->expr = resolveAdtExpr(rp, body->expr, env, normalizeType(rp, fn.returnType, fn.pos));
        break;
      case AdtBodyKind::If:
        out->expr = resolveAdtExpr(rp, body->expr, env, Type::Bool());
        out->thenBody = resolveAdtBody(rp, adt, fn, body->thenBody, env);
        out->elseBody = resolveAdtBody(rp, adt, fn, body->elseBody, env);
        break;
      case AdtBodyKind::Switch: {
        out->expr = resolveAdtExpr(rp, body->expr, env, std::nullopt);
        Type scrutinee = shallowAdtType(rp, out->expr, env);
        out->cases.clear();
        for (const auto& [pat, caseBody] : body->cases) {
          AdtPattern rpat = pat;
          if (pat.isCtor) {
            if (!scrutinee.isAdt() || !rp.adt(scrutinee.name).ctors.count(pat.ctorName))
              throw NameError(body->pos, "pattern '" + pat.ctorName +
                                             "' is not a constructor of " + scrutinee.str());
          } else {
            rpat.literal = resolveAdtExpr(rp, pat.literal, env, scrutinee);
          }
          out->cases.emplace_back(rpat, resolveAdtBody(rp, adt, fn, caseBody, env));
        }
        if (body->defaultCase) out->defaultCase = resolveAdtBody(rp, adt, fn, body->defaultCase, env);
        break;
      }
      case AdtBodyKind::LocalBind: {
        out->bindType = normalizeType(rp, body->bindType, body->pos);
        out->expr = resolveAdtExpr(rp, body->expr, env, out->bindType);
        out->bindName = bindLocal(env, body->bindName, out->bindType);
        out->rest = resolveAdtBody(rp, adt, fn, body->rest, env);
        break;
      }
    }
    return out;
  }

  // ADT function bodies see only their parameters and local bindings.
  ExprPtr resolveAdtExpr(const ResolvedProgram& rp, const ExprPtr& e, const Env& env,
                         std::optional<Type> expected) {
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
      case ExprKind::StringLit:
        return e;
      case ExprKind::Var: {
        const Binding* b = lookup(env, e->name);
        if (!b) {
          if (ExprPtr ctor = nullaryCtor(rp, e, expected)) return ctor;
          throw NameError(e->pos, "unbound variable '" + e->name + "' in ADT function");
        }
        if (b->internalName == e->name) return e;
        auto out = std::make_shared<Expr>(*e);
        out->name = b->internalName;
        return out;
      }
      case ExprKind::This:
      case ExprKind::Sender:
      case ExprKind::Amount:
      case ExprKind::FieldAccess:
      case ExprKind::New:
        throw NameError(e->pos, "contract context is not available inside ADT functions");
      case ExprKind::AdtAccess: {
        auto out = std::make_shared<Expr>(*e);
        out->lhs = resolveAdtExpr(rp, e->lhs, env, std::nullopt);
        Type base = shallowAdtType(rp, out->lhs, env);
        out->adtName = componentOwner(rp, base, e->name, e->pos);
        return out;
      }
      case ExprKind::Not: {
        auto out = std::make_shared<Expr>(*e);
        out->lhs = resolveAdtExpr(rp, e->lhs, env, Type::Bool());
        return out;
      }
      case ExprKind::Binary: {
        auto out = std::make_shared<Expr>(*e);
        out->lhs = resolveAdtExpr(rp, e->lhs, env, std::nullopt);
        out->rhs = resolveAdtExpr(rp, e->rhs, env, std::nullopt);
        return out;
      }
      case ExprKind::AdtCall:
        return resolveAdtCall(
            rp, e, expected,
            [&](const ExprPtr& a, std::optional<Type> exp) { return resolveAdtExpr(rp, a, env, exp); },
            [&](const ExprPtr& a) { return shallowAdtType(rp, a, env); });
      case ExprKind::DotCall: {
        ExprPtr base = resolveAdtExpr(rp, e->lhs, env, std::nullopt);
        Type bt = shallowAdtType(rp, base, env);
        if (!bt.isAdt())
          throw NameError(e->pos, "method calls are not available inside ADT functions");
        return rewriteAdtDotCall(rp, e, base, bt,
                                 [&](const ExprPtr& a, std::optional<Type> exp) {
                                   return resolveAdtExpr(rp, a, env, exp);
                                 });
      }
    }
    throw NameError(e->pos, "unexpected expression in ADT function");
  }

  // Bare identifiers that are not bound anywhere may name a nullary ADT
  // constructor (`nil`).
  ExprPtr nullaryCtor(const ResolvedProgram& rp, const ExprPtr& e,
                      const std::optional<Type>& expected) const {
    std::vector<std::string> owners;
    for (const auto& [aname, info] : rp.adts) {
      auto it = info.ctors.find(e->name);
      if (it != info.ctors.end() && it->second->params.empty()) owners.push_back(aname);
    }
    std::string owner;
    if (expected && expected->isAdt() &&
        std::count(owners.begin(), owners.end(), expected->name)) {
      owner = expected->name;
    } else if (owners.size() == 1) {
      owner = owners[0];
    } else {
      return nullptr;
    }
    auto out = mkExpr(ExprKind::AdtCall, e->pos);
    auto& m = const_cast<Expr&>(*out);
    m.name = e->name;
    m.isAdtCtor = true;
    m.adtName = owner;
    return out;
  }

  std::string componentOwner(const ResolvedProgram& rp, const Type& base, const std::string& comp,
                             SourcePos pos) const {
    if (!base.isAdt())
      throw NameError(pos, "component access on non-ADT value");
    const AdtInfo& info = rp.adt(base.name);
    std::optional<Type> found;
    for (const auto& [cname, ctor] : info.ctors) {
      for (const auto& p : ctor->params) {
        if (p.name != comp) continue;
        Type t = normalizeType(rp, p.type, pos);
        if (found && *found != t)
          throw NameError(pos, "component '" + comp + "' has conflicting types in " + base.name);
        found = t;
      }
    }
    if (!found)
      throw NameError(pos, "no constructor of " + base.name + " has a component '" + comp + "'");
    return base.name;
  }

  Type componentType(const ResolvedProgram& rp, const std::string& adtName,
                     const std::string& comp) const {
    const AdtInfo& info = rp.adt(adtName);
    for (const auto& [cname, ctor] : info.ctors)
      for (const auto& p : ctor->params)
        if (p.name == comp) return normalizeType(rp, p.type, {});
    throw NameError({}, "no component '" + comp + "' in " + adtName);
  }

  // Bare ADT calls resolve by expected result type where one is known,
  // otherwise by trying each same-named candidate against the argument types
  // (several ADTs may declare identically named constructors and functions,
  // e.g. nil/cons/indexOf on every list type).
  template <typename ResolveArg, typename ShallowOf>
  ExprPtr resolveAdtCall(const ResolvedProgram& rp, const ExprPtr& e, std::optional<Type> expected,
                         ResolveArg resolveArg, ShallowOf shallowOf) {
    struct Candidate {
      std::string owner;
      bool isCtor;
      std::vector<Param> params;
      Type result;
    };
    std::vector<Candidate> cands;
    for (const auto& [aname, info] : rp.adts) {
      if (auto it = info.ctors.find(e->name); it != info.ctors.end())
        cands.push_back({aname, true, normalizeParams(rp, it->second->params, e->pos),
                         Type::Adt(aname)});
      if (auto it = info.functions.find(e->name); it != info.functions.end())
        cands.push_back({aname, false, normalizeParams(rp, it->second->params, e->pos),
                         normalizeType(rp, it->second->returnType, e->pos)});
    }
    if (cands.empty())
      throw NameError(e->pos, "unknown ADT constructor or function '" + e->name + "'");

    std::erase_if(cands, [&](const Candidate& c) { return c.params.size() != e->args.size(); });
    if (cands.empty())
      throw NameError(e->pos, "no '" + e->name + "' takes " + std::to_string(e->args.size()) +
                                  " argument(s)");
    if (expected) {
      std::vector<Candidate> byResult;
      for (const auto& c : cands)
        if (rp.isSubtype(c.result, *expected)) byResult.push_back(c);
      if (!byResult.empty()) cands = std::move(byResult);
    }

    auto tryResolve = [&](const Candidate& c) -> ExprPtr {
      auto out = std::make_shared<Expr>(*e);
      out->isAdtCtor = c.isCtor;
      out->adtName = c.owner;
      out->args.clear();
      for (size_t i = 0; i < e->args.size(); ++i) {
        ExprPtr arg = resolveArg(e->args[i], c.params[i].type);
        Type at = shallowOf(arg);
        if (!rp.isSubtype(at, c.params[i].type))
          throw NameError(arg->pos, "argument " + std::to_string(i + 1) + " of '" + e->name +
                                        "' has type " + at.str() + ", expected " +
                                        c.params[i].type.str());
        out->args.push_back(std::move(arg));
      }
      return out;
    };
    if (cands.size() == 1) return tryResolve(cands[0]);

    ExprPtr resolved;
    int hits = 0;
    for (const auto& c : cands) {
      try {
        ExprPtr r = tryResolve(c);
        resolved = r;
        ++hits;
      } catch (const NameError&) {
        // argument types ruled this candidate out
      }
    }
    if (hits == 1) return resolved;
    throw NameError(e->pos, hits == 0 ? "no candidate for '" + e->name + "' matches the arguments"
                                      : "ambiguous ADT name '" + e->name + "'");
  }

  // Dotted calls on ADT values: `l.f(args)` resolves to `f(args)` when the
  // arity matches exactly, otherwise to `f(l, args)`. Listing-style code uses
  // both shapes.
  template <typename ResolveArg>
  ExprPtr rewriteAdtDotCall(const ResolvedProgram& rp, const ExprPtr& call, const ExprPtr& base,
                            const Type& baseType, ResolveArg resolveArg) {
    const AdtInfo& info = rp.adt(baseType.name);
    auto it = info.functions.find(call->name);
    if (it == info.functions.end())
      throw NameError(call->pos, baseType.name + " has no function '" + call->name + "'");
    std::vector<Param> params = normalizeParams(rp, it->second->params, call->pos);
    bool prepend;
    if (params.size() == call->args.size()) {
      prepend = false;
    } else if (params.size() == call->args.size() + 1 &&
               normalizeType(rp, params[0].type, call->pos) == baseType) {
      prepend = true;
    } else {
      throw NameError(call->pos, "'" + call->name + "' arity mismatch on " + baseType.name);
    }
    auto out = mkExpr(ExprKind::AdtCall, call->pos);
    auto& m = const_cast<Expr&>(*out);
    m.name = call->name;
    m.isAdtCtor = false;
    m.adtName = baseType.name;
    size_t argBase = prepend ? 1 : 0;
    if (prepend) m.args.push_back(base);
    for (size_t i = 0; i < call->args.size(); ++i)
      m.args.push_back(resolveArg(call->args[i], params[argBase + i].type));
    return out;
  }

  // Shallow type synthesis: enough to classify receivers and propagate
  // expected types. The reentrancy type system re-derives full judgments.
  Type shallowAdtType(const ResolvedProgram& rp, const ExprPtr& e, const Env& env) const {
    switch (e->kind) {
      case ExprKind::IntLit: return Type::Int();
      case ExprKind::BoolLit: return Type::Bool();
      case ExprKind::StringLit: return Type::String();
      case ExprKind::Var: {
        const Binding* b = lookup(env, e->name);
        if (!b) throw NameError(e->pos, "unbound variable '" + e->name + "'");
        return b->type;
      }
      case ExprKind::AdtAccess:
        return componentType(rp, e->adtName, e->name);
      case ExprKind::Not: return Type::Bool();
      case ExprKind::Binary:
        return isArith(e->op) ? Type::Int() : Type::Bool();
      case ExprKind::AdtCall: {
        const AdtInfo& info = rp.adt(e->adtName);
        if (e->isAdtCtor) return Type::Adt(e->adtName);
        return normalizeType(rp, info.functions.at(e->name)->returnType, e->pos);
      }
      default:
        throw NameError(e->pos, "cannot infer type of expression");
    }
  }

  // --- contract bodies ---

  struct MethodCtx {
    const ResolvedProgram* rp;
    const ContractInfo* contract;
    std::string contractName;
    const MethodDecl* method;  // null in constructors
  };

  void resolveContract(ResolvedProgram& rp, ContractDecl& c) {
    const ContractInfo& info = rp.contracts.at(c.name);

    // Constructor: params typed, super iff parent, every own field
    // initialized exactly once. Initializers may be expressions (including
    // `new`), with parameters in scope.
    ConstructorDecl ctor = c.ctor;
    ctor.params = normalizeParams(rp, ctor.params, ctor.pos);
    if (c.parent && !ctor.superArgs)
      throw NameError(ctor.pos, c.name + " extends " + *c.parent + " but has no super(...) call");
    if (!c.parent && ctor.superArgs)
      throw NameError(ctor.pos, c.name + " has super(...) but no parent");
    MethodCtx ctx{&rp, &info, c.name, nullptr};
    Env env;
    for (const auto& p : ctor.params) bind(env, p.name, p.type, ctor.pos);
    if (ctor.superArgs) {
      const ContractInfo& pinfo = rp.contracts.at(*c.parent);
      std::vector<Param> pparams = normalizeParams(rp, pinfo.decl->ctor.params, ctor.pos);
      if (pparams.size() != ctor.superArgs->size())
        throw NameError(ctor.pos, "super(...) expects " + std::to_string(pparams.size()) +
                                      " argument(s)");
      std::vector<ExprPtr> args;
      for (size_t i = 0; i < pparams.size(); ++i)
        args.push_back(resolveExpr(ctx, (*ctor.superArgs)[i], env, pparams[i].type));
      ctor.superArgs = std::move(args);
    }
    std::set<std::string> inited;
    for (auto& init : ctor.inits) {
      const FieldDecl* f = nullptr;
      for (const auto& own : c.fields)
        if (own.name == init.field) f = &own;
      bool builtin = init.field == kBalanceField;
      if (!f && !builtin)
        throw NameError(init.pos, "constructor initializes unknown field '" + init.field + "'");
      if (!inited.insert(init.field).second)
        throw NameError(init.pos, "field '" + init.field + "' initialized twice");
      Type ft = builtin && !f ? Type::Int() : normalizeType(rp, f->type, init.pos);
      init.init = resolveExpr(ctx, init.init, env, ft);
    }
    for (const auto& f : c.fields)
      if (f.name != kBalanceField && !inited.count(f.name))
        throw NameError(ctor.pos, "constructor does not initialize field '" + f.name + "'");
    c.ctor = std::move(ctor);

    for (auto& f : c.fields) f.type = normalizeType(rp, f.type, f.pos);

    for (auto& m : c.methods) {
      m.returnType = normalizeType(rp, m.returnType, m.pos);
      std::vector<Param> ps = normalizeParams(rp, m.params, m.pos);
      m.params = ps;
      MethodCtx mctx{&rp, &info, c.name, &m};
      Env menv;
      for (const auto& p : ps) bind(menv, p.name, p.type, m.pos);
      m.body = resolveStmt(mctx, m.body, menv);
    }
  }

  StmtPtr resolveStmt(const MethodCtx& ctx, const StmtPtr& s, Env env) {
    const ResolvedProgram& rp = *ctx.rp;
    auto out = std::make_shared<Stmt>(*s);
    switch (s->kind) {
      case StmtKind::Block: {
        out->stmts.clear();
        for (const auto& inner : s->stmts) out->stmts.push_back(resolveStmt(ctx, inner, env));
        return out;
      }
      case StmtKind::If:
        out->cond = resolveExpr(ctx, s->cond, env, Type::Bool());
        out->thenBody = resolveStmt(ctx, s->thenBody, env);
        if (s->elseBody) out->elseBody = resolveStmt(ctx, s->elseBody, env);
        return out;
      case StmtKind::While:
        out->cond = resolveExpr(ctx, s->cond, env, Type::Bool());
        out->thenBody = resolveStmt(ctx, s->thenBody, env);
        return out;
      case StmtKind::Let: {
        std::optional<Type> declared;
        if (s->declType) declared = normalizeType(rp, *s->declType, s->pos);
        Type bound;
        if (s->callStmt) {
          // `T x = recv.m(args);` — call-valued binding. An ADT receiver makes
          // the rhs a plain expression; a contract receiver keeps the call.
          const Stmt& call = *s->callStmt;
          ExprPtr recv = call.recv->kind == ExprKind::This || call.recv->kind == ExprKind::Sender
                             ? call.recv
                             : resolveLvalue(ctx, call.recv, env);
          Type rt = shallowType(ctx, recv, env);
          if (rt.isAdt()) {
            if (call.transfer) throw NameError(call.pos, "value transfer on an ADT value");
            out->callStmt = nullptr;
            out->rhs = rewriteAdtDotCall(rp, exprFromCall(call), recv, rt,
                                         [&](const ExprPtr& a, std::optional<Type> exp) {
                                           return resolveExpr(ctx, a, env, exp);
                                         });
            bound = shallowType(ctx, out->rhs, env);
          } else {
            out->callStmt = resolveContractCall(ctx, call, recv, rt, env);
            bound = callReturnType(ctx, *out->callStmt, env);
          }
        } else {
          out->rhs = resolveExpr(ctx, s->rhs, env, declared);
          bound = shallowType(ctx, out->rhs, env);
        }
        if (declared) {
          if (!rp.isSubtype(bound, *declared))
            throw NameError(s->pos, "initializer of '" + s->var + "' has type " + bound.str() +
                                        ", expected " + declared->str());
          bound = *declared;
          out->declType = declared;
        }
        out->var = bindLocal(env, s->var, bound);
        out->scope = resolveStmt(ctx, s->scope, env);
        return out;
      }
      case StmtKind::Assert:
        out->cond = resolveExpr(ctx, s->cond, env, Type::Bool());
        return out;
      case StmtKind::Assign: {
        out->lvalue = resolveLvalue(ctx, s->lvalue, env);
        Type lt = shallowType(ctx, out->lvalue, env);
        out->rhs = resolveExpr(ctx, s->rhs, env, lt);
        return out;
      }
      case StmtKind::Return:
        if (s->rhs) {
          Type rt = ctx.method ? normalizeType(rp, ctx.method->returnType, s->pos) : Type::Unit();
          out->rhs = resolveExpr(ctx, s->rhs, env, rt);
        }
        return out;
      case StmtKind::Throw:
        out->rhs = resolveExpr(ctx, s->rhs, env, std::nullopt);
        return out;
      case StmtKind::Try: {
        StmtPtr inner = resolveStmt(ctx, s->callStmt, env);
        if (inner->kind != StmtKind::Call && inner->kind != StmtKind::CallAssign)
          throw NameError(s->pos, "the body of a try must be a method invocation");
        out->callStmt = inner;
        Env abortEnv = env;
        if (s->abortVar) {
          // The abort pattern variable is bound to the thrown error value.
          out->abortVar = bindLocal(abortEnv, *s->abortVar, Type::String());
        }
        out->abortBody = resolveStmt(ctx, s->abortBody, abortEnv);
        out->successBody = resolveStmt(ctx, s->successBody, env);
        return out;
      }
      case StmtKind::Call:
      case StmtKind::CallAssign:
        return resolveCall(ctx, s, env);
    }
    return out;
  }

  ExprPtr resolveLvalue(const MethodCtx& ctx, const ExprPtr& lv, const Env& env) {
    if (lv->kind == ExprKind::Var) {
      if (const Binding* b = lookup(env, lv->name)) {
        if (b->internalName == lv->name) return lv;
        auto out = std::make_shared<Expr>(*lv);
        out->name = b->internalName;
        return out;
      }
      if (ctx.contract->findField(lv->name)) {
        auto out = mkExpr(ExprKind::FieldAccess, lv->pos);
        const_cast<Expr&>(*out).name = lv->name;
        return out;
      }
      throw NameError(lv->pos, "unknown variable or field '" + lv->name + "'");
    }
    if (lv->kind == ExprKind::FieldAccess) {
      if (!ctx.contract->findField(lv->name))
        throw NameError(lv->pos, ctx.contractName + " has no field '" + lv->name + "'");
      return lv;
    }
    throw NameError(lv->pos, "assignment target must be a local variable or this.f");
  }

  // Calls: the receiver's shape decides between a contract method invocation
  // and ADT sugar (`balances.set(idx, 0)` updates this.balances in place).
  StmtPtr resolveCall(const MethodCtx& ctx, const StmtPtr& s, Env& env) {
    const ResolvedProgram& rp = *ctx.rp;
    ExprPtr recv = s->recv->kind == ExprKind::This || s->recv->kind == ExprKind::Sender
                       ? s->recv
                       : resolveLvalue(ctx, s->recv, env);
    Type rt = shallowType(ctx, recv, env);

    if (rt.isAdt()) {
      if (s->transfer)
        throw NameError(s->pos, "value transfer on an ADT value");
      ExprPtr callExpr = rewriteAdtDotCall(
          rp, exprFromCall(*s), recv, rt,
          [&](const ExprPtr& a, std::optional<Type> exp) { return resolveExpr(ctx, a, env, exp); });
      auto out = mkStmt(StmtKind::Assign, s->pos);
      auto& m = const_cast<Stmt&>(*out);
      if (s->kind == StmtKind::Call) {
        // Statement form writes the result back through the receiver.
        Type resultType = shallowType(ctx, callExpr, env);
        if (!(resultType == rt))
          throw NameError(s->pos, "ADT call statement must produce a " + rt.str() +
                                      " to store back into its receiver");
        m.lvalue = recv;
        m.rhs = callExpr;
      } else {
        m.lvalue = resolveLvalue(ctx, s->lvalue, env);
        Type lt = shallowType(ctx, m.lvalue, env);
        Type resultType = shallowType(ctx, callExpr, env);
        if (!rp.isSubtype(resultType, lt))
          throw NameError(s->pos, "cannot assign " + resultType.str() + " to " + lt.str());
        m.rhs = callExpr;
      }
      return out;
    }

    StmtPtr out = resolveContractCall(ctx, *s, recv, rt, env);
    if (s->kind == StmtKind::CallAssign) {
      auto withLv = std::make_shared<Stmt>(*out);
      withLv->lvalue = resolveLvalue(ctx, s->lvalue, env);
      return withLv;
    }
    return out;
  }

  StmtPtr resolveContractCall(const MethodCtx& ctx, const Stmt& s, ExprPtr recv, const Type& rt,
                              Env& env) {
    auto out = std::make_shared<Stmt>(s);
    out->recv = std::move(recv);
    std::vector<Param> params = calleeParams(ctx, rt, s.method, s.pos);
    if (params.size() != s.args.size())
      throw NameError(s.pos, "'" + s.method + "' expects " + std::to_string(params.size()) +
                                 " argument(s), got " + std::to_string(s.args.size()));
    out->args.clear();
    for (size_t i = 0; i < s.args.size(); ++i)
      out->args.push_back(resolveExpr(ctx, s.args[i], env, params[i].type));
    if (s.transfer) out->transfer = resolveExpr(ctx, s.transfer, env, Type::Int());
    return out;
  }

  ExprPtr exprFromCall(const Stmt& s) {
    auto e = mkExpr(ExprKind::DotCall, s.pos);
    auto& m = const_cast<Expr&>(*e);
    m.name = s.method;
    m.args = s.args;
    return e;
  }

  std::vector<Param> calleeParams(const MethodCtx& ctx, const Type& recvType,
                                  const std::string& method, SourcePos pos) const {
    const ResolvedProgram& rp = *ctx.rp;
    if (recvType.isContract()) {
      const ContractInfo& info = rp.contract(recvType.name);
      auto it = info.methods.find(method);
      if (it == info.methods.end())
        throw NameError(pos, recvType.name + " has no method '" + method + "'");
      return normalizeParams(rp, it->second.decl->params, pos);
    }
    if (recvType.kind == TypeKind::Address) {
      // Address receivers dispatch dynamically; all declaring contracts must
      // agree on the signature shape (arity here; types during checking).
      std::vector<std::string> cands = rp.contractsDeclaring(method);
      if (cands.empty())
        throw NameError(pos, "no contract declares method '" + method + "'");
      std::vector<Param> params =
          normalizeParams(rp, rp.contract(cands[0]).methods.at(method).decl->params, pos);
      for (const auto& c : cands) {
        const auto& ps = rp.contract(c).methods.at(method).decl->params;
        if (ps.size() != params.size())
          throw NameError(pos, "contracts disagree on arity of '" + method + "'");
      }
      return params;
    }
    throw NameError(pos, "method call on non-contract value of type " + recvType.str());
  }

  Type callReturnType(const MethodCtx& ctx, const Stmt& call, const Env& env) const {
    const ResolvedProgram& rp = *ctx.rp;
    Type rt = shallowType(ctx, call.recv, env);
    if (rt.isContract())
      return normalizeType(rp, rp.contract(rt.name).methods.at(call.method).decl->returnType,
                           call.pos);
    std::vector<std::string> cands = rp.contractsDeclaring(call.method);
    Type ret = normalizeType(rp, rp.contract(cands[0]).methods.at(call.method).decl->returnType,
                             call.pos);
    return ret;
  }

  ExprPtr resolveExpr(const MethodCtx& ctx, const ExprPtr& e, const Env& env,
                      std::optional<Type> expected) {
    const ResolvedProgram& rp = *ctx.rp;
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
      case ExprKind::StringLit:
      case ExprKind::This:
      case ExprKind::Sender:
      case ExprKind::Amount:
        return e;
      case ExprKind::Var: {
        if (const Binding* b = lookup(env, e->name)) {
          if (b->internalName == e->name) return e;
          auto out = std::make_shared<Expr>(*e);
          out->name = b->internalName;
          return out;
        }
        if (ctx.contract->findField(e->name)) {
          auto out = mkExpr(ExprKind::FieldAccess, e->pos);
          const_cast<Expr&>(*out).name = e->name;
          return out;
        }
        if (ExprPtr ctor = nullaryCtor(rp, e, expected)) return ctor;
        throw NameError(e->pos, "unknown variable or field '" + e->name + "'");
      }
      case ExprKind::FieldAccess:
        if (!ctx.contract->findField(e->name))
          throw NameError(e->pos, ctx.contractName + " has no field '" + e->name + "'");
        return e;
      case ExprKind::AdtAccess: {
        auto out = std::make_shared<Expr>(*e);
        out->lhs = resolveExpr(ctx, e->lhs, env, std::nullopt);
        Type base = shallowType(ctx, out->lhs, env);
        out->adtName = componentOwner(rp, base, e->name, e->pos);
        return out;
      }
      case ExprKind::Not: {
        auto out = std::make_shared<Expr>(*e);
        out->lhs = resolveExpr(ctx, e->lhs, env, Type::Bool());
        return out;
      }
      case ExprKind::Binary: {
        auto out = std::make_shared<Expr>(*e);
        out->lhs = resolveExpr(ctx, e->lhs, env, std::nullopt);
        out->rhs = resolveExpr(ctx, e->rhs, env, std::nullopt);
        return out;
      }
      case ExprKind::AdtCall:
        return resolveAdtCall(
            rp, e, expected,
            [&](const ExprPtr& a, std::optional<Type> exp) { return resolveExpr(ctx, a, env, exp); },
            [&](const ExprPtr& a) { return shallowType(ctx, a, env); });
      case ExprKind::DotCall: {
        ExprPtr base = resolveExpr(ctx, e->lhs, env, std::nullopt);
        Type bt = shallowType(ctx, base, env);
        if (bt.isAdt())
          return rewriteAdtDotCall(rp, e, base, bt,
                                   [&](const ExprPtr& a, std::optional<Type> exp) {
                                     return resolveExpr(ctx, a, env, exp);
                                   });
        throw NameError(e->pos, "contract method calls are statements, not expressions");
      }
      case ExprKind::New: {
        if (!rp.isContract(e->name))
          throw NameError(e->pos, "new on unknown contract '" + e->name + "'");
        const ContractInfo& info = rp.contract(e->name);
        std::vector<Param> params = normalizeParams(rp, info.decl->ctor.params, e->pos);
        if (params.size() != e->args.size())
          throw NameError(e->pos, "constructor of " + e->name + " expects " +
                                      std::to_string(params.size()) + " argument(s)");
        auto out = std::make_shared<Expr>(*e);
        out->args.clear();
        for (size_t i = 0; i < e->args.size(); ++i)
          out->args.push_back(resolveExpr(ctx, e->args[i], env, params[i].type));
        return out;
      }
    }
    throw NameError(e->pos, "unexpected expression");
  }

  Type shallowType(const MethodCtx& ctx, const ExprPtr& e, const Env& env) const {
    const ResolvedProgram& rp = *ctx.rp;
    switch (e->kind) {
      case ExprKind::IntLit: return Type::Int();
      case ExprKind::BoolLit: return Type::Bool();
      case ExprKind::StringLit: return Type::String();
      case ExprKind::This: return Type::Contract(ctx.contractName);
      case ExprKind::Sender: return Type::Address();
      case ExprKind::Amount: return Type::Int();
      case ExprKind::Var: {
        const Binding* b = lookup(env, e->name);
        if (!b) throw NameError(e->pos, "unbound variable '" + e->name + "'");
        return b->type;
      }
      case ExprKind::FieldAccess: {
        const FieldDecl* f = ctx.contract->findField(e->name);
        if (!f) throw NameError(e->pos, "unknown field '" + e->name + "'");
        return normalizeType(rp, f->type, e->pos);
      }
      case ExprKind::AdtAccess: return componentType(rp, e->adtName, e->name);
      case ExprKind::Not: return Type::Bool();
      case ExprKind::Binary: return isArith(e->op) ? Type::Int() : Type::Bool();
      case ExprKind::AdtCall: {
        if (e->isAdtCtor) return Type::Adt(e->adtName);
        return normalizeType(rp, rp.adt(e->adtName).functions.at(e->name)->returnType, e->pos);
      }
      case ExprKind::New: return Type::Contract(e->name);
      case ExprKind::DotCall:
        throw NameError(e->pos, "cannot type unresolved call");
    }
    throw NameError(e->pos, "cannot infer type");
  }
};

inline ResolvedProgram resolve(const Program& p) { return Resolver().resolve(p); }

}  // namespace smartml
