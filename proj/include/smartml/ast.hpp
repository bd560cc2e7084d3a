#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smartml/diag.hpp"

namespace smartml {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind { Int, Bool, String, Address, Adt, Contract, Unit, Stm };

struct Type {
  TypeKind kind = TypeKind::Unit;
  std::string name;  // Adt / Contract only

  static Type Int() { return {TypeKind::Int, ""}; }
  static Type Bool() { return {TypeKind::Bool, ""}; }
  static Type String() { return {TypeKind::String, ""}; }
  static Type Address() { return {TypeKind::Address, ""}; }
  static Type Unit() { return {TypeKind::Unit, ""}; }
  static Type Adt(std::string n) { return {TypeKind::Adt, std::move(n)}; }
  static Type Contract(std::string n) { return {TypeKind::Contract, std::move(n)}; }

  bool isContract() const { return kind == TypeKind::Contract; }
  bool isAdt() const { return kind == TypeKind::Adt; }

  bool operator==(const Type& o) const { return kind == o.kind && name == o.name; }
  bool operator!=(const Type& o) const { return !(*this == o); }

  std::string str() const {
    switch (kind) {
      case TypeKind::Int: return "int";
      case TypeKind::Bool: return "bool";
      case TypeKind::String: return "string";
      case TypeKind::Address: return "address";
      case TypeKind::Unit: return "unit";
      case TypeKind::Stm: return "stm";
      case TypeKind::Adt:
      case TypeKind::Contract: return name;
    }
    return "?";
  }
};

struct Param {
  std::string name;
  Type type;

  bool operator==(const Param& o) const { return name == o.name && type == o.type; }
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class BinOp { Add, Sub, Mul, Div, Le, Ge, Lt, Gt, Eq, Ne, And, Or };

inline bool isArith(BinOp op) {
  return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div;
}
inline bool isComparison(BinOp op) {
  return op == BinOp::Le || op == BinOp::Ge || op == BinOp::Lt || op == BinOp::Gt;
}
inline bool isEquality(BinOp op) { return op == BinOp::Eq || op == BinOp::Ne; }
inline bool isLogic(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
  IntLit,
  BoolLit,
  StringLit,
  Var,          // bare identifier (resolver rewrites field reads to FieldAccess)
  This,
  Sender,
  Amount,
  FieldAccess,  // this.f after resolution; base kept for ADT component access
  AdtAccess,    // e.name — component of an ADT value (ADT function bodies)
  Not,
  Binary,
  AdtCall,      // n(args) — ADT constructor application or ADT function call
  DotCall,      // e.m(args) — contract method call or ADT call; resolver decides
  New,          // new C(args) — right-hand sides and constructor initializers only
};

struct Expr {
  ExprKind kind;
  SourcePos pos;

  BigInt intValue;
  bool boolValue = false;
  std::string strValue;

  std::string name;             // Var / FieldAccess / AdtAccess / AdtCall / DotCall / New
  BinOp op = BinOp::Add;
  ExprPtr lhs, rhs;             // Binary; lhs doubles as base for AdtAccess / DotCall / Not
  std::vector<ExprPtr> args;    // AdtCall / DotCall / New

  // Resolution annotations (filled in by the resolver; not part of equality).
  bool isAdtCtor = false;       // AdtCall: constructor vs function
  std::string adtName;          // AdtCall / AdtAccess: owning ADT
};

inline ExprPtr mkExpr(ExprKind k, SourcePos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->pos = pos;
  return e;
}

// ---------------------------------------------------------------------------
// ADT declarations
// ---------------------------------------------------------------------------

struct AdtPattern {
  // Either a constructor name or a literal expression (int/bool/string).
  bool isCtor = false;
  std::string ctorName;
  ExprPtr literal;
};

struct AdtBody;
using AdtBodyPtr = std::shared_ptr<const AdtBody>;

enum class AdtBodyKind { Return, If, Switch, LocalBind };

struct AdtBody {
  AdtBodyKind kind;
  SourcePos pos;

  ExprPtr expr;                 // Return: value; If: condition; Switch: scrutinee; LocalBind: init
  AdtBodyPtr thenBody, elseBody;
  std::vector<std::pair<AdtPattern, AdtBodyPtr>> cases;
  AdtBodyPtr defaultCase;
  Type bindType;                // LocalBind
  std::string bindName;
  AdtBodyPtr rest;              // LocalBind continuation
};

struct AdtCtorDecl {
  std::string name;
  std::vector<Param> params;
  SourcePos pos;
};

struct AdtFunction {
  std::string name;
  std::vector<Param> params;
  Type returnType;
  AdtBodyPtr body;
  SourcePos pos;
};

struct AdtDecl {
  std::string name;
  std::vector<AdtCtorDecl> ctors;
  std::vector<AdtFunction> functions;
  SourcePos pos;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

enum class StmtKind {
  Block,
  If,
  While,
  Let,         // let x := rhs in scope; also `T x = rhs;` with scope = rest of block
  Assert,
  Assign,      // lvalue := expr | new C(args)
  Call,        // recv[$e].m(args)
  CallAssign,  // lvalue := recv[$e].m(args)
  Return,
  Throw,
  Try,         // try <call|callassign> abort {..} success {..}
};

struct Stmt {
  StmtKind kind;
  SourcePos pos;

  std::vector<StmtPtr> stmts;   // Block

  ExprPtr cond;                 // If / While / Assert
  StmtPtr thenBody, elseBody;   // If; thenBody doubles as While body

  std::string var;              // Let
  std::optional<Type> declType; // Let: present for `T x = e;` sugar
  ExprPtr rhs;                  // Let / Assign value (null when rhs is a call/new)
  bool rhsIsNew = false;
  StmtPtr scope;                // Let

  ExprPtr lvalue;               // Assign / CallAssign (Var or FieldAccess)

  ExprPtr recv;                 // Call / CallAssign receiver
  std::string method;
  std::vector<ExprPtr> args;
  ExprPtr transfer;             // $-value expression, may be null
  StmtPtr callStmt;             // Let with call rhs / Try inner statement

  std::optional<std::string> abortVar;  // Try
  StmtPtr abortBody, successBody;       // Try
};

inline StmtPtr mkStmt(StmtKind k, SourcePos pos = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  s->pos = pos;
  return s;
}

// ---------------------------------------------------------------------------
// Contracts and programs
// ---------------------------------------------------------------------------

struct FieldDecl {
  std::string name;
  Type type;
  bool irrelevant = false;
  SourcePos pos;
};

struct FieldInit {
  std::string field;
  ExprPtr init;   // parameter reference or initializer expression (may be `new`)
  SourcePos pos;
};

struct ConstructorDecl {
  std::vector<Param> params;
  std::optional<std::vector<ExprPtr>> superArgs;
  std::vector<FieldInit> inits;
  SourcePos pos;
};

struct MethodDecl {
  std::string name;
  std::vector<Param> params;
  Type returnType;
  StmtPtr body;   // Block
  SourcePos pos;
};

struct ContractDecl {
  std::string name;
  std::optional<std::string> parent;
  std::vector<FieldDecl> fields;
  ConstructorDecl ctor;
  std::vector<MethodDecl> methods;
  SourcePos pos;
};

struct Program {
  std::vector<AdtDecl> adts;
  std::vector<ContractDecl> contracts;
};

// ---------------------------------------------------------------------------
// Structural equality (used by the round-trip property)
// ---------------------------------------------------------------------------

bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const StmtPtr& a, const StmtPtr& b);
bool equal(const AdtBodyPtr& a, const AdtBodyPtr& b);

inline bool equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::IntLit: return a->intValue == b->intValue;
    case ExprKind::BoolLit: return a->boolValue == b->boolValue;
    case ExprKind::StringLit: return a->strValue == b->strValue;
    case ExprKind::Var: return a->name == b->name;
    case ExprKind::This:
    case ExprKind::Sender:
    case ExprKind::Amount: return true;
    case ExprKind::FieldAccess: return a->name == b->name;
    case ExprKind::AdtAccess: return a->name == b->name && equal(a->lhs, b->lhs);
    case ExprKind::Not: return equal(a->lhs, b->lhs);
    case ExprKind::Binary:
      return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case ExprKind::AdtCall: return a->name == b->name && equal(a->args, b->args);
    case ExprKind::DotCall:
      return a->name == b->name && equal(a->lhs, b->lhs) && equal(a->args, b->args);
    case ExprKind::New: return a->name == b->name && equal(a->args, b->args);
  }
  return false;
}

inline bool equal(const AdtBodyPtr& a, const AdtBodyPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case AdtBodyKind::Return: return equal(a->expr, b->expr);
    case AdtBodyKind::If:
      return equal(a->expr, b->expr) && equal(a->thenBody, b->thenBody) &&
             equal(a->elseBody, b->elseBody);
    case AdtBodyKind::Switch: {
      if (!equal(a->expr, b->expr) || a->cases.size() != b->cases.size()) return false;
      for (size_t i = 0; i < a->cases.size(); ++i) {
        const auto& [pa, ba] = a->cases[i];
        const auto& [pb, bb] = b->cases[i];
        if (pa.isCtor != pb.isCtor) return false;
        if (pa.isCtor ? pa.ctorName != pb.ctorName : !equal(pa.literal, pb.literal)) return false;
        if (!equal(ba, bb)) return false;
      }
      return equal(a->defaultCase, b->defaultCase);
    }
    case AdtBodyKind::LocalBind:
      return a->bindType == b->bindType && a->bindName == b->bindName &&
             equal(a->expr, b->expr) && equal(a->rest, b->rest);
  }
  return false;
}

inline bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case StmtKind::Block: {
      if (a->stmts.size() != b->stmts.size()) return false;
      for (size_t i = 0; i < a->stmts.size(); ++i)
        if (!equal(a->stmts[i], b->stmts[i])) return false;
      return true;
    }
    case StmtKind::If:
      return equal(a->cond, b->cond) && equal(a->thenBody, b->thenBody) &&
             equal(a->elseBody, b->elseBody);
    case StmtKind::While: return equal(a->cond, b->cond) && equal(a->thenBody, b->thenBody);
    case StmtKind::Let:
      return a->var == b->var && a->declType == b->declType && a->rhsIsNew == b->rhsIsNew &&
             equal(a->rhs, b->rhs) && equal(a->callStmt, b->callStmt) && equal(a->scope, b->scope);
    case StmtKind::Assert: return equal(a->cond, b->cond);
    case StmtKind::Assign:
      return equal(a->lvalue, b->lvalue) && a->rhsIsNew == b->rhsIsNew && equal(a->rhs, b->rhs);
    case StmtKind::Call:
      return equal(a->recv, b->recv) && a->method == b->method && equal(a->args, b->args) &&
             equal(a->transfer, b->transfer);
    case StmtKind::CallAssign:
      return equal(a->lvalue, b->lvalue) && equal(a->recv, b->recv) && a->method == b->method &&
             equal(a->args, b->args) && equal(a->transfer, b->transfer);
    case StmtKind::Return: return equal(a->rhs, b->rhs);
    case StmtKind::Throw: return equal(a->rhs, b->rhs);
    case StmtKind::Try:
      return equal(a->callStmt, b->callStmt) && a->abortVar == b->abortVar &&
             equal(a->abortBody, b->abortBody) && equal(a->successBody, b->successBody);
  }
  return false;
}

inline bool equal(const AdtDecl& a, const AdtDecl& b) {
  if (a.name != b.name || a.ctors.size() != b.ctors.size() ||
      a.functions.size() != b.functions.size())
    return false;
  for (size_t i = 0; i < a.ctors.size(); ++i)
    if (a.ctors[i].name != b.ctors[i].name || a.ctors[i].params != b.ctors[i].params) return false;
  for (size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || fa.params != fb.params || fa.returnType != fb.returnType ||
        !equal(fa.body, fb.body))
      return false;
  }
  return true;
}

inline bool equal(const ContractDecl& a, const ContractDecl& b) {
  if (a.name != b.name || a.parent != b.parent || a.fields.size() != b.fields.size() ||
      a.methods.size() != b.methods.size())
    return false;
  for (size_t i = 0; i < a.fields.size(); ++i) {
    const auto& fa = a.fields[i];
    const auto& fb = b.fields[i];
    if (fa.name != fb.name || fa.type != fb.type || fa.irrelevant != fb.irrelevant) return false;
  }
  if (a.ctor.params != b.ctor.params) return false;
  if (a.ctor.superArgs.has_value() != b.ctor.superArgs.has_value()) return false;
  if (a.ctor.superArgs && !equal(*a.ctor.superArgs, *b.ctor.superArgs)) return false;
  if (a.ctor.inits.size() != b.ctor.inits.size()) return false;
  for (size_t i = 0; i < a.ctor.inits.size(); ++i)
    if (a.ctor.inits[i].field != b.ctor.inits[i].field ||
        !equal(a.ctor.inits[i].init, b.ctor.inits[i].init))
      return false;
  for (size_t i = 0; i < a.methods.size(); ++i) {
    const auto& ma = a.methods[i];
    const auto& mb = b.methods[i];
    if (ma.name != mb.name || ma.params != mb.params || ma.returnType != mb.returnType ||
        !equal(ma.body, mb.body))
      return false;
  }
  return true;
}

inline bool equal(const Program& a, const Program& b) {
  if (a.adts.size() != b.adts.size() || a.contracts.size() != b.contracts.size()) return false;
  for (size_t i = 0; i < a.adts.size(); ++i)
    if (!equal(a.adts[i], b.adts[i])) return false;
  for (size_t i = 0; i < a.contracts.size(); ++i)
    if (!equal(a.contracts[i], b.contracts[i])) return false;
  return true;
}

}  // namespace smartml
