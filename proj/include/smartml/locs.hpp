#pragma once

#include <set>
#include <string>

#include "smartml/alias.hpp"

namespace smartml {

// locs: permanent-memory locations a statement or expression may access, in
// the context of one contract. Internal calls recurse into the callee body;
// any external call conservatively touches every field of the current
// contract (the callee may call back). Each syntactic access site contributes
// one occurrence per identity in the context alias set, so the multiset used
// to initialize Σ and the per-statement subtraction stay consistent.
class LocsComputer {
public:
  LocsComputer(const ResolvedProgram& rp, IdentityTable& ids) : rp_(rp), ids_(ids) {}

  LocMultiset ofStmt(const AliasSet& self, const std::string& contractType, const StmtPtr& s) {
    LocMultiset out;
    std::set<std::string> visiting;
    stmt(self, contractType, s, out, visiting);
    return out;
  }

  LocMultiset ofExpr(const AliasSet& self, const std::string& contractType, const ExprPtr& e) {
    LocMultiset out;
    std::set<std::string> visiting;
    expr(self, contractType, e, out, visiting);
    return out;
  }

  LocMultiset ofMethod(const AliasSet& self, const std::string& contractType,
                       const std::string& method) {
    LocMultiset out;
    std::set<std::string> visiting;
    methodBody(self, contractType, method, out, visiting);
    return out;
  }

private:
  void addField(const AliasSet& self, const std::string& field, LocMultiset& out) {
    for (IdentId id : self) out.add({id, field});
  }

  void allFields(const AliasSet& self, const std::string& contractType, LocMultiset& out) {
    const ContractInfo& info = rp_.contract(contractType);
    for (const auto& f : info.allFields) addField(self, f.name, out);
  }

  void methodBody(const AliasSet& self, const std::string& contractType, const std::string& method,
                  LocMultiset& out, std::set<std::string>& visiting) {
    std::string key = contractType + "::" + method;
    if (!visiting.insert(key).second) return;  // recursive body already accounted
    const ContractInfo& info = rp_.contract(contractType);
    auto it = info.methods.find(method);
    if (it != info.methods.end()) stmt(self, contractType, it->second.decl->body, out, visiting);
    visiting.erase(key);
  }

  void callLocs(const AliasSet& self, const std::string& contractType, const Stmt& call,
                LocMultiset& out, std::set<std::string>& visiting) {
    for (const auto& a : call.args) expr(self, contractType, a, out, visiting);
    if (call.transfer) expr(self, contractType, call.transfer, out, visiting);
    if (call.recv->kind == ExprKind::This && !call.transfer) {
      // this.m(v̄): the locations of the callee body.
      methodBody(self, contractType, call.method, out, visiting);
    } else {
      // d.m(v̄), d ≠ this: every field of the current contract.
      expr(self, contractType, call.recv, out, visiting);
      allFields(self, contractType, out);
    }
  }

  void stmt(const AliasSet& self, const std::string& contractType, const StmtPtr& s,
            LocMultiset& out, std::set<std::string>& visiting) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& inner : s->stmts) stmt(self, contractType, inner, out, visiting);
        return;
      case StmtKind::If:
        expr(self, contractType, s->cond, out, visiting);
        stmt(self, contractType, s->thenBody, out, visiting);
        stmt(self, contractType, s->elseBody, out, visiting);
        return;
      case StmtKind::While:
        expr(self, contractType, s->cond, out, visiting);
        stmt(self, contractType, s->thenBody, out, visiting);
        return;
      case StmtKind::Let:
        if (s->callStmt) {
          callLocs(self, contractType, *s->callStmt, out, visiting);
        } else {
          expr(self, contractType, s->rhs, out, visiting);
        }
        stmt(self, contractType, s->scope, out, visiting);
        return;
      case StmtKind::Assert:
        expr(self, contractType, s->cond, out, visiting);
        return;
      case StmtKind::Assign:
        if (s->lvalue->kind == ExprKind::FieldAccess) addField(self, s->lvalue->name, out);
        expr(self, contractType, s->rhs, out, visiting);
        return;
      case StmtKind::Call:
        callLocs(self, contractType, *s, out, visiting);
        return;
      case StmtKind::CallAssign:
        if (s->lvalue->kind == ExprKind::FieldAccess) addField(self, s->lvalue->name, out);
        callLocs(self, contractType, *s, out, visiting);
        return;
      case StmtKind::Return:
        expr(self, contractType, s->rhs, out, visiting);
        return;
      case StmtKind::Throw:
        expr(self, contractType, s->rhs, out, visiting);
        return;
      case StmtKind::Try:
        stmt(self, contractType, s->callStmt, out, visiting);
        stmt(self, contractType, s->abortBody, out, visiting);
        stmt(self, contractType, s->successBody, out, visiting);
        return;
    }
  }

  void expr(const AliasSet& self, const std::string& contractType, const ExprPtr& e,
            LocMultiset& out, std::set<std::string>& visiting) {
    if (!e) return;
    switch (e->kind) {
      case ExprKind::FieldAccess:
        addField(self, e->name, out);
        return;
      case ExprKind::AdtAccess:
      case ExprKind::Not:
        expr(self, contractType, e->lhs, out, visiting);
        return;
      case ExprKind::Binary:
        expr(self, contractType, e->lhs, out, visiting);
        expr(self, contractType, e->rhs, out, visiting);
        return;
      case ExprKind::AdtCall:
      case ExprKind::New:
        for (const auto& a : e->args) expr(self, contractType, a, out, visiting);
        return;
      case ExprKind::DotCall:
        expr(self, contractType, e->lhs, out, visiting);
        for (const auto& a : e->args) expr(self, contractType, a, out, visiting);
        return;
      default:
        return;  // literals, vars, this, sender, <amount>: no contract locations
    }
  }

  const ResolvedProgram& rp_;
  IdentityTable& ids_;
};

}  // namespace smartml
