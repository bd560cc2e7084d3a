#pragma once

#include <sstream>
#include <string>

#include "smartml/ast.hpp"

namespace smartml {

// Canonical source form. The round-trip property parse(print(p)) == p is part
// of the test suite, so the printer must stay in lockstep with the parser.
class Printer {
public:
  std::string print(const Program& p) {
    out_.str("");
    for (const auto& a : p.adts) printAdt(a);
    for (const auto& c : p.contracts) printContract(c);
    return out_.str();
  }

  std::string print(const ExprPtr& e) {
    out_.str("");
    expr(e, 0);
    return out_.str();
  }

  std::string print(const StmtPtr& s) {
    out_.str("");
    stmt(s);
    return out_.str();
  }

private:
  static int prec(BinOp op) {
    if (isLogic(op)) return op == BinOp::Or ? 1 : 2;
    if (isComparison(op) || isEquality(op)) return 3;
    if (op == BinOp::Add || op == BinOp::Sub) return 4;
    return 5;
  }

  static const char* opStr(BinOp op) {
    switch (op) {
      case BinOp::Add: return "+";
      case BinOp::Sub: return "-";
      case BinOp::Mul: return "*";
      case BinOp::Div: return "/";
      case BinOp::Le: return "<=";
      case BinOp::Ge: return ">=";
      case BinOp::Lt: return "<";
      case BinOp::Gt: return ">";
      case BinOp::Eq: return "==";
      case BinOp::Ne: return "!=";
      case BinOp::And: return "&&";
      case BinOp::Or: return "||";
    }
    return "?";
  }

  void indent() { out_ << std::string(depth_ * 2, ' '); }

  void expr(const ExprPtr& e, int parentPrec) {
    switch (e->kind) {
      case ExprKind::IntLit: out_ << e->intValue.str(); break;
      case ExprKind::BoolLit: out_ << (e->boolValue ? "true" : "false"); break;
      case ExprKind::StringLit: out_ << '"' << escape(e->strValue) << '"'; break;
      case ExprKind::Var: out_ << e->name; break;
      case ExprKind::This: out_ << "this"; break;
      case ExprKind::Sender: out_ << "sender"; break;
      case ExprKind::Amount: out_ << "<amount>"; break;
      case ExprKind::FieldAccess: out_ << "this." << e->name; break;
      case ExprKind::AdtAccess:
        expr(e->lhs, 6);
        out_ << '.' << e->name;
        break;
      case ExprKind::Not:
        out_ << '!';
        expr(e->lhs, 6);
        break;
      case ExprKind::Binary: {
        int p = prec(e->op);
        if (p < parentPrec) out_ << '(';
        expr(e->lhs, p);
        out_ << ' ' << opStr(e->op) << ' ';
        expr(e->rhs, p + 1);
        if (p < parentPrec) out_ << ')';
        break;
      }
      case ExprKind::AdtCall:
        out_ << e->name;
        argList(e->args);
        break;
      case ExprKind::DotCall:
        expr(e->lhs, 6);
        out_ << '.' << e->name;
        argList(e->args);
        break;
      case ExprKind::New:
        out_ << "new " << e->name;
        argList(e->args);
        break;
    }
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    return out;
  }

  void argList(const std::vector<ExprPtr>& args) {
    out_ << '(';
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) out_ << ", ";
      expr(args[i], 0);
    }
    out_ << ')';
  }

  // A transfer amount prints parenthesized unless it is primary-simple.
  void transferExpr(const ExprPtr& e) {
    bool simple = e->kind == ExprKind::IntLit || e->kind == ExprKind::Var ||
                  e->kind == ExprKind::Amount || e->kind == ExprKind::BoolLit ||
                  e->kind == ExprKind::StringLit || e->kind == ExprKind::AdtCall;
    if (simple) {
      expr(e, 0);
    } else {
      out_ << '(';
      expr(e, 0);
      out_ << ')';
    }
  }

  void callHead(const Stmt& s) {
    expr(s.recv, 6);
    if (s.transfer) {
      out_ << '$';
      transferExpr(s.transfer);
    }
    out_ << '.' << s.method;
    argList(s.args);
  }

  void blockBody(const StmtPtr& block) {
    out_ << "{\n";
    ++depth_;
    for (const auto& s : block->stmts) stmt(s);
    --depth_;
    indent();
    out_ << "}";
  }

  void stmt(const StmtPtr& s) {
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& inner : s->stmts) stmt(inner);
        return;
      case StmtKind::If:
        indent();
        out_ << "if (";
        expr(s->cond, 0);
        out_ << ") ";
        blockBody(s->thenBody);
        if (s->elseBody) {
          out_ << " else ";
          blockBody(s->elseBody);
        }
        out_ << '\n';
        return;
      case StmtKind::While:
        indent();
        out_ << "while (";
        expr(s->cond, 0);
        out_ << ") ";
        blockBody(s->thenBody);
        out_ << '\n';
        return;
      case StmtKind::Let:
        if (s->declType) {
          indent();
          out_ << s->declType->str() << ' ' << s->var << " = ";
          letRhs(*s);
          out_ << ";\n";
          // scope statements continue in the same block
          for (const auto& inner : s->scope->stmts) stmt(inner);
        } else {
          indent();
          out_ << "let " << s->var << " := ";
          letRhs(*s);
          out_ << " in ";
          blockBody(s->scope);
          out_ << '\n';
        }
        return;
      case StmtKind::Assert:
        indent();
        out_ << "assert(";
        expr(s->cond, 0);
        out_ << ");\n";
        return;
      case StmtKind::Assign:
        indent();
        expr(s->lvalue, 6);
        out_ << " = ";
        expr(s->rhs, 0);
        out_ << ";\n";
        return;
      case StmtKind::Call:
        indent();
        callHead(*s);
        out_ << ";\n";
        return;
      case StmtKind::CallAssign:
        indent();
        expr(s->lvalue, 6);
        out_ << " = ";
        callHead(*s);
        out_ << ";\n";
        return;
      case StmtKind::Return:
        indent();
        out_ << "return";
        if (s->rhs) {
          out_ << ' ';
          expr(s->rhs, 0);
        }
        out_ << ";\n";
        return;
      case StmtKind::Throw:
        indent();
        out_ << "throw ";
        expr(s->rhs, 0);
        out_ << ";\n";
        return;
      case StmtKind::Try: {
        indent();
        out_ << "try ";
        const Stmt& inner = *s->callStmt;
        if (inner.kind == StmtKind::CallAssign) {
          expr(inner.lvalue, 6);
          out_ << " = ";
        }
        callHead(inner);
        out_ << ";\n";
        indent();
        out_ << "abort ";
        if (s->abortVar) out_ << '(' << *s->abortVar << ") ";
        blockBody(s->abortBody);
        out_ << " success ";
        blockBody(s->successBody);
        out_ << '\n';
        return;
      }
    }
  }

  void letRhs(const Stmt& s) {
    if (s.callStmt) {
      callHead(*s.callStmt);
    } else {
      expr(s.rhs, 0);
    }
  }

  void params(const std::vector<Param>& ps) {
    out_ << '(';
    for (size_t i = 0; i < ps.size(); ++i) {
      if (i) out_ << ", ";
      out_ << ps[i].type.str() << ' ' << ps[i].name;
    }
    out_ << ')';
  }

  void printAdt(const AdtDecl& d) {
    out_ << "datatype " << d.name << " {\n";
    ++depth_;
    indent();
    out_ << "constructor {\n";
    ++depth_;
    indent();
    for (size_t i = 0; i < d.ctors.size(); ++i) {
      if (i) out_ << " | ";
      out_ << d.ctors[i].name;
      if (!d.ctors[i].params.empty()) params(d.ctors[i].params);
    }
    out_ << '\n';
    --depth_;
    indent();
    out_ << "}\n";
    for (const auto& f : d.functions) {
      indent();
      out_ << f.returnType.str() << ' ' << f.name;
      params(f.params);
      out_ << " {\n";
      ++depth_;
      adtBody(f.body);
      --depth_;
      indent();
      out_ << "}\n";
    }
    --depth_;
    out_ << "}\n";
  }

  void adtBody(const AdtBodyPtr& b) {
    switch (b->kind) {
      case AdtBodyKind::Return:
        indent();
        out_ << "return ";
        expr(b->expr, 0);
        out_ << ";\n";
        return;
      case AdtBodyKind::If:
        indent();
        out_ << "if (";
        expr(b->expr, 0);
        out_ << ") {\n";
        ++depth_;
        adtBody(b->thenBody);
        --depth_;
        indent();
        out_ << "} else {\n";
        ++depth_;
        adtBody(b->elseBody);
        --depth_;
        indent();
        out_ << "}\n";
        return;
      case AdtBodyKind::Switch:
        indent();
        out_ << "switch (";
        expr(b->expr, 0);
        out_ << ") {\n";
        ++depth_;
        for (const auto& [pat, body] : b->cases) {
          indent();
          out_ << "case ";
          if (pat.isCtor) {
            out_ << pat.ctorName;
          } else {
            expr(pat.literal, 0);
          }
          out_ << ":\n";
          ++depth_;
          adtBody(body);
          --depth_;
        }
        if (b->defaultCase) {
          indent();
          out_ << "default:\n";
          ++depth_;
          adtBody(b->defaultCase);
          --depth_;
        }
        --depth_;
        indent();
        out_ << "}\n";
        return;
      case AdtBodyKind::LocalBind:
        indent();
        out_ << b->bindType.str() << ' ' << b->bindName << " = ";
        expr(b->expr, 0);
        out_ << ";\n";
        adtBody(b->rest);
        return;
    }
  }

  void printContract(const ContractDecl& c) {
    out_ << "contract " << c.name;
    if (c.parent) out_ << " extends " << *c.parent;
    out_ << " {\n";
    ++depth_;
    for (const auto& f : c.fields) {
      indent();
      if (f.irrelevant) out_ << "irrelevant ";
      out_ << f.type.str() << ' ' << f.name << ";\n";
    }
    indent();
    out_ << "constructor";
    params(c.ctor.params);
    out_ << " {\n";
    ++depth_;
    if (c.ctor.superArgs) {
      indent();
      out_ << "super";
      argList(*c.ctor.superArgs);
      out_ << ";\n";
    }
    for (const auto& init : c.ctor.inits) {
      indent();
      out_ << "this." << init.field << " = ";
      expr(init.init, 0);
      out_ << ";\n";
    }
    --depth_;
    indent();
    out_ << "}\n";
    for (const auto& m : c.methods) {
      indent();
      if (m.returnType.kind == TypeKind::Unit) {
        out_ << "function ";
      } else {
        out_ << m.returnType.str() << ' ';
      }
      out_ << m.name;
      params(m.params);
      out_ << ' ';
      blockBody(m.body);
      out_ << '\n';
    }
    --depth_;
    out_ << "}\n";
  }

  std::ostringstream out_;
  int depth_ = 0;
};

inline std::string prettyPrint(const Program& p) { return Printer().print(p); }

}  // namespace smartml
