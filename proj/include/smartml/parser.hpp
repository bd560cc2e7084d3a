#pragma once

#include <string>
#include <vector>

#include "smartml/ast.hpp"
#include "smartml/lexer.hpp"

namespace smartml {

// Recursive-descent parser for `.sml` sources. Grammar extensions over the
// core language (value-transfer calls, typed declarations, signed integer
// literals, constructor initializer expressions) are documented in
// docs/grammar.md.
class Parser {
public:
  explicit Parser(std::string source) : toks_(Lexer(std::move(source)).tokenize()) {}

  Program parseProgram() {
    Program p;
    while (!at(Tok::End)) {
      if (at(Tok::KwDatatype)) {
        p.adts.push_back(parseDatatype());
      } else if (at(Tok::KwContract)) {
        p.contracts.push_back(parseContract());
      } else {
        fail("top-level declaration", {"'datatype'", "'contract'"});
      }
    }
    return p;
  }

private:
  // --- token helpers ---

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(size_t off = 1) const {
    size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool atType() const {
    return at(Tok::KwInt) || at(Tok::KwBool) || at(Tok::KwString) || at(Tok::KwAddress) ||
           at(Tok::Ident);
  }

  Token take() { return toks_[pos_++]; }

  Token expect(Tok k) {
    if (!at(k)) fail(std::string("unexpected ") + tokName(cur().kind), {tokName(k)});
    return take();
  }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) {
    throw ParseError(cur().pos, msg, std::move(expected));
  }

  // --- types ---

  Type parseType() {
    SourcePos p = cur().pos;
    switch (cur().kind) {
      case Tok::KwInt: take(); return Type::Int();
      case Tok::KwBool: take(); return Type::Bool();
      case Tok::KwString: take(); return Type::String();
      case Tok::KwAddress: take(); return Type::Address();
      case Tok::Ident: {
        // ADT vs contract is settled during resolution; parse as ADT shape.
        std::string n = take().text;
        return Type::Adt(n);
      }
      default:
        throw ParseError(p, "expected a type",
                         {"'int'", "'bool'", "'string'", "'address'", "identifier"});
    }
  }

  std::vector<Param> parseParams() {
    std::vector<Param> params;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      for (;;) {
        Type t = parseType();
        std::string n = expect(Tok::Ident).text;
        params.push_back({n, t});
        if (!at(Tok::Comma)) break;
        take();
      }
    }
    expect(Tok::RParen);
    return params;
  }

  // --- datatypes ---

  AdtDecl parseDatatype() {
    AdtDecl d;
    d.pos = cur().pos;
    expect(Tok::KwDatatype);
    d.name = expect(Tok::Ident).text;
    expect(Tok::LBrace);
    expect(Tok::KwConstructor);
    expect(Tok::LBrace);
    for (;;) {
      AdtCtorDecl c;
      c.pos = cur().pos;
      c.name = expect(Tok::Ident).text;
      if (at(Tok::LParen)) c.params = parseParams();
      d.ctors.push_back(std::move(c));
      if (!at(Tok::Pipe)) break;
      take();
    }
    expect(Tok::RBrace);
    while (!at(Tok::RBrace)) d.functions.push_back(parseAdtFunction());
    expect(Tok::RBrace);
    return d;
  }

  AdtFunction parseAdtFunction() {
    AdtFunction f;
    f.pos = cur().pos;
    f.returnType = parseType();
    f.name = expect(Tok::Ident).text;
    f.params = parseParams();
    expect(Tok::LBrace);
    f.body = parseAdtBody();
    expect(Tok::RBrace);
    return f;
  }

  // An ADT function body is a chain of local bindings ending in a single
  // return / if-else / switch.
  AdtBodyPtr parseAdtBody() {
    SourcePos p = cur().pos;
    if (at(Tok::KwReturn)) {
      take();
      auto node = std::make_shared<AdtBody>();
      node->kind = AdtBodyKind::Return;
      node->pos = p;
      node->expr = parseExpr();
      expect(Tok::Semi);
      return node;
    }
    if (at(Tok::KwIf)) {
      take();
      auto node = std::make_shared<AdtBody>();
      node->kind = AdtBodyKind::If;
      node->pos = p;
      expect(Tok::LParen);
      node->expr = parseExpr();
      expect(Tok::RParen);
      expect(Tok::LBrace);
      node->thenBody = parseAdtBody();
      expect(Tok::RBrace);
      expect(Tok::KwElse);
      expect(Tok::LBrace);
      node->elseBody = parseAdtBody();
      expect(Tok::RBrace);
      return node;
    }
    if (at(Tok::KwSwitch)) {
      take();
      auto node = std::make_shared<AdtBody>();
      node->kind = AdtBodyKind::Switch;
      node->pos = p;
      expect(Tok::LParen);
      node->expr = parseExpr();
      expect(Tok::RParen);
      expect(Tok::LBrace);
      while (at(Tok::KwCase)) {
        take();
        AdtPattern pat;
        if (at(Tok::Ident)) {
          pat.isCtor = true;
          pat.ctorName = take().text;
        } else {
          pat.literal = parsePrimary();
        }
        expect(Tok::Colon);
        node->cases.emplace_back(std::move(pat), parseAdtBody());
      }
      if (at(Tok::KwDefault)) {
        take();
        expect(Tok::Colon);
        node->defaultCase = parseAdtBody();
      }
      expect(Tok::RBrace);
      return node;
    }
    if (atType() && peek().kind == Tok::Ident) {
      auto node = std::make_shared<AdtBody>();
      node->kind = AdtBodyKind::LocalBind;
      node->pos = p;
      node->bindType = parseType();
      node->bindName = expect(Tok::Ident).text;
      expect(Tok::Assign);
      node->expr = parseExpr();
      expect(Tok::Semi);
      node->rest = parseAdtBody();
      return node;
    }
    fail("expected ADT expression", {"'return'", "'if'", "'switch'", "local binding"});
  }

  // --- contracts ---

  ContractDecl parseContract() {
    ContractDecl c;
    c.pos = cur().pos;
    expect(Tok::KwContract);
    c.name = expect(Tok::Ident).text;
    if (at(Tok::KwExtends)) {
      take();
      c.parent = expect(Tok::Ident).text;
    }
    expect(Tok::LBrace);
    bool sawCtor = false;
    while (!at(Tok::RBrace)) {
      if (at(Tok::KwConstructor)) {
        if (sawCtor) fail("duplicate constructor");
        sawCtor = true;
        c.ctor = parseConstructor();
      } else if (at(Tok::KwIrrelevant)) {
        take();
        c.fields.push_back(parseField(true));
      } else if (at(Tok::KwFunction) ||
                 (atType() && peek().kind == Tok::KwFunction) ||
                 (atType() && peek().kind == Tok::Ident && peek(2).kind == Tok::LParen)) {
        c.methods.push_back(parseMethod());
      } else if (atType() && peek().kind == Tok::Ident) {
        c.fields.push_back(parseField(false));
      } else {
        fail("expected contract member", {"field", "'constructor'", "method"});
      }
    }
    expect(Tok::RBrace);
    return c;
  }

  FieldDecl parseField(bool irrelevant) {
    FieldDecl f;
    f.pos = cur().pos;
    f.irrelevant = irrelevant;
    f.type = parseType();
    f.name = expect(Tok::Ident).text;
    expect(Tok::Semi);
    return f;
  }

  ConstructorDecl parseConstructor() {
    ConstructorDecl k;
    k.pos = cur().pos;
    expect(Tok::KwConstructor);
    k.params = parseParams();
    expect(Tok::LBrace);
    if (at(Tok::KwSuper)) {
      take();
      expect(Tok::LParen);
      std::vector<ExprPtr> args;
      if (!at(Tok::RParen)) {
        args.push_back(parseExpr());
        while (at(Tok::Comma)) {
          take();
          args.push_back(parseExpr());
        }
      }
      expect(Tok::RParen);
      expect(Tok::Semi);
      k.superArgs = std::move(args);
    }
    while (!at(Tok::RBrace)) {
      FieldInit init;
      init.pos = cur().pos;
      expect(Tok::KwThis);
      expect(Tok::Dot);
      init.field = expect(Tok::Ident).text;
      expect(Tok::Assign);
      init.init = parseRhsExpr();
      expect(Tok::Semi);
      k.inits.push_back(std::move(init));
    }
    expect(Tok::RBrace);
    return k;
  }

  MethodDecl parseMethod() {
    MethodDecl m;
    m.pos = cur().pos;
    if (at(Tok::KwFunction)) {
      take();
      m.returnType = Type::Unit();
    } else {
      m.returnType = parseType();
      if (at(Tok::KwFunction)) take();  // `bool function transfer(...)`
    }
    m.name = expect(Tok::Ident).text;
    m.params = parseParams();
    m.body = parseBlock();
    return m;
  }

  // --- statements ---

  StmtPtr parseBlock() {
    SourcePos p = cur().pos;
    expect(Tok::LBrace);
    std::vector<StmtPtr> stmts;
    while (!at(Tok::RBrace)) stmts.push_back(parseStmt());
    expect(Tok::RBrace);
    return foldDecls(std::move(stmts), p);
  }

  // Typed declarations scope over the remainder of their block; fold them
  // into nested Let nodes from the back.
  StmtPtr foldDecls(std::vector<StmtPtr> stmts, SourcePos p) {
    std::vector<StmtPtr> out;
    for (size_t i = stmts.size(); i-- > 0;) {
      const StmtPtr& s = stmts[i];
      if (s->kind == StmtKind::Let && !s->scope) {
        auto let = std::make_shared<Stmt>(*s);
        std::vector<StmtPtr> rest(out.rbegin(), out.rend());
        auto body = mkStmt(StmtKind::Block, s->pos);
        const_cast<Stmt&>(*body).stmts = std::move(rest);
        let->scope = body;
        out.clear();
        out.push_back(let);
      } else {
        out.push_back(s);
      }
    }
    auto block = mkStmt(StmtKind::Block, p);
    const_cast<Stmt&>(*block).stmts = {out.rbegin(), out.rend()};
    return block;
  }

  StmtPtr parseStmt() {
    SourcePos p = cur().pos;
    switch (cur().kind) {
      case Tok::KwIf: {
        take();
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::If;
        s->pos = p;
        expect(Tok::LParen);
        s->cond = parseExpr();
        expect(Tok::RParen);
        s->thenBody = parseBlock();
        if (at(Tok::KwElse)) {
          take();
          s->elseBody = parseBlock();
        }
        return s;
      }
      case Tok::KwWhile: {
        take();
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::While;
        s->pos = p;
        expect(Tok::LParen);
        s->cond = parseExpr();
        expect(Tok::RParen);
        s->thenBody = parseBlock();
        return s;
      }
      case Tok::KwLet: {
        take();
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::Let;
        s->pos = p;
        s->var = expect(Tok::Ident).text;
        expect(Tok::Assign);
        parseLetRhs(*s);
        expect(Tok::KwIn);
        s->scope = at(Tok::LBrace) ? parseBlock() : singleton(parseStmt());
        return s;
      }
      case Tok::KwAssert: {
        take();
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::Assert;
        s->pos = p;
        expect(Tok::LParen);
        s->cond = parseExpr();
        expect(Tok::RParen);
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwReturn: {
        take();
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::Return;
        s->pos = p;
        if (!at(Tok::Semi)) s->rhs = parseExpr();
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwThrow: {
        take();
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::Throw;
        s->pos = p;
        s->rhs = parseExpr();
        expect(Tok::Semi);
        return s;
      }
      case Tok::KwTry:
        return parseTry();
      default:
        break;
    }

    // Typed declaration: `T x = rhs;` with scope = rest of block.
    if (atType() && peek().kind == Tok::Ident &&
        (peek(2).kind == Tok::Assign || peek(2).kind == Tok::Semi)) {
      auto s = std::make_shared<Stmt>();
      s->kind = StmtKind::Let;
      s->pos = p;
      s->declType = parseType();
      s->var = expect(Tok::Ident).text;
      expect(Tok::Assign);
      parseLetRhs(*s);
      expect(Tok::Semi);
      return s;  // scope attached by foldDecls
    }

    // Remaining statement forms start from an lvalue-or-receiver.
    return parseAssignOrCall();
  }

  StmtPtr singleton(StmtPtr s) {
    auto b = mkStmt(StmtKind::Block, s->pos);
    const_cast<Stmt&>(*b).stmts = {std::move(s)};
    return b;
  }

  void parseLetRhs(Stmt& s) {
    if (at(Tok::KwNew)) {
      s.rhs = parseNew();
      s.rhsIsNew = true;
      return;
    }
    if (StmtPtr call = tryParseCallStmt(/*lvalue=*/nullptr)) {
      s.callStmt = call;
      return;
    }
    ExprPtr e = parseExpr();
    if (StmtPtr call = callFromDotCall(nullptr, e)) {
      s.callStmt = call;
      return;
    }
    s.rhs = e;
  }

  StmtPtr parseTry() {
    SourcePos p = cur().pos;
    expect(Tok::KwTry);
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Try;
    s->pos = p;
    StmtPtr inner = parseAssignOrCall();
    if (inner->kind != StmtKind::Call && inner->kind != StmtKind::CallAssign)
      throw ParseError(p, "the body of a try must be a method invocation");
    s->callStmt = inner;
    expect(Tok::KwAbort);
    if (at(Tok::LParen)) {
      take();
      s->abortVar = expect(Tok::Ident).text;
      expect(Tok::RParen);
    }
    s->abortBody = parseBlock();
    expect(Tok::KwSuccess);
    s->successBody = parseBlock();
    return s;
  }

  // Parses `lvalue = rhs;`, `recv[$e].m(args);` and `lvalue = recv[$e].m(args);`.
  StmtPtr parseAssignOrCall() {
    SourcePos p = cur().pos;
    ExprPtr head = parseReceiverOrLvalue();

    if (at(Tok::Dollar) || at(Tok::Dot)) {
      if (StmtPtr call = finishCallStmt(nullptr, head, p)) return call;
    }

    if (at(Tok::Assign)) {
      take();
      if (at(Tok::KwNew)) {
        auto s = std::make_shared<Stmt>();
        s->kind = StmtKind::Assign;
        s->pos = p;
        s->lvalue = head;
        s->rhs = parseNew();
        s->rhsIsNew = true;
        expect(Tok::Semi);
        return s;
      }
      if (StmtPtr call = tryParseCallStmt(head)) {
        expect(Tok::Semi);
        return call;
      }
      ExprPtr rhs = parseExpr();
      if (StmtPtr call = callFromDotCall(head, rhs)) {
        expect(Tok::Semi);
        return call;
      }
      auto s = std::make_shared<Stmt>();
      s->kind = StmtKind::Assign;
      s->pos = p;
      s->lvalue = head;
      s->rhs = rhs;
      expect(Tok::Semi);
      return s;
    }
    fail("expected statement", {"'='", "'.'", "'$'"});
  }

  // Receiver / lvalue: x, this, sender, this.f.
  ExprPtr parseReceiverOrLvalue() {
    SourcePos p = cur().pos;
    if (at(Tok::KwThis)) {
      take();
      if (at(Tok::Dot) && peek().kind == Tok::Ident &&
          (peek(2).kind == Tok::Assign || peek(2).kind == Tok::Dollar ||
           peek(2).kind == Tok::Dot)) {
        take();
        auto f = mkExpr(ExprKind::FieldAccess, p);
        const_cast<Expr&>(*f).name = take().text;
        return f;
      }
      return mkExpr(ExprKind::This, p);
    }
    if (at(Tok::KwSender)) {
      take();
      return mkExpr(ExprKind::Sender, p);
    }
    if (at(Tok::Ident)) {
      auto v = mkExpr(ExprKind::Var, p);
      const_cast<Expr&>(*v).name = take().text;
      return v;
    }
    fail("expected lvalue or call receiver", {"identifier", "'this'", "'sender'"});
  }

  // After an assignment sign: `recv$e.m(args)` (the `$` form is only reachable
  // through a call statement, so spot it by lookahead before falling back to
  // expression parsing).
  StmtPtr tryParseCallStmt(ExprPtr lvalue) {
    auto isRecvStart = [&](size_t off, size_t& len) {
      if (toks_[pos_ + off].kind == Tok::Ident || toks_[pos_ + off].kind == Tok::KwSender) {
        len = 1;
        return true;
      }
      if (toks_[pos_ + off].kind == Tok::KwThis) {
        if (peek(off + 1).kind == Tok::Dot && peek(off + 2).kind == Tok::Ident &&
            peek(off + 3).kind == Tok::Dollar) {
          len = 3;
          return true;
        }
        len = 1;
        return true;
      }
      return false;
    };
    size_t len = 0;
    if (!isRecvStart(0, len)) return nullptr;
    if (peek(len).kind != Tok::Dollar) return nullptr;
    SourcePos p = cur().pos;
    ExprPtr recv = parseReceiverOrLvalue();
    return finishCallStmt(std::move(lvalue), std::move(recv), p);
  }

  StmtPtr finishCallStmt(ExprPtr lvalue, ExprPtr recv, SourcePos p) {
    ExprPtr transfer;
    if (at(Tok::Dollar)) {
      take();
      transfer = parseTransferExpr();
    }
    if (!at(Tok::Dot)) {
      if (transfer) fail("expected method invocation after value transfer", {"'.'"});
      return nullptr;
    }
    take();
    std::string method = expect(Tok::Ident).text;
    std::vector<ExprPtr> args = parseArgs();
    auto s = std::make_shared<Stmt>();
    s->kind = lvalue ? StmtKind::CallAssign : StmtKind::Call;
    s->pos = p;
    s->lvalue = std::move(lvalue);
    s->recv = std::move(recv);
    s->method = std::move(method);
    s->args = std::move(args);
    s->transfer = std::move(transfer);
    if (s->kind == StmtKind::Call) expect(Tok::Semi);
    return s;
  }

  // An assignment rhs that parsed as a single dotted call is a CallAssign;
  // resolution decides later whether it is really an ADT expression.
  StmtPtr callFromDotCall(ExprPtr lvalue, const ExprPtr& e) {
    if (e->kind != ExprKind::DotCall) return nullptr;
    const ExprPtr& base = e->lhs;
    if (base->kind != ExprKind::Var && base->kind != ExprKind::This &&
        base->kind != ExprKind::Sender && base->kind != ExprKind::FieldAccess)
      return nullptr;
    auto s = std::make_shared<Stmt>();
    s->kind = lvalue ? StmtKind::CallAssign : StmtKind::Call;
    s->pos = e->pos;
    s->lvalue = std::move(lvalue);
    s->recv = base;
    s->method = e->name;
    s->args = e->args;
    return s;
  }

  // Transfer amounts sit between `$` and `.m(...)`; keep them syntactically
  // simple so the method dot stays unambiguous.
  ExprPtr parseTransferExpr() {
    if (at(Tok::LParen)) {
      take();
      ExprPtr e = parseExpr();
      expect(Tok::RParen);
      return e;
    }
    return parsePrimary();
  }

  ExprPtr parseNew() {
    SourcePos p = cur().pos;
    expect(Tok::KwNew);
    auto e = mkExpr(ExprKind::New, p);
    const_cast<Expr&>(*e).name = expect(Tok::Ident).text;
    const_cast<Expr&>(*e).args = parseArgs();
    return e;
  }

  ExprPtr parseRhsExpr() {
    if (at(Tok::KwNew)) return parseNew();
    return parseExpr();
  }

  std::vector<ExprPtr> parseArgs() {
    std::vector<ExprPtr> args;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      args.push_back(parseExpr());
      while (at(Tok::Comma)) {
        take();
        args.push_back(parseExpr());
      }
    }
    expect(Tok::RParen);
    return args;
  }

  // --- expressions ---
  // Precedence (loosest first): || < && < comparisons < + - < * / < unary.

  ExprPtr parseExpr() { return parseOr(); }

  ExprPtr parseOr() {
    ExprPtr e = parseAnd();
    while (at(Tok::OrOr)) {
      SourcePos p = take().pos;
      e = binary(BinOp::Or, e, parseAnd(), p);
    }
    return e;
  }

  ExprPtr parseAnd() {
    ExprPtr e = parseCmp();
    while (at(Tok::AndAnd)) {
      SourcePos p = take().pos;
      e = binary(BinOp::And, e, parseCmp(), p);
    }
    return e;
  }

  ExprPtr parseCmp() {
    ExprPtr e = parseAdd();
    for (;;) {
      BinOp op;
      if (at(Tok::Le)) op = BinOp::Le;
      else if (at(Tok::Ge)) op = BinOp::Ge;
      else if (at(Tok::Lt)) op = BinOp::Lt;
      else if (at(Tok::Gt)) op = BinOp::Gt;
      else if (at(Tok::EqEq)) op = BinOp::Eq;
      else if (at(Tok::NotEq)) op = BinOp::Ne;
      else break;
      SourcePos p = take().pos;
      e = binary(op, e, parseAdd(), p);
    }
    return e;
  }

  ExprPtr parseAdd() {
    ExprPtr e = parseMul();
    for (;;) {
      BinOp op;
      if (at(Tok::Plus)) op = BinOp::Add;
      else if (at(Tok::Minus)) op = BinOp::Sub;
      else break;
      SourcePos p = take().pos;
      e = binary(op, e, parseMul(), p);
    }
    return e;
  }

  ExprPtr parseMul() {
    ExprPtr e = parseUnary();
    for (;;) {
      BinOp op;
      if (at(Tok::Star)) op = BinOp::Mul;
      else if (at(Tok::Slash)) op = BinOp::Div;
      else break;
      SourcePos p = take().pos;
      e = binary(op, e, parseUnary(), p);
    }
    return e;
  }

  ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r, SourcePos p) {
    auto e = mkExpr(ExprKind::Binary, p);
    auto& m = const_cast<Expr&>(*e);
    m.op = op;
    m.lhs = std::move(l);
    m.rhs = std::move(r);
    return e;
  }

  ExprPtr parseUnary() {
    SourcePos p = cur().pos;
    if (at(Tok::Bang)) {
      take();
      auto e = mkExpr(ExprKind::Not, p);
      const_cast<Expr&>(*e).lhs = parseUnary();
      return e;
    }
    // Signed literal: minus directly attached to an integer. There is no
    // general unary minus.
    if (at(Tok::Minus) && peek().kind == Tok::Int) {
      take();
      Token t = take();
      auto e = mkExpr(ExprKind::IntLit, p);
      const_cast<Expr&>(*e).intValue = -BigInt(t.text);
      return e;
    }
    return parsePostfix();
  }

  ExprPtr parsePostfix() {
    ExprPtr e = parsePrimary();
    for (;;) {
      if (at(Tok::Dot)) {
        take();
        SourcePos p = cur().pos;
        std::string name = expect(Tok::Ident).text;
        if (at(Tok::LParen)) {
          auto call = mkExpr(ExprKind::DotCall, p);
          auto& m = const_cast<Expr&>(*call);
          m.name = std::move(name);
          m.lhs = e;
          m.args = parseArgs();
          e = call;
        } else if (e->kind == ExprKind::This) {
          auto fa = mkExpr(ExprKind::FieldAccess, p);
          const_cast<Expr&>(*fa).name = std::move(name);
          e = fa;
        } else {
          auto acc = mkExpr(ExprKind::AdtAccess, p);
          auto& m = const_cast<Expr&>(*acc);
          m.name = std::move(name);
          m.lhs = e;
          e = acc;
        }
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parsePrimary() {
    SourcePos p = cur().pos;
    switch (cur().kind) {
      case Tok::Int: {
        Token t = take();
        auto e = mkExpr(ExprKind::IntLit, p);
        const_cast<Expr&>(*e).intValue = BigInt(t.text);
        return e;
      }
      case Tok::Minus: {
        if (peek().kind != Tok::Int) fail("'-' is only allowed on integer literals");
        take();
        Token t = take();
        auto e = mkExpr(ExprKind::IntLit, p);
        const_cast<Expr&>(*e).intValue = -BigInt(t.text);
        return e;
      }
      case Tok::String: {
        Token t = take();
        auto e = mkExpr(ExprKind::StringLit, p);
        const_cast<Expr&>(*e).strValue = t.text;
        return e;
      }
      case Tok::KwTrue: {
        take();
        auto e = mkExpr(ExprKind::BoolLit, p);
        const_cast<Expr&>(*e).boolValue = true;
        return e;
      }
      case Tok::KwFalse: {
        take();
        auto e = mkExpr(ExprKind::BoolLit, p);
        const_cast<Expr&>(*e).boolValue = false;
        return e;
      }
      case Tok::KwThis: take(); return mkExpr(ExprKind::This, p);
      case Tok::KwSender: take(); return mkExpr(ExprKind::Sender, p);
      case Tok::Amount: take(); return mkExpr(ExprKind::Amount, p);
      case Tok::LParen: {
        take();
        ExprPtr e = parseExpr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident: {
        Token t = take();
        if (at(Tok::LParen)) {
          auto e = mkExpr(ExprKind::AdtCall, p);
          auto& m = const_cast<Expr&>(*e);
          m.name = t.text;
          m.args = parseArgs();
          return e;
        }
        auto e = mkExpr(ExprKind::Var, p);
        const_cast<Expr&>(*e).name = t.text;
        return e;
      }
      default:
        fail("expected expression");
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

inline Program parse(const std::string& source) { return Parser(source).parseProgram(); }

}  // namespace smartml
