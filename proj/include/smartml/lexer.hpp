#pragma once

#include <cctype>
#include <string>
#include <unordered_map>
#include <vector>

#include "smartml/diag.hpp"

namespace smartml {

enum class Tok {
  End,
  Ident,
  Int,       // decimal digits, no sign
  String,    // double quoted
  Amount,    // the implicit <amount> binding
  // keywords
  KwContract, KwExtends, KwConstructor, KwDatatype, KwFunction,
  KwIf, KwElse, KwWhile, KwLet, KwIn, KwAssert, KwReturn, KwThrow,
  KwTry, KwAbort, KwSuccess, KwSwitch, KwCase, KwDefault, KwNew,
  KwTrue, KwFalse, KwThis, KwSender, KwSuper, KwIrrelevant,
  KwInt, KwBool, KwString, KwAddress,
  // punctuation / operators
  LBrace, RBrace, LParen, RParen, Semi, Comma, Dot, Colon, Pipe, Dollar,
  Assign,      // = and :=
  Plus, Minus, Star, Slash,
  EqEq, NotEq, Le, Ge, Lt, Gt, AndAnd, OrOr, Bang,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

inline const char* tokName(Tok t) {
  switch (t) {
    case Tok::End: return "<eof>";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::Amount: return "<amount>";
    case Tok::KwContract: return "'contract'";
    case Tok::KwExtends: return "'extends'";
    case Tok::KwConstructor: return "'constructor'";
    case Tok::KwDatatype: return "'datatype'";
    case Tok::KwFunction: return "'function'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIn: return "'in'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwThrow: return "'throw'";
    case Tok::KwTry: return "'try'";
    case Tok::KwAbort: return "'abort'";
    case Tok::KwSuccess: return "'success'";
    case Tok::KwSwitch: return "'switch'";
    case Tok::KwCase: return "'case'";
    case Tok::KwDefault: return "'default'";
    case Tok::KwNew: return "'new'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwThis: return "'this'";
    case Tok::KwSender: return "'sender'";
    case Tok::KwSuper: return "'super'";
    case Tok::KwIrrelevant: return "'irrelevant'";
    case Tok::KwInt: return "'int'";
    case Tok::KwBool: return "'bool'";
    case Tok::KwString: return "'string'";
    case Tok::KwAddress: return "'address'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Pipe: return "'|'";
    case Tok::Dollar: return "'$'";
    case Tok::Assign: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Le: return "'<='";
    case Tok::Ge: return "'>='";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
  }
  return "?";
}

class Lexer {
public:
  explicit Lexer(std::string source) : src_(std::move(source)) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) break;
    }
    return out;
  }

private:
  static const std::unordered_map<std::string, Tok>& keywords() {
    static const std::unordered_map<std::string, Tok> kw = {
        {"contract", Tok::KwContract},   {"extends", Tok::KwExtends},
        {"constructor", Tok::KwConstructor}, {"datatype", Tok::KwDatatype},
        {"function", Tok::KwFunction},   {"if", Tok::KwIf},
        {"else", Tok::KwElse},           {"while", Tok::KwWhile},
        {"let", Tok::KwLet},             {"in", Tok::KwIn},
        {"assert", Tok::KwAssert},       {"return", Tok::KwReturn},
        {"throw", Tok::KwThrow},         {"try", Tok::KwTry},
        {"abort", Tok::KwAbort},         {"success", Tok::KwSuccess},
        {"switch", Tok::KwSwitch},       {"case", Tok::KwCase},
        {"default", Tok::KwDefault},     {"new", Tok::KwNew},
        {"true", Tok::KwTrue},           {"false", Tok::KwFalse},
        {"this", Tok::KwThis},           {"sender", Tok::KwSender},
        {"super", Tok::KwSuper},         {"irrelevant", Tok::KwIrrelevant},
        {"int", Tok::KwInt},             {"bool", Tok::KwBool},
        {"string", Tok::KwString},       {"address", Tok::KwAddress},
    };
    return kw;
  }

  char peek(size_t off = 0) const {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skipTrivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (peek() != '\n' && peek() != '\0') advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    skipTrivia();
    Token t;
    t.pos = {line_, col_};
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') word += advance();
      auto it = keywords().find(word);
      t.kind = it != keywords().end() ? it->second : Tok::Ident;
      t.text = word;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
      t.kind = Tok::Int;
      t.text = num;
      return t;
    }
    if (c == '"') {
      advance();
      std::string text;
      for (;;) {
        char d = peek();
        if (d == '\0' || d == '\n') throw ParseError(t.pos, "unterminated string literal");
        advance();
        if (d == '"') break;
        if (d == '\\') {
          char e = peek();
          advance();
          switch (e) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            case '\\': text += '\\'; break;
            case '"': text += '"'; break;
            default: throw ParseError(t.pos, std::string("bad escape '\\") + e + "'");
          }
        } else {
          text += d;
        }
      }
      t.kind = Tok::String;
      t.text = text;
      return t;
    }
    advance();
    switch (c) {
      case '{': t.kind = Tok::LBrace; return t;
      case '}': t.kind = Tok::RBrace; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case ';': t.kind = Tok::Semi; return t;
      case ',': t.kind = Tok::Comma; return t;
      case '.': t.kind = Tok::Dot; return t;
      case '|':
        if (peek() == '|') { advance(); t.kind = Tok::OrOr; return t; }
        t.kind = Tok::Pipe; return t;
      case '$': t.kind = Tok::Dollar; return t;
      case ':':
        if (peek() == '=') { advance(); t.kind = Tok::Assign; return t; }
        t.kind = Tok::Colon; return t;
      case '=':
        if (peek() == '=') { advance(); t.kind = Tok::EqEq; return t; }
        t.kind = Tok::Assign; return t;
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '!':
        if (peek() == '=') { advance(); t.kind = Tok::NotEq; return t; }
        t.kind = Tok::Bang; return t;
      case '<':
        // The implicit value-transfer binding is lexed as a single token so
        // that '<' stays available as a comparison operator.
        if (src_.compare(pos_, 7, "amount>") == 0) {
          for (int i = 0; i < 7; ++i) advance();
          t.kind = Tok::Amount;
          return t;
        }
        if (peek() == '=') { advance(); t.kind = Tok::Le; return t; }
        t.kind = Tok::Lt; return t;
      case '>':
        if (peek() == '=') { advance(); t.kind = Tok::Ge; return t; }
        t.kind = Tok::Gt; return t;
      case '&':
        if (peek() == '&') { advance(); t.kind = Tok::AndAnd; return t; }
        throw ParseError(t.pos, "stray '&'");
      default:
        throw ParseError(t.pos, std::string("unexpected character '") + c + "'");
    }
  }

  std::string src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace smartml
