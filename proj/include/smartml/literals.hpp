#pragma once

#include <optional>
#include <string>

#include "smartml/eval.hpp"
#include "smartml/parser.hpp"

namespace smartml {

// Host program extended with extra declarations, re-resolved as one namespace.
inline ResolvedProgram resolveWith(const ResolvedProgram& host, Program extra) {
  Program combined = host.ast;
  for (auto& a : extra.adts) combined.adts.push_back(std::move(a));
  for (auto& c : extra.contracts) combined.contracts.push_back(std::move(c));
  return resolve(combined);
}

// Parses a constant SmartML expression ("4", "true", "cons(1, nil)") into a
// value. Used for CLI arguments and entry-point constructor arguments; an
// expected type disambiguates shared ADT constructor names.
inline ValuePtr parseValueLiteral(const ResolvedProgram& rp, const std::string& text,
                                  std::optional<Type> expected = std::nullopt) {
  // Reuse the front end by parsing a synthetic one-field contract whose
  // constructor initializer is the literal.
  std::string fieldType = expected ? expected->str() : "int";
  if (!expected) {
    if (text == "true" || text == "false") fieldType = "bool";
    else if (!text.empty() && text.front() == '"') fieldType = "string";
  }
  Program p = parse("contract __Lit { " + fieldType + " x; constructor() { this.x = " + text +
                    "; } }");
  ResolvedProgram merged = resolveWith(rp, std::move(p));
  const ContractDecl* lit = merged.contract("__Lit").decl;
  const ExprPtr& init = lit->ctor.inits.at(0).init;
  long fuel = 100000;
  VolatileMemory none;
  PermanentMemory pm;
  EvalCtx ctx{merged, none, pm, "", "@env", 0, nullptr, &fuel};
  return evalExpr(ctx, init);
}

}  // namespace smartml
