// Text syntax.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' '-'? integer)?
//   primary := integer | '(' expr ')' | ident | call
//   call    := 'exp' '(' expr ')' | 'ln' '(' expr ')' | 'int' '(' expr ',' ident ')'
//            | ident primes? '(' expr (',' expr)* ')'
//   primes  := "'"+ | "'" '[' integer (',' integer)* ']'
//
// Operators use the same grammar with derivation atoms D<var>. They are read
// in normal order: no nonconstant factor may stand right of a derivation.
#pragma once

#include <string>

#include "cascade/expr.hpp"
#include "cascade/lpdo.hpp"

namespace cascade {

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t position, const std::string& what)
      : Error(kind, what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Identifiers not followed by '(' must be among vars unless free_variables is set.
Expr parse_expression(const std::string& text, const Variables& vars, bool free_variables = false);
LinearOperator parse_operator(const std::string& text, const Variables& vars);

/// Splits "x,y,z" into names; rejects empty or duplicate names.
Variables parse_variable_list(const std::string& text);

}  // namespace cascade
