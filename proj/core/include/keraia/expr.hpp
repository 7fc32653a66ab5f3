#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "keraia/value.hpp"

namespace keraia {

// Condition / value expression AST.
//
//   expr    := or
//   or      := and ('or' and)*
//   and     := not ('and' not)*
//   not     := 'not' not | compare
//   compare := sum (('=='|'!='|'<'|'<='|'>'|'>=') sum)?
//   sum     := product (('+'|'-') product)*
//   product := unary (('*'|'/') unary)*
//   unary   := '-' unary | primary
//   primary := number | 'str' | "str" | true | false | '[' list ']' | '(' expr ')'
//            | name '(' args ')' | ?var('.' seg)* | name('.' seg)* | @kline/path
//
// Identifiers may contain '-' between word characters (appellations such as
// KS-FC2), so subtraction needs surrounding whitespace.
struct Expr {
  enum class Kind { Literal, Ref, Var, KLine, Not, Neg, Binary, Call, List };
  enum class Op { And, Or, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };

  Kind kind = Kind::Literal;
  Op op = Op::And;
  SlotValue literal;
  std::string name;               // Ref root, Var name, Call function
  std::vector<std::string> path;  // member path after the root / KLine segments
  std::vector<std::shared_ptr<const Expr>> children;
  std::size_t offset = 0;         // position in the source text
};

using ExprPtr = std::shared_ptr<const Expr>;

// Throws Error{SyntaxError} with the character offset in the message.
ExprPtr parse_expr(std::string_view text);

// Names of `?vars` referenced anywhere in the tree.
std::set<std::string> free_variables(const Expr& expr);

std::string_view to_string(Expr::Op op);

// A condition keeps its source text (the KSYNTH-level identity) next to the
// parsed tree.
struct Condition {
  std::string text;
  ExprPtr ast;

  static Condition parse(std::string text);
  bool empty() const { return text.empty(); }

  friend bool operator==(const Condition& a, const Condition& b) { return a.text == b.text; }
};

}  // namespace keraia
