#include "keraia/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>

#include "keraia/error.hpp"

namespace keraia {

namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct Token {
  enum class Type { End, Number, String, Ident, Var, KLine, Punct };
  Type type = Type::End;
  std::string text;
  double number = 0.0;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.offset = pos_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        t.type = Token::Type::Number;
        lex_number(t);
      } else if (c == '\'' || c == '"') {
        t.type = Token::Type::String;
        lex_string(t, c);
      } else if (c == '?') {
        ++pos_;
        t.type = Token::Type::Var;
        t.text = lex_ident_text();
        if (t.text.empty()) fail("expected variable name after '?'", t.offset);
      } else if (c == '@') {
        ++pos_;
        t.type = Token::Type::KLine;
        std::size_t start = pos_;
        while (pos_ < src_.size() && (word_char(src_[pos_]) || src_[pos_] == '-' ||
                                      src_[pos_] == '.' || src_[pos_] == '/')) {
          ++pos_;
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        if (t.text.empty()) fail("expected KLine path after '@'", t.offset);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.type = Token::Type::Ident;
        t.text = lex_ident_text();
      } else {
        t.type = Token::Type::Punct;
        static const char* two[] = {"==", "!=", "<=", ">="};
        bool matched = false;
        for (const char* op : two) {
          if (src_.substr(pos_, 2) == op) {
            t.text = op;
            pos_ += 2;
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (std::string_view("<>+-*/(),.[]").find(c) == std::string_view::npos) {
            fail(std::string("unexpected character '") + c + "'", pos_);
          }
          t.text = std::string(1, c);
          ++pos_;
        }
      }
      out.push_back(std::move(t));
    }
  }

  [[noreturn]] static void fail(const std::string& msg, std::size_t offset) {
    throw Error(ErrorCode::SyntaxError, "expression offset " + std::to_string(offset) + ": " + msg);
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  std::string lex_ident_text() {
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (word_char(c)) {
        ++pos_;
      } else if (c == '-' && pos_ > start && pos_ + 1 < src_.size() && word_char(src_[pos_ + 1]) &&
                 word_char(src_[pos_ - 1])) {
        ++pos_;
      } else {
        break;
      }
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    char* end = nullptr;
    t.number = std::strtod(t.text.c_str(), &end);
    if (end != t.text.c_str() + t.text.size()) fail("malformed number '" + t.text + "'", start);
  }

  void lex_string(Token& t, char quote) {
    std::size_t start = pos_++;
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != quote) {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
      out += src_[pos_++];
    }
    if (pos_ >= src_.size()) fail("unterminated string", start);
    ++pos_;
    t.text = std::move(out);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ExprPtr parse() {
    auto e = parse_or();
    if (peek().type != Token::Type::End) Lexer::fail("unexpected '" + peek().text + "'", peek().offset);
    return e;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token take() { return toks_[i_++]; }

  bool is_punct(std::string_view p) const {
    return peek().type == Token::Type::Punct && peek().text == p;
  }
  bool is_keyword(std::string_view k) const {
    return peek().type == Token::Type::Ident && peek().text == k;
  }
  void expect(std::string_view p) {
    if (!is_punct(p)) Lexer::fail("expected '" + std::string(p) + "'", peek().offset);
    ++i_;
  }

  static ExprPtr binary(Expr::Op op, ExprPtr a, ExprPtr b, std::size_t offset) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->offset = offset;
    e->children = {std::move(a), std::move(b)};
    return e;
  }

  ExprPtr parse_or() {
    auto lhs = parse_and();
    while (is_keyword("or")) {
      auto off = take().offset;
      lhs = binary(Expr::Op::Or, lhs, parse_and(), off);
    }
    return lhs;
  }

  ExprPtr parse_and() {
    auto lhs = parse_not();
    while (is_keyword("and")) {
      auto off = take().offset;
      lhs = binary(Expr::Op::And, lhs, parse_not(), off);
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (is_keyword("not")) {
      auto e = std::make_shared<Expr>();
      e->offset = take().offset;
      e->kind = Expr::Kind::Not;
      e->children = {parse_not()};
      return e;
    }
    return parse_compare();
  }

  ExprPtr parse_compare() {
    auto lhs = parse_sum();
    static const std::pair<const char*, Expr::Op> ops[] = {
        {"==", Expr::Op::Eq}, {"!=", Expr::Op::Ne}, {"<=", Expr::Op::Le},
        {">=", Expr::Op::Ge}, {"<", Expr::Op::Lt},  {">", Expr::Op::Gt}};
    for (const auto& [txt, op] : ops) {
      if (is_punct(txt)) {
        auto off = take().offset;
        return binary(op, lhs, parse_sum(), off);
      }
    }
    return lhs;
  }

  ExprPtr parse_sum() {
    auto lhs = parse_product();
    while (is_punct("+") || is_punct("-")) {
      auto t = take();
      lhs = binary(t.text == "+" ? Expr::Op::Add : Expr::Op::Sub, lhs, parse_product(), t.offset);
    }
    return lhs;
  }

  ExprPtr parse_product() {
    auto lhs = parse_unary();
    while (is_punct("*") || is_punct("/")) {
      auto t = take();
      lhs = binary(t.text == "*" ? Expr::Op::Mul : Expr::Op::Div, lhs, parse_unary(), t.offset);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (is_punct("-")) {
      auto e = std::make_shared<Expr>();
      e->offset = take().offset;
      e->kind = Expr::Kind::Neg;
      e->children = {parse_unary()};
      return e;
    }
    return parse_primary();
  }

  void parse_member_path(Expr& e) {
    while (is_punct(".")) {
      ++i_;
      if (peek().type != Token::Type::Ident) Lexer::fail("expected member name after '.'", peek().offset);
      e.path.push_back(take().text);
    }
  }

  ExprPtr parse_primary() {
    auto e = std::make_shared<Expr>();
    const Token& t = peek();
    e->offset = t.offset;
    switch (t.type) {
      case Token::Type::Number:
        e->literal = SlotValue(take().number);
        return e;
      case Token::Type::String:
        e->literal = SlotValue(take().text);
        return e;
      case Token::Type::Var:
        e->kind = Expr::Kind::Var;
        e->name = take().text;
        parse_member_path(*e);
        return e;
      case Token::Type::KLine:
        e->kind = Expr::Kind::KLine;
        e->path = split_path(take().text);
        return e;
      case Token::Type::Ident: {
        if (t.text == "true" || t.text == "false") {
          e->literal = SlotValue(take().text == "true");
          return e;
        }
        if (t.text == "and" || t.text == "or" || t.text == "not") {
          Lexer::fail("unexpected keyword '" + t.text + "'", t.offset);
        }
        e->name = take().text;
        if (is_punct("(")) {
          ++i_;
          e->kind = Expr::Kind::Call;
          if (!is_punct(")")) {
            e->children.push_back(parse_or());
            while (is_punct(",")) {
              ++i_;
              e->children.push_back(parse_or());
            }
          }
          expect(")");
          return e;
        }
        e->kind = Expr::Kind::Ref;
        parse_member_path(*e);
        return e;
      }
      case Token::Type::Punct:
        if (t.text == "(") {
          ++i_;
          auto inner = parse_or();
          expect(")");
          return inner;
        }
        if (t.text == "[") {
          ++i_;
          e->kind = Expr::Kind::List;
          if (!is_punct("]")) {
            e->children.push_back(parse_or());
            while (is_punct(",")) {
              ++i_;
              e->children.push_back(parse_or());
            }
          }
          expect("]");
          return e;
        }
        break;
      case Token::Type::End:
        Lexer::fail("unexpected end of expression", t.offset);
    }
    Lexer::fail("unexpected '" + t.text + "'", t.offset);
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Var) out.insert(e.name);
  for (const auto& c : e.children) collect_vars(*c, out);
}

}  // namespace

ExprPtr parse_expr(std::string_view text) {
  return Parser(Lexer(text).run()).parse();
}

std::set<std::string> free_variables(const Expr& expr) {
  std::set<std::string> out;
  collect_vars(expr, out);
  return out;
}

std::string_view to_string(Expr::Op op) {
  switch (op) {
    case Expr::Op::And: return "and";
    case Expr::Op::Or: return "or";
    case Expr::Op::Eq: return "==";
    case Expr::Op::Ne: return "!=";
    case Expr::Op::Lt: return "<";
    case Expr::Op::Le: return "<=";
    case Expr::Op::Gt: return ">";
    case Expr::Op::Ge: return ">=";
    case Expr::Op::Add: return "+";
    case Expr::Op::Sub: return "-";
    case Expr::Op::Mul: return "*";
    case Expr::Op::Div: return "/";
  }
  return "?";
}

Condition Condition::parse(std::string text) {
  Condition c;
  c.ast = parse_expr(text);
  c.text = std::move(text);
  return c;
}

}  // namespace keraia
