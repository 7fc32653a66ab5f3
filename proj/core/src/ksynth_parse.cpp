#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "keraia/ksynth.hpp"

namespace keraia::ksynth {

namespace {

struct Token {
  enum class Type { Ident, Var, Number, String, Punct, End };
  Type type = Type::End;
  std::string text;
  double number = 0;
  Position pos;
};

struct Failure {
  Diagnostic diag;
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  Lexer(std::string_view src, std::string source) : src_(src), source_(std::move(source)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = pos();
      if (i_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (c == '"') {
        t.type = Token::Type::String;
        t.text = lex_string();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
        lex_number(t);
      } else if (c == '?') {
        advance();
        t.type = Token::Type::Var;
        t.text = lex_ident();
        if (t.text.empty()) fail(t.pos, "expected variable name after '?'");
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.type = Token::Type::Ident;
        t.text = lex_ident();
      } else if (c == '-' && i_ + 1 < src_.size() && src_[i_ + 1] == '>') {
        t.type = Token::Type::Punct;
        t.text = "->";
        advance();
        advance();
      } else if (std::string_view("{}()[]=,/").find(c) != std::string_view::npos) {
        t.type = Token::Type::Punct;
        t.text = std::string(1, c);
        advance();
      } else {
        fail(t.pos, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

  [[noreturn]] void fail(Position p, std::string msg) const {
    throw Failure{Diagnostic{ErrorCode::SyntaxError, p, source_, std::move(msg)}};
  }

 private:
  Position pos() const { return Position{line_, col_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c)) || c == ';') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string lex_ident() {
    std::size_t start = i_;
    while (i_ < src_.size()) {
      char c = src_[i_];
      bool inner = (c == '-' || c == '.') && i_ > start && i_ + 1 < src_.size() && word_char(src_[i_ + 1]);
      if (word_char(c) || inner) {
        advance();
      } else {
        break;
      }
    }
    return std::string(src_.substr(start, i_ - start));
  }

  std::string lex_string() {
    Position start = pos();
    advance();
    std::string out;
    while (i_ < src_.size() && src_[i_] != '"') {
      char c = src_[i_];
      if (c == '\\') {
        advance();
        if (i_ >= src_.size()) break;
        char e = src_[i_];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(pos(), std::string("unknown escape '\\") + e + "'");
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    if (i_ >= src_.size()) fail(start, "unterminated string");
    advance();
    return out;
  }

  void lex_number(Token& t) {
    std::size_t start = i_;
    if (src_[i_] == '-') advance();
    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
    if (i_ + 1 < src_.size() && src_[i_] == '.' && std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      advance();
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t save = i_;
      std::size_t j = i_ + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
        while (i_ < j) advance();
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
      } else {
        i_ = save;
      }
    }
    t.type = Token::Type::Number;
    t.text = std::string(src_.substr(start, i_ - start));
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (res.ec != std::errc()) fail(t.pos, "malformed number '" + t.text + "'");
    if (i_ < src_.size() && word_char(src_[i_])) fail(t.pos, "malformed number '" + t.text + src_[i_] + "'");
  }

  std::string_view src_;
  std::string source_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::string describe(const Token& t) {
  switch (t.type) {
    case Token::Type::End: return "end of input";
    case Token::Type::String: return "string \"" + t.text + "\"";
    case Token::Type::Var: return "'?" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts, std::set<std::filesystem::path>* stack,
         std::set<std::filesystem::path>* seen)
      : toks_(std::move(toks)), opts_(opts), stack_(stack), seen_(seen) {}

  Document document() {
    Document doc;
    while (!at_end()) doc.decls.push_back(decl(false));
    return doc;
  }

 private:
  // --- token helpers ---
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
  bool at_end() const { return peek().type == Token::Type::End; }
  const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool is_punct(std::string_view p) const { return peek().type == Token::Type::Punct && peek().text == p; }
  bool is_kw(std::string_view k) const { return peek().type == Token::Type::Ident && peek().text == k; }

  [[noreturn]] void fail(const Token& t, const std::string& expected) const {
    throw Failure{Diagnostic{ErrorCode::SyntaxError, t.pos, opts_.source_name,
                             "expected " + expected + ", found " + describe(t)}};
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail(peek(), "'" + std::string(p) + "'");
    ++i_;
  }
  void expect_kw(std::string_view k) {
    if (!is_kw(k)) fail(peek(), "'" + std::string(k) + "'");
    ++i_;
  }
  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    ++i_;
    return true;
  }
  bool accept_kw(std::string_view k) {
    if (!is_kw(k)) return false;
    ++i_;
    return true;
  }

  std::string ident(const std::string& what = "identifier") {
    if (peek().type != Token::Type::Ident) fail(peek(), what);
    return take().text;
  }
  std::string string_lit(const std::string& what = "string") {
    if (peek().type != Token::Type::String) fail(peek(), what);
    return take().text;
  }
  std::string var(const std::string& what = "variable") {
    if (peek().type != Token::Type::Var) fail(peek(), what);
    return take().text;
  }
  double number(const std::string& what = "number") {
    if (peek().type != Token::Type::Number) fail(peek(), what);
    return take().number;
  }
  long integer(const std::string& what = "integer") {
    const Token& t = peek();
    double v = number(what);
    if (v != static_cast<double>(static_cast<long>(v))) fail(t, what);
    return static_cast<long>(v);
  }
  std::string path() {
    std::string p = ident("slot path");
    while (accept_punct("/")) p += "/" + ident("path segment");
    return p;
  }

  Condition condition() {
    const Token& t = peek();
    std::string text = string_lit("quoted expression");
    try {
      return Condition::parse(text);
    } catch (const Error& e) {
      throw Failure{Diagnostic{ErrorCode::SyntaxError, t.pos, opts_.source_name,
                               std::string("in expression \"") + text + "\": " + e.what()}};
    }
  }

  // --- values ---
  SlotValue value() {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::String: return SlotValue(take().text);
      case Token::Type::Number: {
        double v = take().number;
        if (peek().type == Token::Type::String) return SlotValue(v, take().text);
        return SlotValue(v);
      }
      case Token::Type::Ident:
        if (t.text == "true" || t.text == "false") return SlotValue(take().text == "true");
        return SlotValue::ref(take().text);
      case Token::Type::Punct:
        if (t.text == "[") {
          ++i_;
          SlotList items;
          if (!is_punct("]")) {
            items.push_back(value());
            while (accept_punct(",")) items.push_back(value());
          }
          expect_punct("]");
          return SlotValue(std::move(items));
        }
        if (t.text == "{") {
          ++i_;
          SlotValue map = SlotValue::map();
          if (!is_punct("}")) {
            do {
              const Token& key = peek();
              std::string name = ident("map key");
              if (map.find(name)) dup(key, "map key '" + name + "'");
              expect_punct("=");
              map.put(name, value());
            } while (accept_punct(","));
          }
          expect_punct("}");
          return map;
        }
        break;
      default: break;
    }
    fail(t, "value");
  }

  [[noreturn]] void dup(const Token& t, const std::string& what) const {
    throw Failure{Diagnostic{ErrorCode::DuplicateAppellation, t.pos, opts_.source_name, "duplicate " + what}};
  }

  Term term() {
    const Token& t = peek();
    if (t.type == Token::Type::Var) {
      std::string v = take().text;
      if (v.find('.') != std::string::npos) return Term::expr("?" + v);
      return Term::var(v);
    }
    if (t.type == Token::Type::Ident && t.text == "expr") {
      ++i_;
      Condition c = condition();
      Term out;
      out.kind = Term::Kind::Computed;
      out.computed = std::move(c);
      return out;
    }
    if (t.type == Token::Type::Ident && t.text != "true" && t.text != "false") return Term::value(SlotValue(take().text));
    return Term::value(value());
  }

  std::vector<Term> term_args() {
    std::vector<Term> args;
    expect_punct("(");
    if (!is_punct(")")) {
      args.push_back(term());
      while (accept_punct(",")) args.push_back(term());
    }
    expect_punct(")");
    return args;
  }

  // --- declarations ---
  Decl decl(bool in_cloud) {
    Decl d;
    d.pos = peek().pos;
    const Token& t = peek();
    if (t.type != Token::Type::Ident) fail(t, "declaration keyword");
    const std::string kw = t.text;
    ++i_;
    if (kw == "cloud") d.node = cloud();
    else if (kw == "ks" && in_cloud) d.node = ks();
    else if (kw == "drel") d.node = drel();
    else if (kw == "lot" && !in_cloud) d.node = lot();
    else if (kw == "dimension" && !in_cloud) d.node = dimension();
    else if (kw == "juncture" && !in_cloud) d.node = juncture();
    else if (kw == "rule" && !in_cloud) d.node = rule();
    else if (kw == "template" && !in_cloud) d.node = templ();
    else if (kw == "anomaly" && !in_cloud) d.node = anomaly();
    else if (kw == "elaborate" && !in_cloud) d.node = elaborate();
    else if (kw == "use" && !in_cloud) d.node = use(t);
    else {
      --i_;
      fail(t, in_cloud ? "'cloud', 'ks', 'drel', 'tag' or '}'"
                       : "'cloud', 'ks', 'drel', 'lot', 'dimension', 'juncture', 'rule', 'template', 'anomaly', "
                         "'elaborate' or 'use'");
    }
    return d;
  }

  CloudDecl cloud() {
    CloudDecl c;
    c.name = ident("cloud name");
    expect_punct("{");
    while (!accept_punct("}")) {
      if (at_end()) fail(peek(), "'}'");
      if (accept_kw("tag")) {
        c.tags.push_back(ident("dimension name"));
        continue;
      }
      c.body.push_back(decl(true));
    }
    return c;
  }

  void slot_block(SlotValue& map) {
    while (!accept_punct("}")) {
      if (at_end()) fail(peek(), "'}'");
      expect_kw("slot");
      slot_into(map);
    }
  }

  void slot_into(SlotValue& map) {
    const Token& nt = peek();
    std::string name = ident("slot name");
    if (map.find(name)) dup(nt, "slot '" + name + "'");
    if (accept_punct("{")) {
      SlotValue nested = SlotValue::map();
      slot_block(nested);
      map.put(name, std::move(nested));
      return;
    }
    expect_punct("=");
    map.put(name, value());
  }

  KsDecl ks() {
    KsDecl k;
    k.name = ident("knowledge source name");
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("slot")) {
        slot_into(k.slots);
      } else if (accept_kw("explains")) {
        if (k.explains) dup(t, "explains in '" + k.name + "'");
        k.explains = string_lit();
      } else if (accept_kw("responder")) {
        ResponderBinding r;
        const Token& nt = peek();
        r.name = ident("responder name");
        if (k.responders.end() != std::find_if(k.responders.begin(), k.responders.end(),
                                               [&](const auto& x) { return x.name == r.name; })) {
          dup(nt, "responder '" + r.name + "'");
        }
        expect_punct("=");
        r.operation = ident("operation name");
        expect_punct("(");
        SlotValue params = SlotValue::map();
        if (!is_punct(")")) {
          do {
            const Token& pt = peek();
            std::string key = ident("parameter name");
            if (params.find(key)) dup(pt, "parameter '" + key + "'");
            expect_punct("=");
            params.put(key, value());
          } while (accept_punct(","));
        }
        expect_punct(")");
        r.params = std::move(params.entries());
        k.responders.push_back(std::move(r));
      } else if (accept_kw("attractor")) {
        AttractorBinding a;
        a.condition = condition();
        expect_punct("->");
        a.responder = ident("responder name");
        if (accept_kw("watch")) a.watch = path();
        k.attractors.push_back(std::move(a));
      } else {
        fail(t, "'slot', 'explains', 'responder', 'attractor' or '}'");
      }
    }
    return k;
  }

  DRel drel() {
    DRel d;
    d.appellation = ident("drel name");
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("source")) d.source_ks = ident("source KS");
      else if (accept_kw("target")) d.target_ks = ident("target KS");
      else if (accept_kw("share")) {
        d.shared_attributes.push_back(path());
        while (accept_punct(",")) d.shared_attributes.push_back(path());
      } else if (accept_kw("when")) d.condition = condition();
      else if (accept_kw("priority")) d.priority = static_cast<int>(integer("priority"));
      else fail(t, "'source', 'target', 'share', 'when', 'priority' or '}'");
    }
    return d;
  }

  Branch branch() {
    Branch b;
    b.label = ident("branch label");
    if (accept_kw("when")) b.when = condition();
    expect_punct("->");
    const Token& t = peek();
    if (accept_kw("lot")) {
      b.target = Branch::Target::Lot;
      b.lot = ident("LoT name");
    } else if (accept_kw("step")) {
      b.target = Branch::Target::Step;
      const Token& nt = peek();
      long n = integer("step number");
      if (n < 1) fail(nt, "step number >= 1");
      b.step = static_cast<std::size_t>(n - 1);
    } else if (accept_kw("halt")) {
      b.target = Branch::Target::Halt;
    } else {
      fail(t, "'lot', 'step' or 'halt'");
    }
    return b;
  }

  Fork fork() {
    Fork f;
    if (accept_kw("ruleset")) {
      f.kind = Fork::Kind::RuleSet;
      f.rule_set = ident("rule set name");
      expect_kw("fact");
      f.fact = ident("fact relation");
    }
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      expect_kw("branch");
      Branch b = branch();
      for (const auto& other : f.branches) {
        if (other.label == b.label) dup(t, "branch label '" + b.label + "'");
      }
      f.branches.push_back(std::move(b));
    }
    return f;
  }

  LineOfThought lot() {
    LineOfThought l;
    l.name = ident("LoT name");
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("step")) {
        Step s;
        s.target = ident("step target KS");
        if (accept_kw("responder")) {
          s.action = Step::Action::Responder;
          s.name = ident("responder name");
        } else if (accept_kw("ruleset")) {
          s.action = Step::Action::RuleSet;
          s.name = ident("rule set name");
        }
        if (accept_punct("{")) {
          expect_kw("fork");
          s.fork = fork();
          expect_punct("}");
        }
        l.steps.push_back(std::move(s));
      } else if (accept_kw("juncture")) {
        l.junctures.push_back(ident("juncture name"));
      } else {
        fail(t, "'step', 'juncture' or '}'");
      }
    }
    return l;
  }

  Dimension dimension() {
    Dimension d;
    d.name = ident("dimension name");
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("description")) d.description = string_lit();
      else if (accept_kw("juncture")) d.parent_juncture = ident("juncture name");
      else if (accept_kw("assume")) {
        Assumption a;
        a.path = path();
        expect_punct("=");
        a.value = value();
        d.assumptions.push_back(std::move(a));
      } else fail(t, "'description', 'juncture', 'assume' or '}'");
    }
    return d;
  }

  Juncture juncture() {
    Juncture j;
    j.name = ident("juncture name");
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("dimension")) j.member_dimensions.insert(ident("dimension name"));
      else if (accept_kw("lot")) j.linked_lots.insert(ident("LoT name"));
      else fail(t, "'dimension', 'lot' or '}'");
    }
    return j;
  }

  // Returns false when the current token does not start a pattern.
  bool pattern(std::vector<Pattern>& out) {
    Pattern p;
    if (accept_kw("absent")) {
      p.negated = true;
      if (!pattern_body(p)) fail(peek(), "'find', 'fact' or 'test' after 'absent'");
      out.push_back(std::move(p));
      return true;
    }
    if (!pattern_body(p)) return false;
    out.push_back(std::move(p));
    return true;
  }

  bool pattern_body(Pattern& p) {
    if (accept_kw("find")) {
      p.kind = Pattern::Kind::Object;
      p.variable = var();
      if (accept_kw("type")) p.type = ident("type name");
      if (accept_kw("where")) p.where = condition();
      return true;
    }
    if (accept_kw("fact")) {
      p.kind = Pattern::Kind::Fact;
      p.relation = ident("relation name");
      p.args = term_args();
      return true;
    }
    if (accept_kw("test")) {
      p.kind = Pattern::Kind::Test;
      p.test = condition();
      return true;
    }
    if (p.negated) return false;
    if (is_kw("minimize") || is_kw("maximize")) {
      p.kind = Pattern::Kind::Aggregate;
      p.minimize = take().text == "minimize";
      const Token& vt = peek();
      std::string v = var("?variable.path");
      auto dot = v.find('.');
      if (dot == std::string::npos) fail(vt, "?variable.path");
      p.variable = v.substr(0, dot);
      p.path = v.substr(dot + 1);
      std::replace(p.path.begin(), p.path.end(), '.', '/');
      expect_kw("as");
      p.alias = ident("alias name");
      return true;
    }
    return false;
  }

  Action action() {
    Action a;
    const Token& t = peek();
    if (accept_kw("assert")) {
      a.kind = Action::Kind::Assert;
      a.relation = ident("relation name");
      a.args = term_args();
    } else if (accept_kw("set")) {
      a.kind = Action::Kind::Set;
      const Token& vt = peek();
      std::string v = var("?variable.path");
      auto dot = v.find('.');
      if (dot == std::string::npos) fail(vt, "?variable.path");
      a.variable = v.substr(0, dot);
      a.path = v.substr(dot + 1);
      std::replace(a.path.begin(), a.path.end(), '.', '/');
      expect_punct("=");
      a.value = term();
    } else if (accept_kw("command")) {
      a.kind = Action::Kind::Command;
      a.name = ident("command name");
      expect_punct("(");
      if (!is_punct(")")) {
        do {
          std::string key = ident("argument name");
          expect_punct("=");
          a.named_args.emplace_back(std::move(key), term());
        } while (accept_punct(","));
      }
      expect_punct(")");
    } else if (accept_kw("invoke")) {
      a.kind = Action::Kind::Invoke;
      a.variable = var();
      a.name = ident("responder name");
    } else if (accept_kw("halt")) {
      a.kind = Action::Kind::Halt;
    } else {
      fail(t, "'assert', 'set', 'command', 'invoke' or 'halt'");
    }
    return a;
  }

  Rule rule() {
    Rule r;
    r.name = ident("rule name");
    expect_punct("{");
    bool have_then = false;
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("ruleset")) r.rule_set = ident("rule set name");
      else if (accept_kw("salience")) r.salience = static_cast<int>(integer("salience"));
      else if (accept_kw("param")) r.params.push_back(var());
      else if (accept_kw("then")) {
        if (have_then) dup(t, "'then' block in rule '" + r.name + "'");
        have_then = true;
        expect_punct("{");
        while (!accept_punct("}")) r.actions.push_back(action());
      } else if (!pattern(r.patterns)) {
        fail(t, "'ruleset', 'salience', 'param', 'find', 'fact', 'absent', 'test', 'minimize', 'maximize', "
                "'then' or '}'");
      }
    }
    return r;
  }

  GppbTemplate templ() {
    GppbTemplate g;
    g.name = ident("template name");
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("bind")) {
        std::string name = ident("variable name");
        expect_punct("=");
        g.instantiation.emplace_back(std::move(name), value());
      } else if (accept_kw("output")) {
        OutputSpec o;
        o.cloud = ident("cloud name");
        expect_punct("{");
        while (!accept_punct("}")) {
          expect_kw("slot");
          std::string name = ident("slot name");
          expect_punct("=");
          o.slots.emplace_back(std::move(name), term());
        }
        g.outputs.push_back(std::move(o));
      } else if (!pattern(g.patterns)) {
        fail(t, "'find', 'fact', 'absent', 'test', 'minimize', 'maximize', 'bind', 'output' or '}'");
      }
    }
    return g;
  }

  AnomalySpec anomaly() {
    AnomalySpec a;
    a.name = ident("anomaly name");
    expect_punct("{");
    bool has_min = false, has_max = false;
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("path")) a.path = path();
      else if (accept_kw("min")) {
        a.min = number();
        has_min = true;
      } else if (accept_kw("max")) {
        a.max = number();
        has_max = true;
      } else fail(t, "'path', 'min', 'max' or '}'");
    }
    if (a.path.empty() || !has_min || !has_max) fail(previous(), "anomaly with path, min and max");
    return a;
  }

  const Token& previous() const { return toks_[i_ > 0 ? i_ - 1 : 0]; }

  ElaborationPlan elaborate() {
    ElaborationPlan p;
    p.name = ident("plan name");
    expect_punct("{");
    while (!accept_punct("}")) {
      const Token& t = peek();
      if (accept_kw("source")) p.source_cloud = ident("source cloud");
      else if (accept_kw("target")) p.target_cloud = ident("target cloud");
      else if (accept_kw("apply")) {
        std::string ks = ident("source KS");
        p.pairs.emplace_back(std::move(ks), ident("function name"));
      } else fail(t, "'source', 'target', 'apply' or '}'");
    }
    return p;
  }

  UseDecl use(const Token& kw) {
    UseDecl u;
    u.path = string_lit("quoted file path");
    if (opts_.include_dir.empty()) return u;
    std::filesystem::path file = opts_.include_dir / u.path;
    std::error_code ec;
    auto canon = std::filesystem::weakly_canonical(file, ec);
    if (ec) canon = file;
    if (stack_->count(canon)) {
      throw Failure{Diagnostic{ErrorCode::IncludeCycle, kw.pos, opts_.source_name,
                               "'" + u.path + "' is already being included"}};
    }
    // Repeated includes outside a cycle are loaded once.
    if (!seen_->insert(canon).second) return u;
    std::ifstream in(file);
    if (!in) {
      throw Failure{Diagnostic{ErrorCode::IoError, kw.pos, opts_.source_name, "cannot read '" + file.string() + "'"}};
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    ParseOptions inner = opts_;
    inner.source_name = file.string();
    inner.include_dir = file.parent_path();
    stack_->insert(canon);
    Lexer lex(text, inner.source_name);
    Parser sub(lex.run(), inner, stack_, seen_);
    u.body = sub.document().decls;
    stack_->erase(canon);
    return u;
  }

  std::vector<Token> toks_;
  const ParseOptions& opts_;
  std::set<std::filesystem::path>* stack_;
  std::set<std::filesystem::path>* seen_;
  std::size_t i_ = 0;
};

ParseResult parse_with_stack(std::string_view text, const ParseOptions& options,
                             std::set<std::filesystem::path> stack) {
  ParseResult result;
  std::set<std::filesystem::path> seen = stack;
  try {
    Lexer lex(text, options.source_name);
    Parser parser(lex.run(), options, &stack, &seen);
    result.document = parser.document();
  } catch (const Failure& f) {
    result.diagnostics.push_back(f.diag);
    return result;
  }
  if (options.check_references) result.diagnostics = check_references(result.document, options.source_name);
  return result;
}

}  // namespace

std::string Diagnostic::str() const {
  return source + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
         std::string(to_string(code)) + ": " + message;
}

ParseResult parse(std::string_view text, const ParseOptions& options) { return parse_with_stack(text, options, {}); }

ParseResult parse_file(const std::filesystem::path& path, bool check) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back(Diagnostic{ErrorCode::IoError, {}, path.string(), "cannot read file"});
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  ParseOptions opts;
  opts.source_name = path.string();
  opts.include_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  opts.check_references = check;
  std::error_code ec;
  auto canon = std::filesystem::weakly_canonical(path, ec);
  return parse_with_stack(buf.str(), opts, {ec ? path : canon});
}

namespace {
[[noreturn]] void raise(const Diagnostic& d) {
  throw Error(d.code, d.source + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " + d.message);
}
}  // namespace

Document parse_or_throw(std::string_view text, const ParseOptions& options) {
  auto r = parse(text, options);
  if (!r.ok()) raise(r.diagnostics.front());
  return std::move(r.document);
}

Document parse_file_or_throw(const std::filesystem::path& path) {
  auto r = parse_file(path);
  if (!r.ok()) raise(r.diagnostics.front());
  return std::move(r.document);
}

}  // namespace keraia::ksynth
