#include <algorithm>
#include <sstream>

#include "keraia/ksynth.hpp"

namespace keraia::ksynth {

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string dotted(std::string path) {
  std::replace(path.begin(), path.end(), '/', '.');
  return path;
}

class Writer {
 public:
  std::string str() const { return out_.str(); }

  void document(const Document& doc) {
    bool first = true;
    for (const auto& d : doc.decls) {
      if (!first) out_ << '\n';
      first = false;
      decl(d);
    }
  }

 private:
  void line(const std::string& text) { out_ << std::string(depth_ * 2, ' ') << text << '\n'; }
  void open(const std::string& head) {
    line(head + " {");
    ++depth_;
  }
  void close() {
    --depth_;
    line("}");
  }

  void decl(const Decl& d) {
    std::visit([this](const auto& node) { write(node); }, d.node);
  }

  void write(const CloudDecl& c) {
    open("cloud " + c.name);
    for (const auto& t : c.tags) line("tag " + t);
    for (const auto& d : c.body) decl(d);
    close();
  }

  void slots(const SlotValue& map) {
    for (const auto& e : map.entries()) {
      if (e.value.is_map()) {
        open("slot " + e.name);
        slots(e.value);
        close();
      } else {
        line("slot " + e.name + " = " + serialize_value(e.value));
      }
    }
  }

  void write(const KsDecl& k) {
    open("ks " + k.name);
    slots(k.slots);
    if (k.explains) line("explains " + quote(*k.explains));
    for (const auto& r : k.responders) {
      std::string params;
      for (const auto& p : r.params) {
        if (!params.empty()) params += ", ";
        params += p.name + " = " + serialize_value(p.value);
      }
      line("responder " + r.name + " = " + r.operation + "(" + params + ")");
    }
    for (const auto& a : k.attractors) {
      std::string text = "attractor " + quote(a.condition.text) + " -> " + a.responder;
      if (!a.watch.empty()) text += " watch " + a.watch;
      line(text);
    }
    close();
  }

  void write(const DRel& d) {
    open("drel " + d.appellation);
    line("source " + d.source_ks);
    line("target " + d.target_ks);
    std::string share;
    for (const auto& s : d.shared_attributes) share += (share.empty() ? "" : ", ") + s;
    line("share " + share);
    if (!d.condition.empty()) line("when " + quote(d.condition.text));
    if (d.priority != 0) line("priority " + std::to_string(d.priority));
    close();
  }

  std::string branch(const Branch& b) {
    std::string text = "branch " + b.label;
    if (!b.when.empty()) text += " when " + quote(b.when.text);
    switch (b.target) {
      case Branch::Target::Lot: return text + " -> lot " + b.lot;
      case Branch::Target::Step: return text + " -> step " + std::to_string(b.step + 1);
      case Branch::Target::Halt: return text + " -> halt";
    }
    return text;
  }

  void write(const LineOfThought& l) {
    open("lot " + l.name);
    for (const auto& s : l.steps) {
      std::string head = "step " + s.target;
      if (s.action == Step::Action::Responder) head += " responder " + s.name;
      if (s.action == Step::Action::RuleSet) head += " ruleset " + s.name;
      if (!s.fork) {
        line(head);
        continue;
      }
      open(head);
      std::string fork = "fork";
      if (s.fork->kind == Fork::Kind::RuleSet) fork += " ruleset " + s.fork->rule_set + " fact " + s.fork->fact;
      open(fork);
      for (const auto& b : s.fork->branches) line(branch(b));
      close();
      close();
    }
    for (const auto& j : l.junctures) line("juncture " + j);
    close();
  }

  void write(const Dimension& d) {
    open("dimension " + d.name);
    if (!d.description.empty()) line("description " + quote(d.description));
    if (d.parent_juncture) line("juncture " + *d.parent_juncture);
    for (const auto& a : d.assumptions) line("assume " + a.path + " = " + serialize_value(a.value));
    close();
  }

  void write(const Juncture& j) {
    open("juncture " + j.name);
    for (const auto& d : j.member_dimensions) line("dimension " + d);
    for (const auto& l : j.linked_lots) line("lot " + l);
    close();
  }

  static std::string term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Variable: return "?" + t.variable;
      case Term::Kind::Computed: return "expr " + quote(t.computed.text);
      case Term::Kind::Constant: return serialize_value(t.constant);
    }
    return {};
  }

  static std::string terms(const std::vector<Term>& ts) {
    std::string out = "(";
    for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? ", " : "") + term(ts[i]);
    return out + ")";
  }

  static std::string pattern(const Pattern& p) {
    std::string text = p.negated ? "absent " : "";
    switch (p.kind) {
      case Pattern::Kind::Object:
        text += "find ?" + p.variable;
        if (!p.type.empty()) text += " type " + p.type;
        if (!p.where.empty()) text += " where " + quote(p.where.text);
        break;
      case Pattern::Kind::Fact: text += "fact " + p.relation + terms(p.args); break;
      case Pattern::Kind::Test: text += "test " + quote(p.test.text); break;
      case Pattern::Kind::Aggregate:
        text += std::string(p.minimize ? "minimize" : "maximize") + " ?" + p.variable + "." + dotted(p.path) +
                " as " + p.alias;
        break;
    }
    return text;
  }

  static std::string action(const Action& a) {
    switch (a.kind) {
      case Action::Kind::Assert: return "assert " + a.relation + terms(a.args);
      case Action::Kind::Set: return "set ?" + a.variable + "." + dotted(a.path) + " = " + term(a.value);
      case Action::Kind::Command: {
        std::string args;
        for (const auto& [k, v] : a.named_args) args += (args.empty() ? "" : ", ") + k + " = " + term(v);
        return "command " + a.name + "(" + args + ")";
      }
      case Action::Kind::Invoke: return "invoke ?" + a.variable + " " + a.name;
      case Action::Kind::Halt: return "halt";
    }
    return {};
  }

  void write(const Rule& r) {
    open("rule " + r.name);
    if (!r.rule_set.empty()) line("ruleset " + r.rule_set);
    if (r.salience != 0) line("salience " + std::to_string(r.salience));
    for (const auto& p : r.params) line("param ?" + p);
    for (const auto& p : r.patterns) line(pattern(p));
    open("then");
    for (const auto& a : r.actions) line(action(a));
    close();
    close();
  }

  void write(const GppbTemplate& g) {
    open("template " + g.name);
    for (const auto& p : g.patterns) line(pattern(p));
    for (const auto& [k, v] : g.instantiation) line("bind " + k + " = " + serialize_value(v));
    for (const auto& o : g.outputs) {
      open("output " + o.cloud);
      for (const auto& [k, v] : o.slots) line("slot " + k + " = " + term(v));
      close();
    }
    close();
  }

  void write(const AnomalySpec& a) {
    open("anomaly " + a.name);
    line("path " + a.path);
    line("min " + format_number(a.min));
    line("max " + format_number(a.max));
    close();
  }

  void write(const ElaborationPlan& p) {
    open("elaborate " + p.name);
    line("source " + p.source_cloud);
    line("target " + p.target_cloud);
    for (const auto& [ks, fn] : p.pairs) line("apply " + ks + " " + fn);
    close();
  }

  void write(const UseDecl& u) { line("use " + quote(u.path)); }

  std::ostringstream out_;
  std::size_t depth_ = 0;
};

}  // namespace

std::string serialize_value(const SlotValue& v) {
  switch (v.kind()) {
    case SlotValue::Kind::Text: return quote(v.text());
    case SlotValue::Kind::Number: {
      std::string n = format_number(v.number());
      return v.unit().empty() ? n : n + " " + quote(v.unit());
    }
    case SlotValue::Kind::Boolean: return v.boolean() ? "true" : "false";
    case SlotValue::Kind::Reference: return v.ref_name();
    case SlotValue::Kind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.list().size(); ++i) out += (i ? ", " : "") + serialize_value(v.list()[i]);
      return out + "]";
    }
    case SlotValue::Kind::Map: {
      if (v.entries().empty()) return "{}";
      std::string out = "{";
      for (std::size_t i = 0; i < v.entries().size(); ++i) {
        out += (i ? ", " : "") + v.entries()[i].name + " = " + serialize_value(v.entries()[i].value);
      }
      return out + "}";
    }
  }
  return {};
}

std::string serialize(const Document& doc) {
  Writer w;
  w.document(doc);
  return w.str();
}

}  // namespace keraia::ksynth
