#include "keraia/eval.hpp"

#include <algorithm>
#include <cmath>

#include "keraia/drel.hpp"
#include "keraia/error.hpp"
#include "keraia/kline.hpp"

namespace keraia {

namespace {

[[noreturn]] void mismatch(const Expr& e, const std::string& what) {
  throw Error(ErrorCode::TypeMismatch, what + " at offset " + std::to_string(e.offset));
}

double as_number(const SlotValue& v, const Expr& e, std::string_view role) {
  if (!v.is_number()) mismatch(e, std::string(role) + " expects a number, got " + std::string(to_string(v.kind())));
  return v.number();
}

bool as_bool(const SlotValue& v, const Expr& e) {
  if (!v.is_bool()) mismatch(e, "expected a boolean, got " + std::string(to_string(v.kind())));
  return v.boolean();
}

std::vector<double> coordinates(const SlotValue& v) {
  std::vector<double> out;
  if (v.is_list()) {
    for (const auto& x : v.list()) {
      if (!x.is_number()) throw Error(ErrorCode::TypeMismatch, "distance() coordinates must be numbers");
      out.push_back(x.number());
    }
  } else if (v.is_map()) {
    for (const auto& e : v.entries()) {
      if (!e.value.is_number()) throw Error(ErrorCode::TypeMismatch, "distance() coordinates must be numbers");
      out.push_back(e.value.number());
    }
  } else {
    throw Error(ErrorCode::TypeMismatch, "distance() expects coordinate lists");
  }
  return out;
}

std::size_t arity_check(const std::vector<SlotValue>& args, std::size_t n, const char* name) {
  if (args.size() != n) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + "() takes " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()));
  }
  return n;
}

FunctionRegistry make_builtins() {
  FunctionRegistry r;
  r.add("distance", [](const std::vector<SlotValue>& a, const EvalContext&) {
    arity_check(a, 2, "distance");
    auto p = coordinates(a[0]);
    auto q = coordinates(a[1]);
    if (p.size() != q.size()) throw Error(ErrorCode::TypeMismatch, "distance() dimension mismatch");
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
    return SlotValue(std::sqrt(s));
  });
  r.add("elapsed_since", [](const std::vector<SlotValue>& a, const EvalContext& ctx) {
    arity_check(a, 1, "elapsed_since");
    if (!a[0].is_number()) throw Error(ErrorCode::TypeMismatch, "elapsed_since() expects a tick");
    return SlotValue(static_cast<double>(ctx.clock) - a[0].number());
  });
  r.add("abs", [](const std::vector<SlotValue>& a, const EvalContext&) {
    arity_check(a, 1, "abs");
    if (!a[0].is_number()) throw Error(ErrorCode::TypeMismatch, "abs() expects a number");
    return SlotValue(std::fabs(a[0].number()));
  });
  auto extremum = [](bool want_min) {
    return [want_min](const std::vector<SlotValue>& a, const EvalContext&) {
      if (a.empty()) throw Error(ErrorCode::InvalidArgument, "min/max need at least one argument");
      double best = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw Error(ErrorCode::TypeMismatch, "min/max expect numbers");
        double v = a[i].number();
        if (i == 0 || (want_min ? v < best : v > best)) best = v;
      }
      return SlotValue(best);
    };
  };
  r.add("min", extremum(true));
  r.add("max", extremum(false));
  r.add("len", [](const std::vector<SlotValue>& a, const EvalContext&) {
    arity_check(a, 1, "len");
    if (a[0].is_list()) return SlotValue(static_cast<double>(a[0].list().size()));
    if (a[0].is_map()) return SlotValue(static_cast<double>(a[0].entries().size()));
    if (a[0].is_text()) return SlotValue(static_cast<double>(a[0].text().size()));
    throw Error(ErrorCode::TypeMismatch, "len() expects a list, map or text");
  });
  r.add("contains", [](const std::vector<SlotValue>& a, const EvalContext&) {
    arity_check(a, 2, "contains");
    if (!a[0].is_list()) throw Error(ErrorCode::TypeMismatch, "contains() expects a list");
    for (const auto& x : a[0].list()) {
      if (x.kind() == a[1].kind() || (x.symbol() && a[1].symbol())) {
        if (values_equal(x, a[1])) return SlotValue(true);
      }
    }
    return SlotValue(false);
  });
  return r;
}

struct Evaluator {
  const EvalContext& ctx;

  const KnowledgeBase& kb() const { return *ctx.kb; }

  std::optional<SlotValue> try_read(const std::string& ks, const SlotPath& path) const {
    return read_slot(ctx, ks, path);
  }

  SlotValue read(const std::string& ks, const SlotPath& path, const Expr& e) const {
    if (!kb().find_ks(ks)) throw Error(ErrorCode::UnknownKS, ks);
    if (auto v = try_read(ks, path)) return std::move(*v);
    throw Error(ErrorCode::UnknownPath, ks + "/" + join_path(path) + " (offset " + std::to_string(e.offset) + ")");
  }

  // Resolves the subject of a path-valued expression without throwing on
  // absent slots. nullopt: the path does not resolve.
  std::optional<SlotValue> try_path(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Var: {
        const SlotValue* v = variable(e);
        if (e.path.empty()) return *v;
        return member(*v, e.path);
      }
      case Expr::Kind::KLine: {
        try {
          KLinePath p{e.path};
          SlotAddress addr = locate(kb(), p);
          return try_read(addr.ks, addr.path);
        } catch (const Error& err) {
          if (err.code() == ErrorCode::UnknownSegment || err.code() == ErrorCode::AmbiguousSegment) {
            return std::nullopt;
          }
          throw;
        }
      }
      case Expr::Kind::Ref: return try_ref(e);
      default: return evaluate_node(e);
    }
  }

  const SlotValue* variable(const Expr& e) const {
    if (ctx.variables) {
      auto it = ctx.variables->find(e.name);
      if (it != ctx.variables->end()) return &it->second;
    }
    throw Error(ErrorCode::UnboundVariable, "?" + e.name + " at offset " + std::to_string(e.offset));
  }

  std::optional<SlotValue> member(const SlotValue& base, const SlotPath& path) const {
    if (auto ks = as_appellation(kb(), base)) return try_read(*ks, path);
    if (base.is_map()) {
      if (const SlotValue* v = lookup(base, path)) return *v;
    }
    return std::nullopt;
  }

  std::optional<SlotValue> try_ref(const Expr& e) const {
    auto role = ctx.roles.find(e.name);
    if (role != ctx.roles.end()) {
      if (e.path.empty()) return SlotValue::ref(role->second);
      return try_read(role->second, e.path);
    }
    auto self = ctx.roles.find("self");
    SlotPath own{e.name};
    own.insert(own.end(), e.path.begin(), e.path.end());
    if (e.path.empty()) {
      if (self != ctx.roles.end()) {
        if (auto v = try_read(self->second, own)) return v;
      }
      if (kb().find_ks(e.name)) return SlotValue::ref(e.name);
      return std::nullopt;
    }
    if (kb().find_ks(e.name)) return try_read(e.name, e.path);
    if (self != ctx.roles.end()) return try_read(self->second, own);
    return std::nullopt;
  }

  SlotValue path_value(const Expr& e) const {
    if (auto v = try_path(e)) return std::move(*v);
    std::string text = e.kind == Expr::Kind::Var ? "?" + e.name : e.kind == Expr::Kind::KLine ? "@" : e.name;
    if (e.kind == Expr::Kind::KLine) text += join_path(e.path);
    else if (!e.path.empty()) text += "." + join_path(e.path, '.');
    throw Error(ErrorCode::UnknownPath, "'" + text + "' at offset " + std::to_string(e.offset));
  }

  SlotValue call(const Expr& e) const {
    if (e.name == "exists") {
      if (e.children.size() != 1) throw Error(ErrorCode::InvalidArgument, "exists() takes 1 argument");
      return SlotValue(try_path(*e.children[0]).has_value());
    }
    const Function* fn = ctx.functions ? ctx.functions->find(e.name) : nullptr;
    if (!fn) fn = FunctionRegistry::builtins().find(e.name);
    if (!fn) throw Error(ErrorCode::UnknownPath, "unknown function '" + e.name + "' at offset " + std::to_string(e.offset));
    std::vector<SlotValue> args;
    args.reserve(e.children.size());
    for (const auto& c : e.children) args.push_back(evaluate_node(*c));
    return (*fn)(args, ctx);
  }

  SlotValue compare(const Expr& e, const SlotValue& a, const SlotValue& b) const {
    using Op = Expr::Op;
    if (e.op == Op::Eq || e.op == Op::Ne) {
      bool comparable = a.kind() == b.kind() || (a.symbol() && b.symbol());
      if (!comparable) {
        mismatch(e, "cannot compare " + std::string(to_string(a.kind())) + " with " + std::string(to_string(b.kind())));
      }
      bool eq = values_equal(a, b);
      return SlotValue(e.op == Op::Eq ? eq : !eq);
    }
    int c = 0;
    if (a.is_number() && b.is_number()) {
      c = a.number() < b.number() ? -1 : a.number() > b.number() ? 1 : 0;
    } else if (a.symbol() && b.symbol()) {
      c = a.symbol()->compare(*b.symbol());
      c = c < 0 ? -1 : c > 0 ? 1 : 0;
    } else {
      mismatch(e, "cannot order " + std::string(to_string(a.kind())) + " and " + std::string(to_string(b.kind())));
    }
    switch (e.op) {
      case Op::Lt: return SlotValue(c < 0);
      case Op::Le: return SlotValue(c <= 0);
      case Op::Gt: return SlotValue(c > 0);
      default: return SlotValue(c >= 0);
    }
  }

  SlotValue binary(const Expr& e) const {
    using Op = Expr::Op;
    if (e.op == Op::And || e.op == Op::Or) {
      bool lhs = as_bool(evaluate_node(*e.children[0]), *e.children[0]);
      if (e.op == Op::And && !lhs) return SlotValue(false);
      if (e.op == Op::Or && lhs) return SlotValue(true);
      return SlotValue(as_bool(evaluate_node(*e.children[1]), *e.children[1]));
    }
    SlotValue a = evaluate_node(*e.children[0]);
    SlotValue b = evaluate_node(*e.children[1]);
    switch (e.op) {
      case Op::Eq:
      case Op::Ne:
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge: return compare(e, a, b);
      default: break;
    }
    if (e.op == Op::Add && a.is_text() && b.is_text()) return SlotValue(a.text() + b.text());
    double x = as_number(a, e, to_string(e.op));
    double y = as_number(b, e, to_string(e.op));
    std::string unit = a.unit().empty() ? b.unit() : a.unit();
    switch (e.op) {
      case Op::Add: return SlotValue(x + y, unit);
      case Op::Sub: return SlotValue(x - y, unit);
      case Op::Mul: return SlotValue(x * y);
      default:
        if (y == 0.0) throw Error(ErrorCode::TypeMismatch, "division by zero at offset " + std::to_string(e.offset));
        return SlotValue(x / y);
    }
  }

  SlotValue evaluate_node(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Literal: return e.literal;
      case Expr::Kind::Ref:
      case Expr::Kind::Var:
      case Expr::Kind::KLine: return path_value(e);
      case Expr::Kind::Not: return SlotValue(!as_bool(evaluate_node(*e.children[0]), *e.children[0]));
      case Expr::Kind::Neg: {
        SlotValue v = evaluate_node(*e.children[0]);
        return SlotValue(-as_number(v, e, "negation"), v.unit());
      }
      case Expr::Kind::Binary: return binary(e);
      case Expr::Kind::Call: return call(e);
      case Expr::Kind::List: {
        SlotList items;
        for (const auto& c : e.children) items.push_back(evaluate_node(*c));
        return SlotValue(std::move(items));
      }
    }
    return SlotValue();
  }
};

}  // namespace

const Function* FunctionRegistry::find(std::string_view name) const {
  auto it = fns_.find(name);
  return it == fns_.end() ? nullptr : &it->second;
}

const FunctionRegistry& FunctionRegistry::builtins() {
  static const FunctionRegistry registry = make_builtins();
  return registry;
}

std::optional<std::string> as_appellation(const KnowledgeBase& kb, const SlotValue& value) {
  if (value.is_ref()) return value.ref_name();
  if (value.is_text() && kb.find_ks(value.text())) return value.text();
  return std::nullopt;
}

std::optional<SlotValue> read_slot(const EvalContext& ctx, const std::string& ks, const SlotPath& path) {
  const KnowledgeBase& kb = *ctx.kb;
  if (!kb.find_ks(ks)) return std::nullopt;
  std::optional<Resolved> r;
  if (ctx.inherit) {
    r = try_resolve_attribute(kb, ks, path, ctx.clock, ResolveOptions{false, ctx.dimension});
  } else {
    if (ctx.dimension) {
      if (const SlotValue* v = assumed_value(kb, *ctx.dimension, SlotAddress{ks, path})) {
        r = Resolved{*v, {Provenance::Kind::Assumed, {}, ks}};
      }
    }
    if (!r) {
      if (const SlotValue* v = kb.slot(ks, path)) r = Resolved{*v, {Provenance::Kind::Local, {}, ks}};
    }
  }
  if (!r) return std::nullopt;
  if (ctx.reads) ctx.reads->insert(r->provenance.provider + "/" + join_path(path));
  return std::move(r->value);
}

SlotValue evaluate(const Expr& expr, const EvalContext& ctx) {
  if (!ctx.kb) throw Error(ErrorCode::InvalidArgument, "evaluation context has no knowledge base");
  return Evaluator{ctx}.evaluate_node(expr);
}

bool eval_condition(const Expr& expr, const EvalContext& ctx) {
  SlotValue v = evaluate(expr, ctx);
  if (!v.is_bool()) {
    throw Error(ErrorCode::TypeMismatch, "condition yields " + std::string(to_string(v.kind())) + ", not boolean");
  }
  return v.boolean();
}

bool values_equal(const SlotValue& a, const SlotValue& b) {
  if (auto sa = a.symbol()) {
    auto sb = b.symbol();
    return sb && *sa == *sb;
  }
  if (a.is_number() && b.is_number()) return a.number() == b.number();
  if (a.kind() != b.kind()) return false;
  if (a.is_list()) {
    const auto& x = a.list();
    const auto& y = b.list();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!values_equal(x[i], y[i])) return false;
    }
    return true;
  }
  return a == b;
}

}  // namespace keraia
