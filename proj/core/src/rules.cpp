#include "keraia/rules.hpp"

#include <algorithm>
#include <map>

#include "keraia/error.hpp"
#include "keraia/kline.hpp"

namespace keraia {

namespace {

struct Row {
  Bindings bindings;
  std::set<std::string> reads;
};

SlotValue term_value(const Term& t, const EvalContext& ctx) {
  switch (t.kind) {
    case Term::Kind::Constant: return t.constant;
    case Term::Kind::Variable: {
      auto it = ctx.variables ? ctx.variables->find(t.variable) : Bindings::const_iterator{};
      if (!ctx.variables || it == ctx.variables->end()) throw Error(ErrorCode::UnboundVariable, "?" + t.variable);
      return it->second;
    }
    case Term::Kind::Computed: return evaluate(*t.computed.ast, ctx);
  }
  return SlotValue();
}

// Variables in the order patterns introduce them (globals first).
std::vector<std::string> introduction_order(const std::vector<Pattern>& patterns, const Bindings& globals) {
  std::vector<std::string> order;
  auto add = [&](const std::string& v) {
    if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
  };
  for (const auto& [k, v] : globals) add(k);
  for (const auto& p : patterns) {
    if (p.negated) continue;
    if (p.kind == Pattern::Kind::Object) add(p.variable);
    if (p.kind == Pattern::Kind::Fact) {
      for (const auto& a : p.args) {
        if (a.kind == Term::Kind::Variable) add(a.variable);
      }
    }
    if (p.kind == Pattern::Kind::Aggregate) add(p.alias);
  }
  return order;
}

class Matcher {
 public:
  Matcher(const KnowledgeBase& kb, const WorkingMemory& wm, const MatchOptions& opts) : kb_(kb), wm_(wm), opts_(opts) {}

  std::vector<Row> run(const std::vector<Pattern>& patterns) {
    std::vector<Row> rows{Row{opts_.globals, {}}};
    auto order = introduction_order(patterns, opts_.globals);
    for (const auto& p : patterns) {
      std::vector<Row> next;
      switch (p.kind) {
        case Pattern::Kind::Object: next = object(p, rows); break;
        case Pattern::Kind::Fact: next = fact(p, rows); break;
        case Pattern::Kind::Test: next = test(p, rows); break;
        case Pattern::Kind::Aggregate: next = aggregate(p, rows, order); break;
      }
      rows = std::move(next);
      if (rows.empty()) break;
    }
    return rows;
  }

 private:
  EvalContext context(const Row& row) const {
    EvalContext ctx;
    ctx.kb = &kb_;
    ctx.clock = opts_.clock;
    ctx.variables = &row.bindings;
    ctx.dimension = opts_.dimension;
    ctx.functions = opts_.functions;
    ctx.reads = opts_.track_reads ? const_cast<std::set<std::string>*>(&row.reads) : nullptr;
    return ctx;
  }

  bool object_holds(const Pattern& p, Row& row, const std::string& candidate) const {
    if (!p.type.empty()) {
      auto it = wm_.objects().find(candidate);
      if (it == wm_.objects().end() || it->second.type != p.type) return false;
    }
    if (p.where.empty()) return true;
    EvalContext ctx = context(row);
    ctx.roles["self"] = candidate;
    ctx.reads = opts_.track_reads ? &row.reads : nullptr;
    return eval_condition(p.where, ctx);
  }

  std::vector<Row> object(const Pattern& p, std::vector<Row>& rows) const {
    std::vector<Row> out;
    for (auto& row : rows) {
      auto bound = row.bindings.find(p.variable);
      if (bound != row.bindings.end()) {
        auto name = as_appellation(kb_, bound->second);
        bool ok = name && kb_.find_ks(*name) && object_holds(p, row, *name);
        if (ok != p.negated) out.push_back(std::move(row));
        continue;
      }
      const auto& pool = wm_.objects_of_type(p.type);
      if (p.negated) {
        bool any = false;
        for (const auto& c : pool) {
          Row probe{row.bindings, {}};
          probe.bindings[p.variable] = SlotValue::ref(c);
          if (object_holds(p, probe, c)) {
            any = true;
            break;
          }
        }
        if (!any) out.push_back(std::move(row));
        continue;
      }
      for (const auto& c : pool) {
        Row ext = row;
        ext.bindings[p.variable] = SlotValue::ref(c);
        if (object_holds(p, ext, c)) out.push_back(std::move(ext));
      }
    }
    return out;
  }

  std::vector<Row> fact(const Pattern& p, std::vector<Row>& rows) const {
    std::vector<Row> out;
    for (auto& row : rows) {
      // Resolve what is known; open variables are unified against facts.
      std::vector<std::optional<SlotValue>> known(p.args.size());
      bool ground = true;
      for (std::size_t i = 0; i < p.args.size(); ++i) {
        const Term& t = p.args[i];
        if (t.kind == Term::Kind::Variable) {
          auto it = row.bindings.find(t.variable);
          if (it != row.bindings.end()) known[i] = it->second;
        } else {
          known[i] = term_value(t, context(row));
        }
        if (!known[i]) ground = false;
      }
      if (ground) {
        std::vector<SlotValue> args;
        for (auto& k : known) args.push_back(*k);
        if (wm_.contains(p.relation, args) != p.negated) out.push_back(std::move(row));
        continue;
      }
      const auto& candidates = known.empty() || !known[0] ? wm_.by_relation(p.relation)
                                                          : wm_.by_first(p.relation, *known[0]);
      bool any = false;
      for (std::size_t idx : candidates) {
        if (!wm_.live(idx)) continue;
        const Fact& f = wm_.fact_at(idx);
        if (f.args.size() != p.args.size()) continue;
        Bindings extra;
        bool ok = true;
        for (std::size_t i = 0; i < p.args.size() && ok; ++i) {
          const std::string key = fact_term_key(f.args[i]);
          if (known[i]) {
            ok = fact_term_key(*known[i]) == key;
            continue;
          }
          const std::string& v = p.args[i].variable;
          auto prev = extra.find(v);
          if (prev != extra.end()) ok = fact_term_key(prev->second) == key;
          else extra[v] = f.args[i];
        }
        if (!ok) continue;
        any = true;
        if (p.negated) break;
        Row ext = row;
        for (auto& [k, v] : extra) ext.bindings[k] = v;
        out.push_back(std::move(ext));
      }
      if (p.negated && !any) out.push_back(std::move(row));
    }
    return out;
  }

  std::vector<Row> test(const Pattern& p, std::vector<Row>& rows) const {
    std::vector<Row> out;
    for (auto& row : rows) {
      EvalContext ctx = context(row);
      ctx.reads = opts_.track_reads ? &row.reads : nullptr;
      if (eval_condition(p.test, ctx) != p.negated) out.push_back(std::move(row));
    }
    return out;
  }

  std::vector<Row> aggregate(const Pattern& p, std::vector<Row>& rows, const std::vector<std::string>& order) const {
    // Group by every variable introduced before the aggregated one.
    std::vector<std::string> keys;
    for (const auto& v : order) {
      if (v == p.variable) break;
      keys.push_back(v);
    }
    SlotPath path = split_path(p.path);
    struct Group {
      std::vector<std::size_t> members;
      double best = 0;
      std::string winner;
    };
    std::vector<std::string> group_order;
    std::map<std::string, Group> groups;
    std::vector<std::string> names(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Row& row = rows[i];
      auto it = row.bindings.find(p.variable);
      if (it == row.bindings.end()) throw Error(ErrorCode::UnboundVariable, "?" + p.variable + " in aggregate");
      auto name = as_appellation(kb_, it->second);
      if (!name) throw Error(ErrorCode::TypeMismatch, "?" + p.variable + " does not denote a knowledge source");
      EvalContext ctx = context(row);
      ctx.reads = opts_.track_reads ? &row.reads : nullptr;
      auto v = read_slot(ctx, *name, path);
      if (!v) throw Error(ErrorCode::UnknownPath, *name + "/" + p.path);
      if (!v->is_number()) throw Error(ErrorCode::NonNumericValue, *name + "/" + p.path + " = " + render(*v));
      std::string gk;
      for (const auto& k : keys) {
        auto b = row.bindings.find(k);
        gk += k + "=" + (b == row.bindings.end() ? std::string("-") : fact_term_key(b->second)) + ";";
      }
      auto [g, fresh] = groups.try_emplace(gk);
      if (fresh) group_order.push_back(gk);
      Group& group = g->second;
      double x = v->number();
      bool better = group.members.empty() || (p.minimize ? x < group.best : x > group.best) ||
                    (x == group.best && *name < group.winner);
      if (better) {
        group.best = x;
        group.winner = *name;
      }
      group.members.push_back(i);
      names[i] = *name;
    }
    std::vector<Row> out;
    for (const auto& gk : group_order) {
      const Group& g = groups[gk];
      for (std::size_t i : g.members) {
        if (names[i] != g.winner) continue;
        Row r = std::move(rows[i]);
        r.bindings[p.alias] = SlotValue(g.best);
        out.push_back(std::move(r));
      }
    }
    return out;
  }

  const KnowledgeBase& kb_;
  const WorkingMemory& wm_;
  const MatchOptions& opts_;
};

std::string firing_key(const std::string& rule, const Bindings& b) {
  std::string k = rule + "|";
  for (const auto& [name, v] : b) k += name + "=" + fact_term_key(v) + ";";
  return k;
}

}  // namespace

std::string bindings_to_string(const Bindings& bindings) {
  std::string out;
  for (const auto& [k, v] : bindings) {
    if (!out.empty()) out += ", ";
    out += "?" + k + "=" + render(v);
  }
  return out;
}

std::string Firing::bindings_str() const { return bindings_to_string(bindings); }

std::string Command::str() const {
  std::string s = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].name + "=" + render(args[i].value);
  return s + ")";
}

std::vector<Firing> match_patterns(const KnowledgeBase& kb, const WorkingMemory& wm,
                                   const std::vector<Pattern>& patterns, const MatchOptions& options) {
  Matcher m(kb, wm, options);
  std::vector<Firing> out;
  for (auto& row : m.run(patterns)) out.push_back(Firing{{}, std::move(row.bindings), std::move(row.reads)});
  return out;
}

ChainResult forward_chain(KnowledgeBase& kb, const std::vector<Rule>& rules, WorkingMemory& wm,
                          const ChainOptions& options) {
  if (options.max_cycles < 1) throw Error(ErrorCode::InvalidArgument, "max_cycles must be >= 1");
  for (const auto& r : rules) {
    for (const auto& p : r.params) {
      if (!options.globals.count(p)) throw Error(ErrorCode::UnboundVariable, "?" + p + " (parameter of " + r.name + ")");
    }
  }
  ChainResult result;
  std::set<std::string> refracted;

  auto agenda_top = [&](Firing& best, std::size_t& best_rule) {
    bool found = false;
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      const Rule& r = rules[ri];
      if (found) {
        const Rule& b = rules[best_rule];
        // Later rules only win on strictly higher salience or specificity.
        if (r.salience < b.salience || (r.salience == b.salience && r.specificity() <= b.specificity())) continue;
      }
      for (auto& f : match_patterns(kb, wm, r.patterns, options)) {
        if (refracted.count(firing_key(r.name, f.bindings))) continue;
        f.rule = r.name;
        best = std::move(f);
        best_rule = ri;
        found = true;
        break;
      }
    }
    return found;
  };

  for (;;) {
    Firing act;
    std::size_t ri = 0;
    if (!agenda_top(act, ri)) break;
    if (result.fired.size() >= options.max_cycles) {
      result.cycle_limit_reached = true;
      break;
    }
    const Rule& rule = rules[ri];
    refracted.insert(firing_key(rule.name, act.bindings));
    KnowledgeBase::ActorScope actor(kb, options.actor.empty() ? "rule:" + rule.name : options.actor);
    EvalContext ctx;
    ctx.kb = &kb;
    ctx.clock = options.clock;
    ctx.variables = &act.bindings;
    ctx.dimension = options.dimension;
    ctx.functions = options.functions;
    for (const auto& a : rule.actions) {
      switch (a.kind) {
        case Action::Kind::Assert: {
          Fact f{a.relation, {}, rule.name};
          for (const auto& t : a.args) f.args.push_back(term_value(t, ctx));
          if (wm.assert_fact(f)) result.asserted.push_back(std::move(f));
          break;
        }
        case Action::Kind::Set: {
          auto it = act.bindings.find(a.variable);
          if (it == act.bindings.end()) throw Error(ErrorCode::UnboundVariable, "?" + a.variable);
          auto ks = as_appellation(kb, it->second);
          if (!ks) throw Error(ErrorCode::TypeMismatch, "?" + a.variable + " does not denote a knowledge source");
          kb.set_slot(*ks, split_path(a.path), term_value(a.value, ctx));
          wm.refresh(kb, *ks);
          break;
        }
        case Action::Kind::Command: {
          Command c{a.name, {}, rule.name};
          for (const auto& [k, t] : a.named_args) c.args.push_back(SlotEntry{k, term_value(t, ctx)});
          result.commands.push_back(std::move(c));
          break;
        }
        case Action::Kind::Invoke: {
          auto it = act.bindings.find(a.variable);
          if (it == act.bindings.end()) throw Error(ErrorCode::UnboundVariable, "?" + a.variable);
          auto ks = as_appellation(kb, it->second);
          if (!ks) throw Error(ErrorCode::TypeMismatch, "?" + a.variable + " does not denote a knowledge source");
          if (!options.invoke) throw Error(ErrorCode::UnknownResponder, a.name + " (no responder runner)");
          options.invoke(*ks, a.name);
          wm.refresh(kb, *ks);
          break;
        }
        case Action::Kind::Halt: result.halted = true; break;
      }
    }
    result.fired.push_back(std::move(act));
    if (result.halted) break;
  }
  return result;
}

std::vector<Bindings> match_template(const KnowledgeBase& kb, const GppbTemplate& tpl, const MatchOptions& options) {
  MatchOptions opts = options;
  for (const auto& [k, v] : tpl.instantiation) opts.globals[k] = v;
  WorkingMemory wm;
  wm.sync(kb);
  auto order = introduction_order(tpl.patterns, {});
  std::vector<std::pair<std::vector<std::string>, Bindings>> keyed;
  for (auto& f : match_patterns(kb, wm, tpl.patterns, opts)) {
    std::vector<std::string> key;
    for (const auto& v : order) {
      auto it = f.bindings.find(v);
      key.push_back(it == f.bindings.end() ? std::string() : fact_term_key(it->second));
    }
    keyed.emplace_back(std::move(key), std::move(f.bindings));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Bindings> out;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    out.push_back(std::move(keyed[i].second));
  }
  return out;
}

std::vector<std::string> apply_template(KnowledgeBase& kb, const GppbTemplate& tpl, const Bindings& bindings,
                                        const MatchOptions& options) {
  KnowledgeBase::ActorScope actor(kb, "template:" + tpl.name);
  EvalContext ctx;
  ctx.kb = &kb;
  ctx.clock = options.clock;
  ctx.variables = &bindings;
  ctx.functions = options.functions;
  ctx.dimension = options.dimension;
  TemplateRun run{tpl.name, {}, kb.tick()};
  for (const auto& o : tpl.outputs) {
    if (!kb.find_cloud(o.cloud)) throw Error(ErrorCode::UnknownCloud, o.cloud + " (output of template " + tpl.name + ")");
    std::string name = tpl.name + "." + std::to_string(kb.next_template_counter(tpl.name));
    if (kb.find_ks(name) || kb.find_cloud(name)) {
      throw Error(ErrorCode::AppellationConflict, "generated name '" + name + "' already exists");
    }
    KnowledgeSource ks;
    ks.appellation = name;
    for (const auto& [slot, term] : o.slots) ks.slots.put(slot, term_value(term, ctx));
    ks.explains = "generated by template " + tpl.name + " from " + bindings_to_string(bindings);
    kb.put_ks(std::move(ks), o.cloud);
    run.generated.push_back(name);
  }
  kb.append_template_run(run);
  return run.generated;
}

std::vector<AnomalyEvent> detect_anomalies(const KnowledgeBase& kb, const std::vector<AnomalySpec>& specs, Tick clock,
                                           const Dimension* dimension) {
  std::vector<AnomalyEvent> out;
  for (const auto& s : specs) {
    SlotValue v;
    try {
      v = resolve_kline(kb, KLinePath::parse(s.path), dimension);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnknownSegment || e.code() == ErrorCode::InvalidPath) {
        throw Error(ErrorCode::UnknownPath, s.path + " (anomaly " + s.name + "): " + e.what());
      }
      throw;
    }
    if (!v.is_number()) throw Error(ErrorCode::NonNumericValue, s.path + " = " + render(v));
    if (v.number() < s.min) out.push_back({s.name, s.path, v.number(), "min", s.min, clock});
    if (v.number() > s.max) out.push_back({s.name, s.path, v.number(), "max", s.max, clock});
  }
  return out;
}

}  // namespace keraia
