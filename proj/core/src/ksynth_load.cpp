#include <map>
#include <set>

#include "keraia/ksynth.hpp"

namespace keraia::ksynth {

namespace {

struct Symbols {
  std::map<std::string, const KsDecl*> ks;
  std::set<std::string> clouds, lots, dimensions, junctures, rule_sets, rules, templates, plans, drels, anomalies;
  std::map<std::string, std::size_t> lot_steps;
};

class Checker {
 public:
  explicit Checker(std::string source) : source_(std::move(source)) {}

  std::vector<Diagnostic> run(const Document& doc) {
    collect(doc.decls);
    verify(doc.decls, std::nullopt);
    return std::move(diags_);
  }

 private:
  void report(ErrorCode code, Position pos, std::string msg) {
    diags_.push_back(Diagnostic{code, pos, source_, std::move(msg)});
  }

  void unique(std::set<std::string>& table, const std::string& name, const std::string& kind, Position pos) {
    if (!table.insert(name).second) report(ErrorCode::DuplicateAppellation, pos, kind + " '" + name + "'");
  }

  void collect(const std::vector<Decl>& decls) {
    for (const auto& d : decls) {
      const Position pos = d.pos;
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CloudDecl>) {
              if (sym_.ks.count(n.name)) report(ErrorCode::DuplicateAppellation, pos, "cloud '" + n.name + "'");
              unique(sym_.clouds, n.name, "cloud", pos);
              collect(n.body);
            } else if constexpr (std::is_same_v<T, KsDecl>) {
              if (sym_.clouds.count(n.name) || sym_.ks.count(n.name)) {
                report(ErrorCode::DuplicateAppellation, pos, "knowledge source '" + n.name + "'");
              }
              sym_.ks.emplace(n.name, &n);
            } else if constexpr (std::is_same_v<T, DRel>) {
              unique(sym_.drels, n.appellation, "drel", pos);
            } else if constexpr (std::is_same_v<T, LineOfThought>) {
              unique(sym_.lots, n.name, "LoT", pos);
              sym_.lot_steps[n.name] = n.steps.size();
            } else if constexpr (std::is_same_v<T, Dimension>) {
              unique(sym_.dimensions, n.name, "dimension", pos);
            } else if constexpr (std::is_same_v<T, Juncture>) {
              unique(sym_.junctures, n.name, "juncture", pos);
            } else if constexpr (std::is_same_v<T, Rule>) {
              unique(sym_.rules, n.name, "rule", pos);
              sym_.rule_sets.insert(n.rule_set);
            } else if constexpr (std::is_same_v<T, GppbTemplate>) {
              unique(sym_.templates, n.name, "template", pos);
            } else if constexpr (std::is_same_v<T, AnomalySpec>) {
              unique(sym_.anomalies, n.name, "anomaly", pos);
            } else if constexpr (std::is_same_v<T, ElaborationPlan>) {
              unique(sym_.plans, n.name, "elaboration plan", pos);
            } else if constexpr (std::is_same_v<T, UseDecl>) {
              collect(n.body);
            }
          },
          d.node);
    }
  }

  void need(bool ok, Position pos, const std::string& what) {
    if (!ok) report(ErrorCode::UnresolvedReference, pos, what);
  }

  void verify_lot(const LineOfThought& l, Position pos) {
    if (l.steps.empty()) report(ErrorCode::InvalidArgument, pos, "LoT '" + l.name + "' has no steps");
    for (std::size_t i = 0; i < l.steps.size(); ++i) {
      const Step& s = l.steps[i];
      const std::string where = "in " + l.name + " step " + std::to_string(i + 1);
      auto it = sym_.ks.find(s.target);
      need(it != sym_.ks.end(), pos, "knowledge source '" + s.target + "' " + where);
      if (it != sym_.ks.end() && s.action == Step::Action::Responder) {
        const auto& rs = it->second->responders;
        bool found = std::any_of(rs.begin(), rs.end(), [&](const auto& r) { return r.name == s.name; });
        need(found, pos, "responder '" + s.name + "' on '" + s.target + "' " + where);
      }
      if (s.action == Step::Action::RuleSet) need(sym_.rule_sets.count(s.name) > 0, pos, "rule set '" + s.name + "' " + where);
      if (!s.fork) continue;
      if (s.fork->kind == Fork::Kind::RuleSet) {
        need(sym_.rule_sets.count(s.fork->rule_set) > 0, pos, "rule set '" + s.fork->rule_set + "' " + where);
        if (s.fork->branches.size() != 2) {
          report(ErrorCode::InvalidArgument, pos, "rule-set fork " + where + " needs exactly two branches");
        }
      }
      for (const auto& b : s.fork->branches) {
        if (b.target == Branch::Target::Lot) need(sym_.lots.count(b.lot) > 0, pos, "LoT '" + b.lot + "' " + where);
        if (b.target == Branch::Target::Step && b.step >= l.steps.size()) {
          report(ErrorCode::UnresolvedReference, pos, "step " + std::to_string(b.step + 1) + " out of range " + where);
        }
      }
    }
    for (const auto& j : l.junctures) need(sym_.junctures.count(j) > 0, pos, "juncture '" + j + "' in " + l.name);
  }

  static void term_vars(const Term& t, std::set<std::string>& out) {
    if (t.kind == Term::Kind::Variable) out.insert(t.variable);
    if (t.kind == Term::Kind::Computed) {
      auto v = free_variables(*t.computed.ast);
      out.insert(v.begin(), v.end());
    }
  }

  static std::set<std::string> bound_by(const std::vector<Pattern>& patterns) {
    std::set<std::string> bound;
    for (const auto& p : patterns) {
      if (p.negated) continue;
      if (p.kind == Pattern::Kind::Object) bound.insert(p.variable);
      if (p.kind == Pattern::Kind::Fact) {
        for (const auto& a : p.args) {
          if (a.kind == Term::Kind::Variable) bound.insert(a.variable);
        }
      }
      if (p.kind == Pattern::Kind::Aggregate) bound.insert(p.alias);
    }
    return bound;
  }

  void unbound(const std::set<std::string>& used, const std::set<std::string>& bound, Position pos,
               const std::string& owner) {
    for (const auto& v : used) {
      if (!bound.count(v)) report(ErrorCode::UnboundVariable, pos, "?" + v + " in " + owner);
    }
  }

  void verify_rule(const Rule& r, Position pos) {
    auto bound = bound_by(r.patterns);
    bound.insert(r.params.begin(), r.params.end());
    std::set<std::string> used;
    for (const auto& a : r.actions) {
      for (const auto& t : a.args) term_vars(t, used);
      for (const auto& [k, t] : a.named_args) term_vars(t, used);
      if (a.kind == Action::Kind::Set) term_vars(a.value, used);
      if (a.kind == Action::Kind::Set || a.kind == Action::Kind::Invoke) used.insert(a.variable);
    }
    unbound(used, bound, pos, "rule '" + r.name + "'");
    for (const auto& p : r.patterns) {
      if (p.kind == Pattern::Kind::Aggregate && !bound.count(p.variable)) {
        report(ErrorCode::UnboundVariable, pos, "?" + p.variable + " aggregated in rule '" + r.name + "'");
      }
    }
  }

  void verify(const std::vector<Decl>& decls, const std::optional<std::string>& cloud) {
    for (const auto& d : decls) {
      const Position pos = d.pos;
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CloudDecl>) {
              for (const auto& t : n.tags) need(sym_.dimensions.count(t) > 0, pos, "dimension '" + t + "' tagged on " + n.name);
              verify(n.body, n.name);
            } else if constexpr (std::is_same_v<T, KsDecl>) {
              for (const auto& a : n.attractors) {
                bool found = std::any_of(n.responders.begin(), n.responders.end(),
                                         [&](const auto& r) { return r.name == a.responder; });
                need(found, pos, "responder '" + a.responder + "' in attractor of " + n.name);
              }
            } else if constexpr (std::is_same_v<T, DRel>) {
              need(sym_.ks.count(n.source_ks) > 0, pos, "source '" + n.source_ks + "' of " + n.appellation);
              need(sym_.ks.count(n.target_ks) > 0, pos, "target '" + n.target_ks + "' of " + n.appellation);
              if (n.shared_attributes.empty()) report(ErrorCode::InvalidArgument, pos, n.appellation + " shares nothing");
              if (n.source_ks == n.target_ks) report(ErrorCode::InvalidArgument, pos, n.appellation + " relates a KS to itself");
            } else if constexpr (std::is_same_v<T, LineOfThought>) {
              verify_lot(n, pos);
            } else if constexpr (std::is_same_v<T, Dimension>) {
              if (n.parent_juncture) need(sym_.junctures.count(*n.parent_juncture) > 0, pos, "juncture '" + *n.parent_juncture + "' of " + n.name);
            } else if constexpr (std::is_same_v<T, Juncture>) {
              if (n.member_dimensions.empty()) report(ErrorCode::InvalidArgument, pos, "juncture '" + n.name + "' has no dimension");
              for (const auto& m : n.member_dimensions) need(sym_.dimensions.count(m) > 0, pos, "dimension '" + m + "' in " + n.name);
              for (const auto& l : n.linked_lots) need(sym_.lots.count(l) > 0, pos, "LoT '" + l + "' in " + n.name);
            } else if constexpr (std::is_same_v<T, Rule>) {
              verify_rule(n, pos);
            } else if constexpr (std::is_same_v<T, GppbTemplate>) {
              auto bound = bound_by(n.patterns);
              for (const auto& [k, v] : n.instantiation) bound.insert(k);
              std::set<std::string> used;
              for (const auto& o : n.outputs) {
                need(sym_.clouds.count(o.cloud) > 0, pos, "output cloud '" + o.cloud + "' of " + n.name);
                for (const auto& [k, t] : o.slots) term_vars(t, used);
              }
              unbound(used, bound, pos, "template '" + n.name + "'");
            } else if constexpr (std::is_same_v<T, AnomalySpec>) {
              if (n.min > n.max) report(ErrorCode::InvalidArgument, pos, "anomaly '" + n.name + "' has min > max");
            } else if constexpr (std::is_same_v<T, ElaborationPlan>) {
              need(sym_.clouds.count(n.source_cloud) > 0, pos, "source cloud '" + n.source_cloud + "' of " + n.name);
              for (const auto& [ks, fn] : n.pairs) need(sym_.ks.count(ks) > 0, pos, "knowledge source '" + ks + "' in " + n.name);
            } else if constexpr (std::is_same_v<T, UseDecl>) {
              verify(n.body, cloud);
            }
          },
          d.node);
    }
  }

  std::string source_;
  Symbols sym_;
  std::vector<Diagnostic> diags_;
};

void load_decls(KnowledgeBase& kb, const std::vector<Decl>& decls, const std::optional<std::string>& cloud,
                std::vector<std::pair<std::string, std::string>>& lot_junctures) {
  for (const auto& d : decls) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, CloudDecl>) {
            kb.add_cloud(n.name, cloud);
            for (const auto& t : n.tags) kb.tag_cloud(n.name, t);
            load_decls(kb, n.body, n.name, lot_junctures);
          } else if constexpr (std::is_same_v<T, KsDecl>) {
            if (!cloud) throw Error(ErrorCode::UnknownCloud, "knowledge source '" + n.name + "' outside any cloud");
            KnowledgeSource ks;
            ks.appellation = n.name;
            ks.slots = n.slots;
            ks.responders = n.responders;
            ks.attractors = n.attractors;
            ks.explains = n.explains;
            kb.put_ks(std::move(ks), *cloud);
          } else if constexpr (std::is_same_v<T, DRel>) {
            kb.add_drel(n);
          } else if constexpr (std::is_same_v<T, LineOfThought>) {
            kb.add_lot(n);
            for (const auto& j : n.junctures) lot_junctures.emplace_back(j, n.name);
          } else if constexpr (std::is_same_v<T, Dimension>) {
            kb.add_dimension(n);
          } else if constexpr (std::is_same_v<T, Juncture>) {
            kb.add_juncture(n);
          } else if constexpr (std::is_same_v<T, Rule>) {
            kb.add_rule(n);
          } else if constexpr (std::is_same_v<T, GppbTemplate>) {
            kb.add_template(n);
          } else if constexpr (std::is_same_v<T, AnomalySpec>) {
            kb.add_anomaly_spec(n);
          } else if constexpr (std::is_same_v<T, ElaborationPlan>) {
            kb.add_plan(n);
          } else if constexpr (std::is_same_v<T, UseDecl>) {
            load_decls(kb, n.body, cloud, lot_junctures);
          }
        },
        d.node);
  }
}

}  // namespace

std::vector<Diagnostic> check_references(const Document& doc, const std::string& source_name) {
  return Checker(source_name).run(doc);
}

void load(KnowledgeBase& kb, const Document& doc) {
  KnowledgeBase::ActorScope actor(kb, "ksynth");
  std::vector<std::pair<std::string, std::string>> lot_junctures;
  load_decls(kb, doc.decls, std::nullopt, lot_junctures);
  for (const auto& [j, lot] : lot_junctures) kb.link_juncture_lot(j, lot);
}

}  // namespace keraia::ksynth
