#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "keraia/rules.hpp"

namespace keraia::test {

// Monotonic propositional rule set over atoms A0..A(n-1): each rule is a
// conjunction of zero-arity facts implying one more fact.
struct RandomRuleSet {
  std::vector<Rule> rules;
  std::set<std::string> initial;

  RandomRuleSet(std::uint64_t seed, int max_rules = 20, int max_atoms = 8) {
    std::mt19937_64 rng(seed);
    int atoms = 1 + static_cast<int>(rng() % max_atoms);
    int count = 1 + static_cast<int>(rng() % max_rules);
    auto atom = [&] { return "A" + std::to_string(rng() % atoms); };
    for (int i = 0; i < atoms; ++i) {
      if (rng() % 3 == 0) initial.insert("A" + std::to_string(i));
    }
    for (int i = 0; i < count; ++i) {
      Rule r;
      r.name = "r" + std::to_string(i);
      r.rule_set = "Random";
      r.salience = static_cast<int>(rng() % 5);
      int body = static_cast<int>(rng() % 4);
      for (int b = 0; b < body; ++b) {
        Pattern p;
        p.kind = Pattern::Kind::Fact;
        p.relation = atom();
        r.patterns.push_back(std::move(p));
      }
      Action a;
      a.kind = Action::Kind::Assert;
      a.relation = atom();
      r.actions.push_back(std::move(a));
      rules.push_back(std::move(r));
    }
  }

  // Least fixpoint by naive iteration, independent of the engine.
  std::set<std::string> naive_fixpoint() const {
    std::set<std::string> known = initial;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& r : rules) {
        bool ok = true;
        for (const auto& p : r.patterns) ok = ok && known.count(p.relation);
        if (ok && known.insert(r.actions[0].relation).second) changed = true;
      }
    }
    return known;
  }

  // Engine closure: seeds working memory with the initial atoms and chains.
  std::set<std::string> engine_fixpoint() const {
    KnowledgeBase kb;
    WorkingMemory wm;
    wm.sync(kb);
    for (const auto& a : initial) wm.assert_fact(Fact{a, {}, "seed"});
    forward_chain(kb, rules, wm);
    std::set<std::string> out;
    for (const Fact* f : wm.facts()) out.insert(f->relation);
    return out;
  }
};

}  // namespace keraia::test
