// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/random_docs.hpp"
#include "../support/random_rules.hpp"
#include "keraia/drel.hpp"
#include "keraia/elaboration.hpp"
#include "keraia/lot.hpp"
#include "keraia/packs.hpp"
#include "keraia/risk/game.hpp"
#include "keraia/xai.hpp"

namespace {

using namespace keraia;

struct Check {
  bool ok = true;
  std::vector<std::string> failures;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (failures.size() < 5) failures.push_back(what);
    }
  }
  std::string note;
};

KnowledgeBase pack_kb(const std::string& name) {
  KnowledgeBase kb;
  load_pack(kb, name);
  return kb;
}

const std::vector<std::string> kNavalChain{"LoT-1", "LoT-2", "LoT-3", "LoT-4", "LoT-5", "LoT-6"};

// Traces kept by criteria 3 and 4 and the agents of criterion 9, checked by
// criterion 11.
struct AuditSubject {
  std::string label;
  KnowledgeBase before;
  KnowledgeBase after;
  std::optional<ReasoningTrace> trace;
};
std::vector<AuditSubject> g_audit;

// --- criteria ---

void drel_toggle(Check& c) {
  auto speed = [](const KnowledgeBase& kb) { return try_resolve_attribute(kb, "KS-Helo", {"speed"}, 0); };
  auto ship_speed = [](const KnowledgeBase& kb) { return kb.ks("KS-Ship").slots.find("speed")->number(); };
  for (bool start_aboard : {true, false}) {
    KnowledgeBase kb = pack_kb("naval");
    std::vector<std::string> order = start_aboard ? std::vector<std::string>{"ship", "airborne", "ship"}
                                                  : std::vector<std::string>{"airborne", "ship", "airborne"};
    for (const auto& loc : order) {
      kb.set_slot("KS-Helo", "location", SlotValue(loc));
      auto r = speed(kb);
      if (loc == "ship") {
        c.expect(r && r->value.number() == ship_speed(kb) && r->provenance.drel == "DRel-helo-speed",
                 "helo aboard does not inherit ship speed");
      } else {
        bool unresolvable = false;
        try {
          resolve_attribute(kb, "KS-Helo", {"speed"}, 0);
        } catch (const Error& e) {
          unresolvable = e.code() == ErrorCode::Unresolvable;
        }
        c.expect(!r && unresolvable, "airborne helo still resolves speed");
      }
    }
  }
}

void chaining_oracle(Check& c) {
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    test::RandomRuleSet set(1000 + seed);
    bool same = set.engine_fixpoint() == set.naive_fixpoint();
    agree += same;
    c.expect(same, "fixpoint mismatch for seed " + std::to_string(1000 + seed));
  }
  c.note = std::to_string(agree) + "/50 agree";
}

void cavitation(Check& c) {
  int diagnosed = 0;
  const std::vector<std::pair<double, double>> rows{{3.2, 41}, {1.9, 41}, {3.2, 52}, {1.9, 52}};
  for (const auto& [pressure, current] : rows) {
    KnowledgeBase kb = pack_kb("water");
    kb.set_slot("KS-Pump", "discharge_pressure", SlotValue(pressure));
    kb.set_slot("KS-Pump", "motor_current", SlotValue(current));
    KnowledgeBase direct = kb.snapshot();
    Runtime rt;
    auto r = run_rule_set(direct, rt, "Pump-Diagnostics", "");
    bool asserted = std::any_of(r.asserted.begin(), r.asserted.end(), [](const Fact& f) {
      return f.relation == "Diagnose" && f.args.size() == 1 && f.args[0].symbol() == "PumpCavitation";
    });
    diagnosed += asserted;
    bool expected = pressure < 2.5 && current > 45;
    c.expect(asserted == expected, "row mismatch");

    KnowledgeBase before = kb.snapshot();
    auto t = run_lot(kb, "LoT-PumpDiagnosis");
    c.expect(!t.errored, "pump diagnosis LoT errored");
    c.expect((kb.ks("KS-Pump").slots.find("diagnosis")->text() == "PumpCavitation") == expected,
             "LoT diagnosis disagrees with direct run");
    g_audit.push_back({"cavitation row", std::move(before), kb.snapshot(), t});
  }
  c.expect(diagnosed == 1, "Diagnose asserted in " + std::to_string(diagnosed) + " rows");
  c.note = "diagnosed in " + std::to_string(diagnosed) + "/4 rows";
}

void golden_trace(Check& c) {
  const std::vector<std::string> golden{"KS-TR1", "KS-SF1", "KS-SF3", "KS-TR2", "KS-SF1", "KS-SF3",
                                        "KS-SF3", "KS-EC2", "KS-EC3", "KS-EC3", "KS-EC1", "KS-FC2",
                                        "KS-FC2", "KS-FC1", "KS-FC3", "KS-FC3", "KS-TR5"};
  std::string exports[2];
  for (int run = 0; run < 2; ++run) {
    KnowledgeBase kb = pack_kb("naval");
    KnowledgeBase before = kb.snapshot();
    auto t = chain_lots(kb, kNavalChain);
    c.expect(!t.errored, "naval chain errored: " + t.error);
    c.expect(t.activations() == golden, "activation sequence differs");
    exports[run] = export_trace(t, true);
    if (run == 0) g_audit.push_back({"naval chain", std::move(before), kb.snapshot(), t});
  }
  c.expect(exports[0] == exports[1], "normalized exports differ between runs");
}

void elaboration(Check& c) {
  KnowledgeBase kb = pack_kb("naval");
  const std::string source = "Situation_Element_Perception_Refinement";
  std::string digest = kb.cloud_digest(source);
  auto r = elaborate(kb, *kb.find_plan("Naval-Elaboration"));
  const std::vector<std::string> names{"Dimensional_Profiles",    "Mass_Profiles",      "Capability_Profiles",
                                       "Operational_Roles",       "Predictive_Trajectories", "Behavioral_Insights"};
  c.expect(r.outputs == names, "output KS names differ");
  c.expect(kb.cloud(r.target_cloud).members.size() == 6, "target cloud does not hold 6 KSs");
  c.expect(kb.cloud_digest(source) == digest, "source cloud digest changed");

  const auto& size = kb.ks("Existence_Size").slots;
  double expected_mass = size.find("volume")->number() * size.find("density")->number();
  double mass = kb.ks("Mass_Profiles").slots.find("mass")->number();
  c.expect(std::fabs(mass - expected_mass) <= 1e-9 * std::fabs(expected_mass), "mass outside 1e-9 relative");

  // Hand extrapolation: position + velocity * horizon + sea drift.
  const auto& kin = kb.ks("Kinematics").slots;
  const auto& drift = kb.ks("KS-Sea").slots.find("drift")->list();
  const auto& pos = kin.find("position")->list();
  const auto& vel = kin.find("velocity")->list();
  double horizon = kin.find("horizon")->number();
  const auto& predicted = kb.ks("Predictive_Trajectories").slots.find("predicted_position")->list();
  c.expect(predicted.size() == pos.size(), "trajectory dimension");
  for (std::size_t i = 0; i < pos.size() && i < predicted.size(); ++i) {
    double hand = pos[i].number() + vel[i].number() * horizon + drift[i].number();
    c.expect(predicted[i].number() == hand, "trajectory component " + std::to_string(i) + " not exact");
  }
}

void kline_reinforcement(Check& c) {
  KnowledgeBase kb = pack_kb("water");
  kb.set_slot("KS-Pump", "discharge_pressure", SlotValue(1.9));
  kb.set_slot("KS-Pump", "motor_current", SlotValue(52.0));
  const std::string path = "KS-Pump/discharge_pressure";
  KLineWeights w;
  for (int i = 0; i < 10; ++i) {
    KnowledgeBase copy = kb.snapshot();
    auto t = run_lot(copy, "LoT-PumpDiagnosis");
    c.expect(!t.errored, "diagnostic run errored");
    reinforce_kline(w, t);
  }
  c.expect(w.weight(path) == 10, "weight is " + std::to_string(w.weight(path)));
  std::vector<std::string> candidates{"KS-Valve/position", "KS-Filter/head_loss", path, "KS-Chlorinator/dose_rate",
                                      "KS-FlowMeter/reading", "KS-TurbiditySensor/reading"};
  for (const auto& cand : candidates) {
    if (cand != path) c.expect(w.weight(cand) == 0, cand + " is not zero-weight");
  }
  c.expect(select_kline(w, candidates) == path, "reinforced path not selected");

  std::mt19937_64 rng(2024);
  int invariant = 0;
  for (int m = 0; m < 1000; ++m) {
    KLineWeights base;
    KLineWeights shifted;
    std::vector<std::string> names;
    int n = 1 + static_cast<int>(rng() % 10);
    std::uint64_t shift = 1 + rng() % 100;
    for (int i = 0; i < n; ++i) {
      std::string name = "path/" + std::to_string(i);
      std::uint64_t weight = rng() % 6;
      names.push_back(name);
      if (weight) base.add(name, weight);
      shifted.add(name, weight + shift);
    }
    std::shuffle(names.begin(), names.end(), rng);
    bool same = select_kline(base, names) == select_kline(shifted, names);
    invariant += same;
    c.expect(same, "argmax changed under shift");
  }
  c.note = "argmax invariant in " + std::to_string(invariant) + "/1000 maps";
}

void what_if_check(Check& c) {
  KnowledgeBase kb = pack_kb("naval");
  auto null = what_if(kb, kNavalChain, {}, {});
  c.expect(!null.divergence, "empty modification diverged");
  c.expect(export_trace(null.baseline, true) == export_trace(null.variant, true), "normalized traces differ");

  auto t = chain_lots(kb, {"LoT-1", "LoT-2", "LoT-3", "LoT-4"});
  c.expect(!t.errored, "setup chain errored");
  auto r = what_if(kb, {"LoT-5", "LoT-6"}, {}, {{"FC/KS-FC2/threat_classification", SlotValue("neutral")}});
  c.expect(r.modifications.size() == 1 && r.modifications[0].old_value == SlotValue("hostile"),
           "modification did not replace 'hostile'");
  c.expect(r.divergence.has_value(), "no divergence");
  if (r.divergence) {
    const auto& b = r.baseline.events.at(*r.divergence);
    const auto& v = r.variant.events.at(*r.divergence);
    c.expect(b.kind == EventKind::ForkTaken && v.kind == EventKind::ForkTaken, "divergence is not a fork");
    c.expect(b.lot == "LoT-5" && b.subject == "KS-FC2", "divergence is not the LoT-5 fork");
    c.note = "baseline '" + b.branch + "' vs variant '" + v.branch + "'";
  }
}

bool round_trips(const ksynth::Document& doc, const ksynth::ParseOptions& options) {
  std::string printed = ksynth::serialize(doc);
  auto again = ksynth::parse(printed, options);
  return again.ok() && again.document == doc && ksynth::serialize(again.document) == printed;
}

void parser_round_trip(Check& c) {
  ksynth::ParseOptions options{"<round-trip>", pack_dir(), true};
  for (const auto& name : pack_names()) c.expect(round_trips(parse_pack(name), options), "pack " + name);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto first = ksynth::parse(test::RandomDocument(50000 + seed).generate());
    bool good = first.ok() && round_trips(first.document, {});
    ok += good;
    c.expect(good, "fuzz seed " + std::to_string(50000 + seed));
  }
  c.note = std::to_string(pack_names().size()) + " packs, " + std::to_string(ok) + "/200 fuzzed documents";
}

void risk_outcome(Check& c) {
  using namespace keraia::risk;
  std::size_t checked_states = 0;
  GameOptions opts;
  opts.observer = [&](const GameState& s, const LoggedCommand&) {
    ++checked_states;
    bool ok = s.territories.size() == 42;
    for (const auto& t : s.territories) ok = ok && t.armies >= 1 && t.owner >= 0;
    c.expect(ok, "territory invariant broken");
  };

  int wins = 0;
  std::size_t illegal = 0;
  for (int g = 0; g < 200; ++g) {
    AIAsset agent("risk-weakest");
    auto r1 = make_bot("random", 3 * g + 1);
    auto r2 = make_bot("random", 3 * g + 2);
    auto r3 = make_bot("random", 3 * g + 3);
    auto res = simulate_game(std::vector<Bot*>{&agent, r1.get(), r2.get(), r3.get()}, 1000 + g, opts);
    wins += res.winner == 0;
    c.expect(res.invariant_violations == 0, "invariant violation reported");
    for (const auto& e : res.log) illegal += e.player == 0 && e.status == "illegal";
    if (g < 3) g_audit.push_back({"agent game " + std::to_string(g), agent.setup_snapshot(), agent.kb(), {}});
  }
  double rate = wins / 200.0;
  c.expect(rate >= 0.40, "win rate below 0.40");
  c.expect(illegal == 0, "agent issued illegal commands");

  std::size_t attacks = 0;
  for (int g = 0; g < 20; ++g) {
    auto res = simulate_game(std::vector<std::string>{"benevolent", "random", "random", "random"}, 5000 + g, opts);
    for (const auto& e : res.log) attacks += e.player == 0 && e.command.kind == GameCommand::Kind::Attack;
  }
  c.expect(attacks == 0, "benevolent bot attacked");

  for (std::uint64_t seed : {1000u, 1001u, 4242u}) {
    std::vector<std::string> specs{"aiasset", "random", "random", "random"};
    auto a = simulate_game(specs, seed, opts);
    auto b = simulate_game(specs, seed, opts);
    c.expect(a.log == b.log && a.winner == b.winner, "seed " + std::to_string(seed) + " not reproducible");
  }
  std::ostringstream note;
  note << "win rate " << std::fixed << std::setprecision(3) << rate << ", " << checked_states << " states checked";
  c.note = note.str();
}

void separability(Check& c) {
  using namespace keraia::risk;
  int differing = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto weak = simulate_game(std::vector<std::string>{"aiasset-weakest", "random", "random", "random"}, 7000 + seed);
    auto strong =
        simulate_game(std::vector<std::string>{"aiasset-strongest", "random", "random", "random"}, 7000 + seed);
    differing += format_log(classic_board(), weak.log) != format_log(classic_board(), strong.log);
  }
  c.expect(differing >= 1, "strategies never differ");
  c.note = std::to_string(differing) + "/20 seeds differ";
}

void audit_closure(Check& c) {
  int traces = 0;
  for (const auto& s : g_audit) {
    for (const auto& [name, ks] : s.after.knowledge_sources()) {
      c.expect(history(s.after, name).size() == ks.version - 1, s.label + ": history gap in " + name);
    }
    c.expect(diff_state(replay_version_log(s.before, s.after), s.after).empty(),
             s.label + ": version log replay differs");
    if (s.trace) {
      ++traces;
      c.expect(export_trace(replay_trace(*s.trace), true) == export_trace(*s.trace, true),
               s.label + ": trace replay differs");
    }
  }
  c.note = std::to_string(g_audit.size()) + " knowledge bases, " + std::to_string(traces) + " traces";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no limit
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "DRel helo/ship toggle", 1, drel_toggle},
      {2, "forward chaining equals naive fixpoint", 10, chaining_oracle},
      {3, "cavitation truth table", 1, cavitation},
      {4, "naval golden trace", 2, golden_trace},
      {5, "naval elaboration", 1, elaboration},
      {6, "KLine reinforcement", 5, kline_reinforcement},
      {7, "what-if null and divergence", 2, what_if_check},
      {8, "parser round-trip", 10, parser_round_trip},
      {9, "RISK outcome direction", 60, risk_outcome},
      {10, "strategy separability", 10, separability},
      {11, "audit closure", 0, audit_closure},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.limit_s > 0 && secs >= cr.limit_s) check.expect(false, "time limit exceeded");
    failed += !check.ok;
    std::cout << (check.ok ? "PASS" : "FAIL") << " criterion " << cr.id << ": " << cr.name << " (" << std::fixed
              << std::setprecision(3) << secs << " s";
    if (cr.limit_s > 0) std::cout << " / limit " << std::setprecision(0) << cr.limit_s << " s";
    std::cout << ")";
    if (!check.note.empty()) std::cout << " " << check.note;
    std::cout << "\n";
    for (const auto& f : check.failures) std::cout << "    " << f << "\n";
  }
  return failed == 0 ? 0 : 1;
}
