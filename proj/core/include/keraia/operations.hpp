#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "keraia/elaboration.hpp"
#include "keraia/rules.hpp"

namespace keraia {

class OperationRegistry;

// Shared state for one reasoning session: the working memory that rule-set
// steps accumulate facts in, plus the registries and evaluation settings.
struct Runtime {
  const OperationRegistry* operations = nullptr;  // nullptr: OperationRegistry::builtins()
  const FunctionRegistry* functions = nullptr;
  const TransformationRegistry* transformations = nullptr;
  const Dimension* dimension = nullptr;
  Tick clock = 0;
  Bindings globals;
  std::size_t max_cycles = 1000;
  bool track_reads = true;
  WorkingMemory wm;
  bool wm_synced = false;

  const OperationRegistry& ops() const;
  WorkingMemory& memory(const KnowledgeBase& kb);
};

struct OpResult {
  std::vector<Firing> fired;
  std::vector<Fact> asserted;
  std::vector<Command> commands;
  std::vector<AnomalyEvent> anomalies;
  std::vector<FunctionLogEntry> function_logs;
  std::vector<std::string> generated;
  std::set<std::string> reads;
  bool halted = false;
  bool cycle_limit_reached = false;

  void merge(OpResult other);
};

struct OpContext {
  KnowledgeBase& kb;
  Runtime& rt;
  std::string ks;  // the KS the responder is bound to
  const SlotMap& params;

  const SlotValue* param(std::string_view name) const;
  const SlotValue& require(std::string_view name) const;  // InvalidArgument when absent
  std::string text_param(std::string_view name) const;
};

using Operation = std::function<OpResult(OpContext&)>;
using Paradigm = std::function<ChainResult(KnowledgeBase&, const std::vector<Rule>&, WorkingMemory&, const ChainOptions&)>;

// Named procedural operations a responder can bind to:
//   noop()
//   set(path, value | expr, [target])
//   copy(from = KLine | [KLines], to, [target])   missing source: Unresolvable
//   compute(path, expr, [target])
//   run_rules(ruleset, [paradigm = "forward"])
//   detect_anomalies([spec])
//   elaborate(plan)
//   apply_template(template)
// Further reasoning paradigms plug in with the forward-chain signature and
// are selected by run_rules(paradigm = ...).
class OperationRegistry {
 public:
  void add(std::string name, Operation op) { ops_[std::move(name)] = std::move(op); }
  void add_paradigm(std::string name, Paradigm p) { paradigms_[std::move(name)] = std::move(p); }
  const Operation* find(std::string_view name) const;
  const Paradigm* paradigm(std::string_view name) const;

  static OperationRegistry with_builtins();
  static const OperationRegistry& builtins();

 private:
  std::map<std::string, Operation, std::less<>> ops_;
  std::map<std::string, Paradigm, std::less<>> paradigms_;
};

// Runs a rule set with ?Self bound to `self` (when non-empty).
OpResult run_rule_set(KnowledgeBase& kb, Runtime& rt, const std::string& rule_set, const std::string& self,
                      const std::string& paradigm = "forward");

// Runs responder `name` bound on `ks`. Throws UnknownResponder.
OpResult invoke_responder(KnowledgeBase& kb, Runtime& rt, const std::string& ks, const std::string& name);

// --- event loop ---

struct ResponderRun {
  std::string ks;
  std::string responder;
  std::size_t attractor = 0;
  std::size_t wave = 0;
  Pulse trigger;
  OpResult result;
};

struct DispatchResult {
  std::vector<ResponderRun> runs;
  std::vector<Pulse> emitted;  // pulses produced by responders, in order
  std::size_t waves = 0;
};

struct DispatchOptions {
  std::size_t depth_limit = 8;
  // Invoked for impulses that target a LoT.
  std::function<void(const Impulse&)> start_lot;
};

// Attractors subscribed to a pulse are evaluated with roles self (owner) and
// source, and variables ?old / ?new. Satisfied attractors run their responder
// in (KS appellation, attractor index) order; pulses they cause form the next
// wave. Throws CascadeLimitExceeded when pulses remain after `depth_limit`
// waves.
DispatchResult dispatch(KnowledgeBase& kb, Runtime& rt, const Event& event, const DispatchOptions& options = {});
DispatchResult dispatch(KnowledgeBase& kb, Runtime& rt, std::vector<Pulse> pulses, const DispatchOptions& options = {});

// True when an attractor with `watch` declared on `owner` hears `pulse`.
bool attractor_hears(const KnowledgeBase& kb, const std::string& owner, const AttractorBinding& attractor,
                     const Pulse& pulse);

}  // namespace keraia
