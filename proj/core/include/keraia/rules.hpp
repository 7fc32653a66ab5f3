#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "keraia/eval.hpp"
#include "keraia/working_memory.hpp"

namespace keraia {

// Command emitted by a rule consequent, e.g. Attack(from, to, dice).
struct Command {
  std::string name;
  SlotMap args;
  std::string rule;

  std::string str() const;
};

struct Firing {
  std::string rule;
  Bindings bindings;
  std::set<std::string> reads;  // "KS/slot/path" read while matching

  std::string bindings_str() const;
};

struct MatchOptions {
  Tick clock = 0;
  Bindings globals;  // pre-bound variables, e.g. ?Self
  const FunctionRegistry* functions = nullptr;
  const Dimension* dimension = nullptr;
  bool track_reads = false;
};

struct ChainOptions : MatchOptions {
  std::size_t max_cycles = 1000;
  // Runs `invoke ?x responder` consequents. Unset: UnknownResponder.
  std::function<void(const std::string& ks, const std::string& responder)> invoke;
  std::string actor;  // defaults to "rule:<name>"
};

struct ChainResult {
  std::vector<Firing> fired;
  std::vector<Fact> asserted;
  std::vector<Command> commands;
  bool halted = false;
  bool cycle_limit_reached = false;  // CycleLimitExceeded, partial result
};

// All binding sets satisfying `patterns`, in enumeration order.
std::vector<Firing> match_patterns(const KnowledgeBase& kb, const WorkingMemory& wm,
                                   const std::vector<Pattern>& patterns, const MatchOptions& options);

// match→select→act until quiescence, halt, or `max_cycles` firings. Conflict
// resolution: salience desc, pattern count desc, definition order, then
// enumeration order. A (rule, bindings) pair fires at most once per call.
ChainResult forward_chain(KnowledgeBase& kb, const std::vector<Rule>& rules, WorkingMemory& wm,
                          const ChainOptions& options = {});

// Template bindings ordered lexicographically by bound values.
std::vector<Bindings> match_template(const KnowledgeBase& kb, const GppbTemplate& tpl, const MatchOptions& options = {});

// Creates one KS per output spec, named <template>.<counter>. Returns the
// generated appellations.
std::vector<std::string> apply_template(KnowledgeBase& kb, const GppbTemplate& tpl, const Bindings& bindings,
                                        const MatchOptions& options = {});

struct AnomalyEvent {
  std::string spec;
  std::string path;
  double value = 0;
  std::string bound;  // "min" or "max"
  double limit = 0;
  Tick tick = 0;
};

// Inclusive bounds: a value equal to min or max is in range.
std::vector<AnomalyEvent> detect_anomalies(const KnowledgeBase& kb, const std::vector<AnomalySpec>& specs,
                                           Tick clock = 0, const Dimension* dimension = nullptr);

std::string bindings_to_string(const Bindings& bindings);

}  // namespace keraia
