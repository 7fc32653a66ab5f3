#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "keraia/expr.hpp"
#include "keraia/value.hpp"

namespace keraia {

using Tick = std::int64_t;

// ---------------------------------------------------------------------------
// Knowledge sources and clouds

struct ResponderBinding {
  std::string name;
  std::string operation;
  SlotMap params;

  friend bool operator==(const ResponderBinding&, const ResponderBinding&) = default;
};

// Fires `responder` when a pulse arrives on a watched path and `condition`
// holds. An empty `watch` subscribes to every pulse from the owning KS.
struct AttractorBinding {
  Condition condition;
  std::string responder;
  std::string watch;

  friend bool operator==(const AttractorBinding&, const AttractorBinding&) = default;
};

struct KnowledgeSource {
  std::string appellation;
  SlotValue slots = SlotValue::map();
  std::vector<ResponderBinding> responders;
  std::vector<AttractorBinding> attractors;
  std::optional<std::string> explains;
  std::uint64_t version = 0;
  std::string owner_cloud;

  const ResponderBinding* responder(std::string_view name) const;
};

struct Cloud {
  std::string appellation;
  std::optional<std::string> parent;
  std::set<std::string> members;
  std::set<std::string> sub_clouds;
  std::set<std::string> dimension_tags;
};

struct Assumption {
  std::string path;  // KLine path
  SlotValue value;

  friend bool operator==(const Assumption&, const Assumption&) = default;
};

struct Dimension {
  std::string name;
  std::string description;
  std::optional<std::string> parent_juncture;
  std::vector<Assumption> assumptions;

  friend bool operator==(const Dimension&, const Dimension&) = default;
};

struct Juncture {
  std::string name;
  std::set<std::string> member_dimensions;
  std::set<std::string> linked_lots;

  friend bool operator==(const Juncture&, const Juncture&) = default;
};

// ---------------------------------------------------------------------------
// Dynamic relations

// `source` provides the shared attributes, `target` inherits them while
// `condition` holds.
struct DRel {
  std::string appellation;
  std::string source_ks;
  std::string target_ks;
  std::vector<std::string> shared_attributes;  // slot paths, '/'-separated
  Condition condition;
  int priority = 0;

  friend bool operator==(const DRel&, const DRel&) = default;
};

// ---------------------------------------------------------------------------
// Rules and templates

struct Term {
  enum class Kind { Variable, Constant, Computed };
  Kind kind = Kind::Constant;
  std::string variable;
  SlotValue constant;
  Condition computed;

  static Term var(std::string name) { return Term{Kind::Variable, std::move(name), {}, {}}; }
  static Term value(SlotValue v) { return Term{Kind::Constant, {}, std::move(v), {}}; }
  static Term expr(std::string text) { return Term{Kind::Computed, {}, {}, Condition::parse(std::move(text))}; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Pattern {
  enum class Kind { Object, Fact, Test, Aggregate };
  Kind kind = Kind::Object;
  bool negated = false;

  // Object: binds `variable` to a KS appellation. `type` filters on the KS's
  // `type` slot; `where` is evaluated with the candidate as the implicit subject.
  std::string variable;
  std::string type;
  Condition where;

  // Fact: relation(args...)
  std::string relation;
  std::vector<Term> args;

  // Test
  Condition test;

  // Aggregate: minimize/maximize ?variable.path as alias
  bool minimize = true;
  std::string path;
  std::string alias;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct Action {
  enum class Kind { Assert, Set, Command, Invoke, Halt };
  Kind kind = Kind::Assert;
  std::string relation;  // Assert
  std::vector<Term> args;
  std::string variable;  // Set / Invoke subject variable
  std::string path;      // Set slot path
  Term value;            // Set
  std::string name;      // Command name / Invoke responder
  std::vector<std::pair<std::string, Term>> named_args;  // Command

  friend bool operator==(const Action&, const Action&) = default;
};

struct Rule {
  std::string name;
  std::string rule_set;
  int salience = 0;
  std::vector<std::string> params;  // variables bound by the caller
  std::vector<Pattern> patterns;
  std::vector<Action> actions;

  std::size_t specificity() const { return patterns.size(); }

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct OutputSpec {
  std::string cloud;
  std::vector<std::pair<std::string, Term>> slots;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct GppbTemplate {
  std::string name;
  std::vector<Pattern> patterns;
  std::vector<std::pair<std::string, SlotValue>> instantiation;
  std::vector<OutputSpec> outputs;

  friend bool operator==(const GppbTemplate&, const GppbTemplate&) = default;
};

struct AnomalySpec {
  std::string name;
  std::string path;  // KLine path
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const AnomalySpec&, const AnomalySpec&) = default;
};

// ---------------------------------------------------------------------------
// Lines of thought

struct Branch {
  enum class Target { Lot, Step, Halt };
  std::string label;
  Condition when;  // empty: unconditional
  Target target = Target::Halt;
  std::string lot;
  std::size_t step = 0;

  friend bool operator==(const Branch&, const Branch&) = default;
};

// A condition fork takes the first branch whose `when` holds. A rule-set fork
// runs `rule_set` and takes branch 0 when `fact` was asserted, branch 1
// otherwise.
struct Fork {
  enum class Kind { Condition, RuleSet };
  Kind kind = Kind::Condition;
  std::string rule_set;
  std::string fact;
  std::vector<Branch> branches;

  friend bool operator==(const Fork&, const Fork&) = default;
};

struct Step {
  enum class Action { None, Responder, RuleSet };
  std::string target;
  Action action = Action::None;
  std::string name;
  std::optional<Fork> fork;

  friend bool operator==(const Step&, const Step&) = default;
};

struct LineOfThought {
  std::string name;
  std::vector<Step> steps;
  std::vector<std::string> junctures;

  friend bool operator==(const LineOfThought&, const LineOfThought&) = default;
};

struct ElaborationPlan {
  std::string name;
  std::string source_cloud;
  std::string target_cloud;
  std::vector<std::pair<std::string, std::string>> pairs;  // (source KS, function)

  friend bool operator==(const ElaborationPlan&, const ElaborationPlan&) = default;
};

// ---------------------------------------------------------------------------
// Audit and events

// `old_value`/`new_value` absent means "unset".
struct VersionEntry {
  std::uint64_t seq = 0;
  std::string appellation;
  std::uint64_t version = 0;  // version after the mutation
  std::string path;           // "*" for a whole-frame replacement
  std::optional<SlotValue> old_value;
  std::optional<SlotValue> new_value;
  Tick tick = 0;
  std::int64_t timestamp_ms = 0;
  std::string actor;
};

struct Pulse {
  std::string source;
  std::string path;
  std::optional<SlotValue> old_value;
  std::optional<SlotValue> new_value;
  Tick tick = 0;
};

struct Impulse {
  std::string target;  // KS appellation or LoT name
  SlotMap arguments;
  Tick tick = 0;
};

using Event = std::variant<Pulse, Impulse>;

}  // namespace keraia
