#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "keraia/expr.hpp"
#include "keraia/knowledge_base.hpp"

namespace keraia {

struct EvalContext;

using Function = std::function<SlotValue(const std::vector<SlotValue>& args, const EvalContext& ctx)>;

// Name → implementation for calls inside expressions. The builtins
// (distance, elapsed_since, exists, abs, min, max, len, contains) are always
// available; `exists` is handled by the evaluator itself.
class FunctionRegistry {
 public:
  void add(std::string name, Function fn) { fns_[std::move(name)] = std::move(fn); }
  const Function* find(std::string_view name) const;

  static const FunctionRegistry& builtins();

 private:
  std::map<std::string, Function, std::less<>> fns_;
};

using Bindings = std::map<std::string, SlotValue, std::less<>>;

struct EvalContext {
  const KnowledgeBase* kb = nullptr;
  Tick clock = 0;
  std::map<std::string, std::string, std::less<>> roles;  // role → KS appellation
  const Bindings* variables = nullptr;                     // names without '?'
  const Dimension* dimension = nullptr;
  const FunctionRegistry* functions = nullptr;             // consulted before builtins
  bool inherit = true;                                     // follow DRels on local misses
  std::set<std::string>* reads = nullptr;                  // located "KS/slot/path" reads
};

// Reads a slot as seen from `ctx`: dimension assumption, local value, then
// (when enabled) DRel inheritance. nullopt when none applies.
std::optional<SlotValue> read_slot(const EvalContext& ctx, const std::string& ks, const SlotPath& path);

SlotValue evaluate(const Expr& expr, const EvalContext& ctx);
bool eval_condition(const Expr& expr, const EvalContext& ctx);
inline bool eval_condition(const Condition& cond, const EvalContext& ctx) {
  return cond.empty() || eval_condition(*cond.ast, ctx);
}

// Equality used by expressions and pattern matching: text and references
// compare by name, numbers by value ignoring units.
bool values_equal(const SlotValue& a, const SlotValue& b);

// KS appellation denoted by a value (reference, or text naming a KS).
std::optional<std::string> as_appellation(const KnowledgeBase& kb, const SlotValue& value);

}  // namespace keraia
