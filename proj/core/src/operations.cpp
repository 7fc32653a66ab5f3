#include "keraia/operations.hpp"

#include <algorithm>
#include <deque>

#include "keraia/drel.hpp"
#include "keraia/error.hpp"
#include "keraia/kline.hpp"

namespace keraia {

namespace {

SlotValue read_kline(KnowledgeBase& kb, Runtime& rt, const std::string& path, std::set<std::string>& reads) {
  SlotAddress addr;
  try {
    addr = locate(kb, KLinePath::parse(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnknownSegment) throw;
    throw Error(ErrorCode::Unresolvable, path + ": " + e.what());
  }
  auto r = try_resolve_attribute(kb, addr.ks, addr.path, rt.clock, ResolveOptions{false, rt.dimension});
  if (!r) throw Error(ErrorCode::Unresolvable, path + " has no value");
  reads.insert(r->provenance.provider + "/" + join_path(addr.path));
  return r->value;
}

std::string target_of(const OpContext& ctx) {
  const SlotValue* t = ctx.param("target");
  if (!t) return ctx.ks;
  auto s = t->symbol();
  if (!s) throw Error(ErrorCode::InvalidArgument, "target must name a knowledge source");
  return std::string(*s);
}

EvalContext eval_context(const OpContext& ctx, std::set<std::string>* reads) {
  EvalContext e;
  e.kb = &ctx.kb;
  e.clock = ctx.rt.clock;
  e.roles["self"] = ctx.ks;
  e.variables = &ctx.rt.globals;
  e.dimension = ctx.rt.dimension;
  e.functions = ctx.rt.functions;
  e.reads = reads;
  return e;
}

SlotValue eval_param_expr(const OpContext& ctx, const std::string& text, std::set<std::string>& reads) {
  Condition c = Condition::parse(text);
  return evaluate(*c.ast, eval_context(ctx, &reads));
}

OpResult op_set(OpContext& ctx) {
  OpResult r;
  std::string target = target_of(ctx);
  std::string path = ctx.text_param("path");
  SlotValue value;
  if (const SlotValue* v = ctx.param("value")) value = *v;
  else value = eval_param_expr(ctx, ctx.text_param("expr"), r.reads);
  ctx.kb.set_slot(target, split_path(path), std::move(value));
  return r;
}

OpResult op_copy(OpContext& ctx) {
  OpResult r;
  const SlotValue& from = ctx.require("from");
  SlotValue value;
  if (from.is_list()) {
    SlotList items;
    for (const auto& f : from.list()) {
      auto s = f.symbol();
      if (!s) throw Error(ErrorCode::InvalidArgument, "copy sources must be KLine paths");
      items.push_back(read_kline(ctx.kb, ctx.rt, std::string(*s), r.reads));
    }
    value = SlotValue(std::move(items));
  } else {
    value = read_kline(ctx.kb, ctx.rt, ctx.text_param("from"), r.reads);
  }
  ctx.kb.set_slot(target_of(ctx), split_path(ctx.text_param("to")), std::move(value));
  return r;
}

OpResult op_compute(OpContext& ctx) {
  OpResult r;
  SlotValue value = eval_param_expr(ctx, ctx.text_param("expr"), r.reads);
  ctx.kb.set_slot(target_of(ctx), split_path(ctx.text_param("path")), std::move(value));
  return r;
}

OpResult op_run_rules(OpContext& ctx) {
  std::string paradigm = ctx.param("paradigm") ? ctx.text_param("paradigm") : "forward";
  return run_rule_set(ctx.kb, ctx.rt, ctx.text_param("ruleset"), ctx.ks, paradigm);
}

OpResult op_detect_anomalies(OpContext& ctx) {
  OpResult r;
  std::vector<AnomalySpec> specs;
  if (const SlotValue* s = ctx.param("spec")) {
    auto name = s->symbol();
    for (const auto& a : ctx.kb.anomaly_specs()) {
      if (name && a.name == *name) specs.push_back(a);
    }
    if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "unknown anomaly spec '" + render(*s) + "'");
  } else {
    specs = ctx.kb.anomaly_specs();
  }
  r.anomalies = detect_anomalies(ctx.kb, specs, ctx.rt.clock, ctx.rt.dimension);
  return r;
}

OpResult op_elaborate(OpContext& ctx) {
  OpResult r;
  std::string name = ctx.text_param("plan");
  const ElaborationPlan* plan = ctx.kb.find_plan(name);
  if (!plan) throw Error(ErrorCode::InvalidArgument, "unknown elaboration plan '" + name + "'");
  const TransformationRegistry& reg = ctx.rt.transformations ? *ctx.rt.transformations : builtin_transformations();
  auto result = elaborate(ctx.kb, *plan, reg, ctx.rt.clock);
  r.generated = result.outputs;
  r.function_logs = result.log;
  return r;
}

OpResult op_apply_template(OpContext& ctx) {
  OpResult r;
  std::string name = ctx.text_param("template");
  const GppbTemplate* tpl = ctx.kb.find_template(name);
  if (!tpl) throw Error(ErrorCode::UnknownTemplate, name);
  MatchOptions opts;
  opts.clock = ctx.rt.clock;
  opts.functions = ctx.rt.functions;
  opts.dimension = ctx.rt.dimension;
  GppbTemplate copy = *tpl;
  for (const auto& b : match_template(ctx.kb, copy, opts)) {
    auto names = apply_template(ctx.kb, copy, b, opts);
    r.generated.insert(r.generated.end(), names.begin(), names.end());
  }
  return r;
}

}  // namespace

void OpResult::merge(OpResult other) {
  auto append = [](auto& into, auto& from) {
    into.insert(into.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
  };
  append(fired, other.fired);
  append(asserted, other.asserted);
  append(commands, other.commands);
  append(anomalies, other.anomalies);
  append(function_logs, other.function_logs);
  append(generated, other.generated);
  reads.insert(other.reads.begin(), other.reads.end());
  halted = halted || other.halted;
  cycle_limit_reached = cycle_limit_reached || other.cycle_limit_reached;
}

const OperationRegistry& Runtime::ops() const { return operations ? *operations : OperationRegistry::builtins(); }

WorkingMemory& Runtime::memory(const KnowledgeBase& kb) {
  wm.sync(kb);
  wm_synced = true;
  return wm;
}

const SlotValue* OpContext::param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p.value;
  }
  return nullptr;
}

const SlotValue& OpContext::require(std::string_view name) const {
  if (const SlotValue* v = param(name)) return *v;
  throw Error(ErrorCode::InvalidArgument, "missing parameter '" + std::string(name) + "'");
}

std::string OpContext::text_param(std::string_view name) const {
  const SlotValue& v = require(name);
  if (auto s = v.symbol()) return std::string(*s);
  if (v.is_number()) return format_number(v.number());
  throw Error(ErrorCode::InvalidArgument, "parameter '" + std::string(name) + "' must be text");
}

const Operation* OperationRegistry::find(std::string_view name) const {
  auto it = ops_.find(name);
  return it == ops_.end() ? nullptr : &it->second;
}

const Paradigm* OperationRegistry::paradigm(std::string_view name) const {
  auto it = paradigms_.find(name);
  return it == paradigms_.end() ? nullptr : &it->second;
}

OperationRegistry OperationRegistry::with_builtins() {
  OperationRegistry r;
  r.add("noop", [](OpContext&) { return OpResult{}; });
  r.add("set", op_set);
  r.add("copy", op_copy);
  r.add("compute", op_compute);
  r.add("run_rules", op_run_rules);
  r.add("detect_anomalies", op_detect_anomalies);
  r.add("elaborate", op_elaborate);
  r.add("apply_template", op_apply_template);
  r.add_paradigm("forward", [](KnowledgeBase& kb, const std::vector<Rule>& rules, WorkingMemory& wm,
                               const ChainOptions& o) { return forward_chain(kb, rules, wm, o); });
  return r;
}

const OperationRegistry& OperationRegistry::builtins() {
  static const OperationRegistry registry = with_builtins();
  return registry;
}

OpResult run_rule_set(KnowledgeBase& kb, Runtime& rt, const std::string& rule_set, const std::string& self,
                      const std::string& paradigm) {
  const Paradigm* p = rt.ops().paradigm(paradigm);
  if (!p) throw Error(ErrorCode::InvalidArgument, "unknown reasoning paradigm '" + paradigm + "'");
  auto rules = kb.rules_in(rule_set);
  ChainOptions opts;
  opts.clock = rt.clock;
  opts.globals = rt.globals;
  if (!self.empty()) opts.globals["Self"] = SlotValue::ref(self);
  opts.functions = rt.functions;
  opts.dimension = rt.dimension;
  opts.track_reads = rt.track_reads;
  opts.max_cycles = rt.max_cycles;
  std::vector<OpResult> nested;
  opts.invoke = [&](const std::string& ks, const std::string& responder) {
    nested.push_back(invoke_responder(kb, rt, ks, responder));
  };
  WorkingMemory& wm = rt.memory(kb);
  ChainResult chain = (*p)(kb, rules, wm, opts);
  OpResult r;
  for (const auto& f : chain.fired) r.reads.insert(f.reads.begin(), f.reads.end());
  r.fired = std::move(chain.fired);
  r.asserted = std::move(chain.asserted);
  r.commands = std::move(chain.commands);
  r.halted = chain.halted;
  r.cycle_limit_reached = chain.cycle_limit_reached;
  for (auto& n : nested) r.merge(std::move(n));
  return r;
}

OpResult invoke_responder(KnowledgeBase& kb, Runtime& rt, const std::string& ks, const std::string& name) {
  const KnowledgeSource& frame = kb.ks(ks);
  const ResponderBinding* binding = frame.responder(name);
  if (!binding) throw Error(ErrorCode::UnknownResponder, ks + "." + name);
  const Operation* op = rt.ops().find(binding->operation);
  if (!op) throw Error(ErrorCode::UnknownResponder, ks + "." + name + " binds unknown operation '" + binding->operation + "'");
  SlotMap params = binding->params;  // the binding may be replaced while running
  KnowledgeBase::ActorScope actor(kb, "responder:" + ks + "." + name);
  OpContext ctx{kb, rt, ks, params};
  return (*op)(ctx);
}

bool attractor_hears(const KnowledgeBase& kb, const std::string& owner, const AttractorBinding& attractor,
                     const Pulse& pulse) {
  std::string source = owner;
  SlotPath watch = split_path(attractor.watch);
  if (!watch.empty() && watch.front() != owner && kb.find_ks(watch.front()) &&
      !kb.slot(owner, {watch.front()})) {
    source = watch.front();
    watch.erase(watch.begin());
  } else if (!watch.empty() && watch.front() == owner) {
    watch.erase(watch.begin());
  }
  if (pulse.source != source) return false;
  if (watch.empty() || pulse.path == "*") return true;
  SlotPath path = split_path(pulse.path);
  return path.size() >= watch.size() && std::equal(watch.begin(), watch.end(), path.begin());
}

DispatchResult dispatch(KnowledgeBase& kb, Runtime& rt, const Event& event, const DispatchOptions& options) {
  if (const auto* impulse = std::get_if<Impulse>(&event)) {
    DispatchResult out;
    if (kb.find_lot(impulse->target)) {
      if (!options.start_lot) throw Error(ErrorCode::UnknownLoT, impulse->target + " (no LoT runner)");
      options.start_lot(*impulse);
      return out;
    }
    if (!kb.find_ks(impulse->target)) throw Error(ErrorCode::UnknownLoT, impulse->target);
    std::string responder;
    for (const auto& a : impulse->arguments) {
      if (a.name == "responder" && a.value.symbol()) responder = std::string(*a.value.symbol());
    }
    if (responder.empty()) throw Error(ErrorCode::UnknownResponder, impulse->target + " (impulse names no responder)");
    ResponderRun run{impulse->target, responder, 0, 0, {}, invoke_responder(kb, rt, impulse->target, responder)};
    out.runs.push_back(std::move(run));
    out.waves = 1;
    auto rest = dispatch(kb, rt, kb.take_pulses(), options);
    for (auto& r : rest.runs) {
      ++r.wave;
      out.runs.push_back(std::move(r));
    }
    out.emitted = std::move(rest.emitted);
    out.waves += rest.waves;
    return out;
  }
  return dispatch(kb, rt, std::vector<Pulse>{std::get<Pulse>(event)}, options);
}

DispatchResult dispatch(KnowledgeBase& kb, Runtime& rt, std::vector<Pulse> pulses, const DispatchOptions& options) {
  DispatchResult out;
  std::size_t wave = 0;
  while (!pulses.empty()) {
    if (wave >= options.depth_limit) {
      throw Error(ErrorCode::CascadeLimitExceeded,
                  std::to_string(pulses.size()) + " pulse(s) pending after " + std::to_string(wave) + " waves");
    }
    std::vector<Pulse> next;
    for (const auto& pulse : pulses) {
      // Collect first: responders may change the attractor set.
      std::vector<std::pair<std::string, std::size_t>> triggered;
      for (const auto& [name, ks] : kb.knowledge_sources()) {
        for (std::size_t i = 0; i < ks.attractors.size(); ++i) {
          const auto& a = ks.attractors[i];
          if (!attractor_hears(kb, name, a, pulse)) continue;
          Bindings vars = rt.globals;
          vars["old"] = pulse.old_value.value_or(SlotValue("unset"));
          vars["new"] = pulse.new_value.value_or(SlotValue("unset"));
          EvalContext ctx;
          ctx.kb = &kb;
          ctx.clock = rt.clock;
          ctx.roles = {{"self", name}, {"source", pulse.source}};
          ctx.variables = &vars;
          ctx.dimension = rt.dimension;
          ctx.functions = rt.functions;
          if (eval_condition(a.condition, ctx)) triggered.emplace_back(name, i);
        }
      }
      for (const auto& [name, index] : triggered) {
        const KnowledgeSource* ks = kb.find_ks(name);
        if (!ks || index >= ks->attractors.size()) continue;
        std::string responder = ks->attractors[index].responder;
        ResponderRun run{name, responder, index, wave, pulse, invoke_responder(kb, rt, name, responder)};
        out.runs.push_back(std::move(run));
        for (auto& p : kb.take_pulses()) {
          out.emitted.push_back(p);
          next.push_back(std::move(p));
        }
      }
    }
    pulses = std::move(next);
    ++wave;
  }
  out.waves = wave;
  return out;
}

}  // namespace keraia
