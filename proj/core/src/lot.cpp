#include "keraia/lot.hpp"

#include <chrono>

#include "keraia/drel.hpp"
#include "keraia/error.hpp"

namespace keraia {

namespace {

std::int64_t wall_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// Thrown inside the executor once an Errored event has been recorded.
struct Aborted {};

class Executor {
 public:
  Executor(KnowledgeBase& kb, const LotOptions& options, ReasoningTrace& trace, Tick clock)
      : kb_(kb), options_(options), trace_(trace), tick_(clock) {
    if (options.dimension) {
      dimension_ = kb.find_dimension(*options.dimension);
      if (!dimension_) throw Error(ErrorCode::InvalidArgument, "unknown dimension '" + *options.dimension + "'");
    }
    rt_.operations = options.operations;
    rt_.functions = options.functions;
    rt_.transformations = options.transformations;
    rt_.dimension = dimension_;
    rt_.globals = trace.request.inputs;
    rt_.max_cycles = options.max_cycles;
    rt_.clock = clock;
    kb_.set_tick(clock);
  }

  void run(const std::string& lot, std::size_t depth, const std::string& position = {}) {
    const LineOfThought* def = kb_.find_lot(lot);
    if (!def) fail(lot, depth, std::nullopt, "", Error(ErrorCode::UnknownLoT, lot), position);
    if (depth >= options_.depth_limit) {
      fail(lot, depth, std::nullopt, "",
           Error(ErrorCode::DepthLimitExceeded, "nesting depth " + std::to_string(depth) + " at " + lot), position);
    }
    for (const auto& j : def->junctures) {
      TraceEvent e = base(EventKind::JunctureLinked, lot, depth, std::nullopt);
      e.subject = j;
      trace_.append(std::move(e));
    }
    std::size_t index = 0;
    std::size_t executed = 0;
    while (index < def->steps.size()) {
      if (++executed > options_.step_limit) {
        fail(lot, depth, index, "",
             Error(ErrorCode::CycleLimitExceeded, "step limit " + std::to_string(options_.step_limit) + " in " + lot),
             position);
      }
      const Step step = def->steps[index];  // copy: a step may redefine the LoT
      run_step(lot, depth, index, step, position);
      if (!step.fork) {
        ++index;
        continue;
      }
      const Branch branch = take_fork(lot, depth, index, step, position);
      switch (branch.target) {
        case Branch::Target::Step: index = branch.step; break;
        case Branch::Target::Halt: return;
        case Branch::Target::Lot: run(branch.lot, depth + 1, position); return;
      }
    }
  }

 private:
  TraceEvent base(EventKind kind, const std::string& lot, std::size_t depth, std::optional<std::size_t> step) {
    TraceEvent e;
    e.kind = kind;
    e.tick = tick_;
    e.lot = lot;
    e.depth = depth;
    e.step = step;
    e.timestamp_ms = wall_ms();
    return e;
  }

  [[noreturn]] void fail(const std::string& lot, std::size_t depth, std::optional<std::size_t> step,
                         const std::string& subject, const Error& error, const std::string& position) {
    TraceEvent e = base(EventKind::Errored, lot, depth, step);
    e.subject = subject;
    e.action = std::string(to_string(error.code()));
    e.text = error.what();
    if (!position.empty()) e.details.push_back(position);
    trace_.append(std::move(e));
    trace_.errored = true;
    trace_.error = (position.empty() ? "" : position + ": ") + lot +
                   (step ? " step " + std::to_string(*step + 1) : std::string{}) + ": " + error.what();
    throw Aborted{};
  }

  void record(const std::string& lot, std::size_t depth, std::size_t step, const std::string& via,
              const OpResult& r) {
    for (const auto& f : r.fired) {
      TraceEvent e = base(EventKind::RuleFired, lot, depth, step);
      e.subject = f.rule;
      e.action = via;
      e.text = f.bindings_str();
      e.reads.assign(f.reads.begin(), f.reads.end());
      for (const auto& c : r.commands) {
        if (c.rule == f.rule) e.details.push_back(c.str());
      }
      trace_.append(std::move(e));
    }
    for (const auto& log : r.function_logs) {
      TraceEvent e = base(EventKind::FunctionLogged, lot, depth, step);
      e.subject = log.function;
      e.action = log.subject;
      e.text = log.output;
      trace_.append(std::move(e));
    }
    for (const auto& a : r.anomalies) {
      TraceEvent e = base(EventKind::PulseEmitted, lot, depth, step);
      e.subject = a.spec;
      e.action = "anomaly";
      e.text = a.path + " = " + format_number(a.value) + " outside " + a.bound + " " + format_number(a.limit);
      trace_.append(std::move(e));
    }
  }

  void record_pulse(const std::string& lot, std::size_t depth, std::size_t step, const Pulse& p) {
    TraceEvent e = base(EventKind::PulseEmitted, lot, depth, step);
    e.subject = p.source;
    e.action = p.path;
    e.details.push_back(p.old_value ? render(*p.old_value) : "unset");
    e.details.push_back(p.new_value ? render(*p.new_value) : "unset");
    trace_.append(std::move(e));
  }

  void settle(const std::string& lot, std::size_t depth, std::size_t step) {
    std::vector<Pulse> pulses = kb_.take_pulses();
    if (pulses.empty()) return;
    for (const auto& p : pulses) record_pulse(lot, depth, step, p);
    DispatchOptions opts;
    opts.depth_limit = options_.cascade_limit;
    DispatchResult d = dispatch(kb_, rt_, std::move(pulses), opts);
    for (const auto& run : d.runs) record(lot, depth, step, "attractor:" + run.ks + "." + run.responder, run.result);
    for (const auto& p : d.emitted) record_pulse(lot, depth, step, p);
  }

  void run_step(const std::string& lot, std::size_t depth, std::size_t index, const Step& step,
                const std::string& position) {
    ++tick_;
    kb_.set_tick(tick_);
    rt_.clock = tick_;
    TraceEvent start = base(EventKind::StepActivated, lot, depth, index);
    start.subject = step.target;
    start.action = step.name;
    start.input_digest = kb_.digest();
    if (!kb_.find_ks(step.target)) {
      trace_.append(std::move(start));
      fail(lot, depth, index, step.target, Error(ErrorCode::UnknownKS, step.target), position);
    }
    const KnowledgeSource& ks = kb_.ks(step.target);
    start.text = ks.explains ? render_explains(kb_, step.target, tick_, dimension_) : "activated " + step.target;
    trace_.append(std::move(start));

    OpResult result;
    try {
      KnowledgeBase::ActorScope actor(kb_, "lot:" + lot + "#" + std::to_string(index + 1));
      switch (step.action) {
        case Step::Action::None: break;
        case Step::Action::Responder: result = invoke_responder(kb_, rt_, step.target, step.name); break;
        case Step::Action::RuleSet: result = run_rule_set(kb_, rt_, step.name, step.target); break;
      }
      record(lot, depth, index, step.name, result);
      settle(lot, depth, index);
    } catch (const Error& e) {
      fail(lot, depth, index, step.target, e, position);
    }
    TraceEvent done = base(EventKind::StepCompleted, lot, depth, index);
    done.subject = step.target;
    done.action = step.name;
    done.output_digest = kb_.digest();
    for (const auto& c : result.commands) done.details.push_back(c.str());
    if (result.cycle_limit_reached) done.details.push_back("cycle limit reached");
    trace_.append(std::move(done));
  }

  Branch take_fork(const std::string& lot, std::size_t depth, std::size_t index, const Step& step,
                   const std::string& position) {
    const Fork& fork = *step.fork;
    std::size_t taken = fork.branches.size();
    std::string predicate;
    try {
      if (fork.kind == Fork::Kind::RuleSet) {
        KnowledgeBase::ActorScope actor(kb_, "lot:" + lot + "#" + std::to_string(index + 1) + ":fork");
        OpResult r = run_rule_set(kb_, rt_, fork.rule_set, step.target);
        record(lot, depth, index, fork.rule_set, r);
        settle(lot, depth, index);
        bool asserted = fact_present(fork.fact);
        predicate = fork.fact + (asserted ? " asserted" : " not asserted");
        taken = asserted ? 0 : 1;
      } else {
        EvalContext ctx;
        ctx.kb = &kb_;
        ctx.clock = tick_;
        ctx.roles["self"] = step.target;
        ctx.variables = &rt_.globals;
        ctx.dimension = dimension_;
        ctx.functions = rt_.functions;
        for (std::size_t i = 0; i < fork.branches.size(); ++i) {
          if (eval_condition(fork.branches[i].when, ctx)) {
            taken = i;
            predicate = fork.branches[i].when.empty() ? "otherwise" : fork.branches[i].when.text;
            break;
          }
        }
      }
    } catch (const Error& e) {
      fail(lot, depth, index, step.target,
           Error(ErrorCode::ForkPredicateError, "step " + std::to_string(index + 1) + ": " + e.what()), position);
    }
    if (taken >= fork.branches.size()) {
      fail(lot, depth, index, step.target,
           Error(ErrorCode::ForkPredicateError, "step " + std::to_string(index + 1) + ": no branch applies"),
           position);
    }
    TraceEvent e = base(EventKind::ForkTaken, lot, depth, index);
    e.subject = step.target;
    e.branch = fork.branches[taken].label;
    e.predicate = predicate;
    for (std::size_t i = 0; i < fork.branches.size(); ++i) {
      if (i != taken) e.details.push_back(fork.branches[i].label);
    }
    trace_.append(std::move(e));
    return fork.branches[taken];
  }

  bool fact_present(const std::string& fact) {
    WorkingMemory& wm = rt_.memory(kb_);
    if (fact.find('(') != std::string::npos) return wm.contains_key(fact);
    return !wm.by_relation(fact).empty();
  }

  KnowledgeBase& kb_;
  const LotOptions& options_;
  ReasoningTrace& trace_;
  Tick tick_;
  const Dimension* dimension_ = nullptr;
  Runtime rt_;
};

void finish(ReasoningTrace& trace) { trace.id = "trace-" + hash_hex(export_trace(trace, true)); }

ReasoningTrace start_trace(KnowledgeBase& kb, const std::vector<std::string>& lots, const Bindings& inputs,
                           Tick clock, const LotOptions& options) {
  for (const auto& l : lots) {
    if (!kb.find_lot(l)) throw Error(ErrorCode::UnknownLoT, l);
  }
  // Pulses queued before the run (e.g. while loading) are not part of it.
  kb.take_pulses();
  ReasoningTrace trace;
  trace.request = TraceRequest{lots, inputs, clock, options.dimension};
  if (options.keep_snapshot) trace.snapshot = std::make_shared<const KnowledgeBase>(kb.snapshot());
  return trace;
}

}  // namespace

ReasoningTrace run_lot(KnowledgeBase& kb, const std::string& lot, const Bindings& inputs, Tick clock,
                       const LotOptions& options) {
  return chain_lots(kb, {lot}, inputs, clock, options);
}

ReasoningTrace chain_lots(KnowledgeBase& kb, const std::vector<std::string>& lots, const Bindings& inputs,
                          Tick clock, const LotOptions& options) {
  ReasoningTrace trace = start_trace(kb, lots, inputs, clock, options);
  Executor exec(kb, options, trace, clock);
  try {
    for (std::size_t i = 0; i < lots.size(); ++i) {
      exec.run(lots[i], 0, lots.size() > 1 ? "sequence position " + std::to_string(i + 1) : std::string{});
    }
  } catch (const Aborted&) {
  }
  finish(trace);
  return trace;
}

ReasoningTrace replay_trace(const ReasoningTrace& trace, const LotOptions& options) {
  if (!trace.snapshot) throw Error(ErrorCode::InvalidArgument, "trace " + trace.id + " has no stored snapshot");
  KnowledgeBase kb = *trace.snapshot;
  LotOptions opts = options;
  opts.dimension = trace.request.dimension;
  return chain_lots(kb, trace.request.lots, trace.request.inputs, trace.request.clock, opts);
}

std::string render_explains(const KnowledgeBase& kb, const std::string& ks, Tick clock, const Dimension* dimension) {
  const KnowledgeSource& frame = kb.ks(ks);
  if (!frame.explains) return {};
  const std::string& text = *frame.explains;
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t open = text.find('{', i);
    if (open == std::string::npos) break;
    std::size_t close = text.find('}', open);
    if (close == std::string::npos) break;
    out.append(text, i, open - i);
    std::string path = text.substr(open + 1, close - open - 1);
    std::optional<Resolved> value;
    try {
      value = try_resolve_attribute(kb, ks, split_path(path, '.'), clock, ResolveOptions{false, dimension});
    } catch (const Error&) {
    }
    out += value ? render(value->value) : "{?" + path + "}";
    i = close + 1;
  }
  out.append(text, i, std::string::npos);
  return out;
}

std::uint64_t KLineWeights::weight(std::string_view path) const {
  auto it = weights_.find(path);
  return it == weights_.end() ? 0 : it->second;
}

void reinforce_kline(KLineWeights& weights, const ReasoningTrace& trace) {
  if (trace.errored) return;
  std::set<std::string> read;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::RuleFired) read.insert(e.reads.begin(), e.reads.end());
  }
  for (const auto& p : read) weights.add(p);
}

std::string select_kline(const KLineWeights& weights, const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "select_kline needs at least one candidate");
  const std::string* best = &candidates.front();
  for (const auto& c : candidates) {
    auto w = weights.weight(c);
    auto bw = weights.weight(*best);
    if (w > bw || (w == bw && c < *best)) best = &c;
  }
  return *best;
}

}  // namespace keraia
