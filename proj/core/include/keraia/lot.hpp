#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "keraia/operations.hpp"
#include "keraia/trace.hpp"

namespace keraia {

struct LotOptions {
  const OperationRegistry* operations = nullptr;
  const FunctionRegistry* functions = nullptr;
  const TransformationRegistry* transformations = nullptr;
  std::optional<std::string> dimension;  // applied to every evaluation
  std::size_t depth_limit = 16;          // nested LoTs started by forks
  std::size_t step_limit = 10000;        // per LoT, guards step-jump loops
  std::size_t cascade_limit = 8;         // attractor waves after each step
  std::size_t max_cycles = 1000;
  bool keep_snapshot = true;
};

// Runs `lot` against `kb`. Steps activate in order; each records input and
// output digests, fired rules, pulses and function logs. A fork either jumps
// to a step, halts, or hands control to another LoT (nested one level
// deeper). A failing step appends an Errored event and ends the whole run.
// Throws UnknownLoT before starting when `lot` is not defined.
ReasoningTrace run_lot(KnowledgeBase& kb, const std::string& lot, const Bindings& inputs = {}, Tick clock = 0,
                       const LotOptions& options = {});

// Runs the LoTs in order over the same kb and working memory, producing one
// trace. Stops at the first error.
ReasoningTrace chain_lots(KnowledgeBase& kb, const std::vector<std::string>& lots, const Bindings& inputs = {},
                          Tick clock = 0, const LotOptions& options = {});

// Re-runs the trace's request on a copy of its stored snapshot.
ReasoningTrace replay_trace(const ReasoningTrace& trace, const LotOptions& options = {});

// `{slot.path}` placeholders resolved against `ks` (inheritance and
// dimension assumptions apply). Unresolvable placeholders become `{?path}`.
std::string render_explains(const KnowledgeBase& kb, const std::string& ks, Tick clock = 0,
                            const Dimension* dimension = nullptr);

// --- KLine reinforcement ---

class KLineWeights {
 public:
  std::uint64_t weight(std::string_view path) const;
  void add(const std::string& path, std::uint64_t amount = 1) { weights_[path] += amount; }
  const std::map<std::string, std::uint64_t, std::less<>>& all() const { return weights_; }

 private:
  std::map<std::string, std::uint64_t, std::less<>> weights_;
};

// +1 for each distinct path read by the trace's fired rules. Errored traces
// leave the weights unchanged.
void reinforce_kline(KLineWeights& weights, const ReasoningTrace& trace);

// Highest weight; ties go to the lexicographically smallest path. Throws
// EmptyCandidates.
std::string select_kline(const KLineWeights& weights, const std::vector<std::string>& candidates);

}  // namespace keraia
