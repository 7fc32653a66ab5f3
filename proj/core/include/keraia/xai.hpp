#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "keraia/lot.hpp"

namespace keraia {

// One line per StepActivated, RuleFired and ForkTaken event.
std::string narrative(const ReasoningTrace& trace);

struct Modification {
  std::string path;  // KLine path
  SlotValue value;
};

struct AppliedModification {
  std::string path;
  std::optional<SlotValue> old_value;
  SlotValue new_value;
};

struct SlotDifference {
  std::string path;  // "KS/slot/path"
  std::optional<SlotValue> baseline;
  std::optional<SlotValue> variant;
};

struct WhatIfReport {
  ReasoningTrace baseline;
  ReasoningTrace variant;
  std::vector<AppliedModification> modifications;
  std::optional<std::size_t> divergence;  // first differing event index
  std::vector<SlotDifference> outcome_diff;
};

// Runs `lots` on two snapshots of `kb`, the second with `modifications`
// applied first, and compares them. `kb` is not modified.
WhatIfReport what_if(const KnowledgeBase& kb, const std::vector<std::string>& lots, const Bindings& inputs,
                     const std::vector<Modification>& modifications, Tick clock = 0, const LotOptions& options = {});

// First index where the normalized event streams differ (digests and wall
// timestamps excluded), or nullopt when they are identical.
std::optional<std::size_t> divergence_point(const ReasoningTrace& a, const ReasoningTrace& b);

// Leaf-level slot differences between two knowledge bases.
std::vector<SlotDifference> diff_state(const KnowledgeBase& a, const KnowledgeBase& b);

void export_what_if(const WhatIfReport& report, std::ostream& out, bool normalize = false);

// Version log entries for `ks`, oldest first, optionally limited to `path`
// and everything below it. Throws UnknownKS.
std::vector<VersionEntry> history(const KnowledgeBase& kb, const std::string& ks,
                                  const std::optional<std::string>& path = std::nullopt);

// Applies the version log entries of `later` recorded after `base` to a copy
// of `base`. With a complete log the result matches `later` slot for slot.
// Frames created after `base` are not logged: UnknownKS.
KnowledgeBase replay_version_log(const KnowledgeBase& base, const KnowledgeBase& later);

// Function log entries, optionally filtered by function name and subject KS.
std::vector<FunctionLogEntry> function_log(const KnowledgeBase& kb, const std::optional<std::string>& function = {},
                                           const std::optional<std::string>& subject = {});

}  // namespace keraia
