#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "keraia/json_io.hpp"
#include "keraia/knowledge_base.hpp"
#include "keraia/rules.hpp"

namespace keraia {

enum class EventKind {
  StepActivated,
  StepCompleted,
  RuleFired,
  ForkTaken,
  PulseEmitted,
  FunctionLogged,
  Errored,
  JunctureLinked,
};

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view name);

// Flat event record. Fields not meaningful for a kind stay empty.
struct TraceEvent {
  EventKind kind = EventKind::StepActivated;
  Tick tick = 0;
  std::string lot;
  std::size_t depth = 0;  // nesting level of `lot`
  std::optional<std::size_t> step;
  std::string subject;  // KS, rule, function or juncture name
  std::string action;   // responder / rule set / operation name
  std::string text;     // rendered explains, bindings or error message
  std::string input_digest;
  std::string output_digest;
  std::vector<std::string> reads;    // RuleFired: KLine paths read
  std::vector<std::string> details;  // commands, untaken branches, pulse values
  std::string branch;                // ForkTaken
  std::string predicate;             // ForkTaken: recorded predicate value
  std::int64_t timestamp_ms = 0;     // wall clock, stripped on normalization

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// What was asked for, so the run can be repeated against a snapshot.
struct TraceRequest {
  std::vector<std::string> lots;
  Bindings inputs;
  Tick clock = 0;
  std::optional<std::string> dimension;
};

struct ReasoningTrace {
  std::string id;
  TraceRequest request;
  std::vector<TraceEvent> events;
  bool errored = false;
  std::string error;
  std::shared_ptr<const KnowledgeBase> snapshot;  // kb before the run

  void append(TraceEvent e);
  // KS subjects of StepActivated events, in order.
  std::vector<std::string> activations() const;
  // Index of the first ForkTaken event, if any, in lot `lot` (any lot when empty).
  std::optional<std::size_t> first_fork(std::string_view lot = {}) const;
};

Json to_json(const TraceEvent& e, bool normalize = false);
TraceEvent event_from_json(const Json& j);

// Line-delimited: a header record then one record per event.
void export_trace(const ReasoningTrace& trace, std::ostream& out, bool normalize = false);
std::string export_trace(const ReasoningTrace& trace, bool normalize = false);
ReasoningTrace import_trace(std::istream& in);

// Plain text, one line per event.
std::string render_trace(const ReasoningTrace& trace);

// Event equality ignoring wall-clock timestamps and, when `with_digests` is
// false, state digests.
bool same_event(const TraceEvent& a, const TraceEvent& b, bool with_digests);

}  // namespace keraia
