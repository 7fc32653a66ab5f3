#include "keraia/trace.hpp"

#include <array>
#include <sstream>

#include "keraia/error.hpp"

namespace keraia {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kKinds{{
    {EventKind::StepActivated, "StepActivated"},
    {EventKind::StepCompleted, "StepCompleted"},
    {EventKind::RuleFired, "RuleFired"},
    {EventKind::ForkTaken, "ForkTaken"},
    {EventKind::PulseEmitted, "PulseEmitted"},
    {EventKind::FunctionLogged, "FunctionLogged"},
    {EventKind::Errored, "Errored"},
    {EventKind::JunctureLinked, "JunctureLinked"},
}};

Json string_array(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

std::vector<std::string> strings_from(const Json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key)) {
    for (const auto& s : j.at(key)) out.push_back(s.get<std::string>());
  }
  return out;
}

std::string str_or_empty(const Json& j, const char* key) {
  return j.contains(key) ? j.at(key).get<std::string>() : std::string{};
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "?";
}

EventKind parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown trace event kind '" + std::string(name) + "'");
}

void ReasoningTrace::append(TraceEvent e) {
  if (!events.empty() && e.tick < events.back().tick) e.tick = events.back().tick;
  events.push_back(std::move(e));
}

std::vector<std::string> ReasoningTrace::activations() const {
  std::vector<std::string> out;
  for (const auto& e : events) {
    if (e.kind == EventKind::StepActivated) out.push_back(e.subject);
  }
  return out;
}

std::optional<std::size_t> ReasoningTrace::first_fork(std::string_view lot) const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].kind == EventKind::ForkTaken && (lot.empty() || events[i].lot == lot)) return i;
  }
  return std::nullopt;
}

Json to_json(const TraceEvent& e, bool normalize) {
  Json j;
  j["kind"] = std::string(to_string(e.kind));
  j["tick"] = e.tick;
  j["lot"] = e.lot;
  j["depth"] = e.depth;
  if (e.step) j["step"] = *e.step;
  if (!e.subject.empty()) j["subject"] = e.subject;
  if (!e.action.empty()) j["action"] = e.action;
  if (!e.text.empty()) j["text"] = e.text;
  if (!e.input_digest.empty()) j["input_digest"] = e.input_digest;
  if (!e.output_digest.empty()) j["output_digest"] = e.output_digest;
  if (!e.reads.empty()) j["reads"] = string_array(e.reads);
  if (!e.details.empty()) j["details"] = string_array(e.details);
  if (!e.branch.empty()) j["branch"] = e.branch;
  if (!e.predicate.empty()) j["predicate"] = e.predicate;
  j["timestamp"] = normalize ? 0 : e.timestamp_ms;
  return j;
}

TraceEvent event_from_json(const Json& j) {
  TraceEvent e;
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.tick = j.at("tick").get<Tick>();
  e.lot = j.at("lot").get<std::string>();
  e.depth = j.at("depth").get<std::size_t>();
  if (j.contains("step")) e.step = j.at("step").get<std::size_t>();
  e.subject = str_or_empty(j, "subject");
  e.action = str_or_empty(j, "action");
  e.text = str_or_empty(j, "text");
  e.input_digest = str_or_empty(j, "input_digest");
  e.output_digest = str_or_empty(j, "output_digest");
  e.reads = strings_from(j, "reads");
  e.details = strings_from(j, "details");
  e.branch = str_or_empty(j, "branch");
  e.predicate = str_or_empty(j, "predicate");
  e.timestamp_ms = j.value("timestamp", std::int64_t{0});
  return e;
}

void export_trace(const ReasoningTrace& trace, std::ostream& out, bool normalize) {
  Json header;
  header["record"] = "trace";
  header["id"] = trace.id;
  header["lots"] = string_array(trace.request.lots);
  Json inputs = Json::object();
  for (const auto& [k, v] : trace.request.inputs) inputs[k] = to_json(v);
  header["inputs"] = inputs;
  header["clock"] = trace.request.clock;
  if (trace.request.dimension) header["dimension"] = *trace.request.dimension;
  header["errored"] = trace.errored;
  if (trace.errored) header["error"] = trace.error;
  header["events"] = trace.events.size();
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    Json j;
    j["record"] = "event";
    j["seq"] = i;
    j.update(to_json(trace.events[i], normalize));
    out << j.dump() << '\n';
  }
}

std::string export_trace(const ReasoningTrace& trace, bool normalize) {
  std::ostringstream out;
  export_trace(trace, out, normalize);
  return out.str();
}

ReasoningTrace import_trace(std::istream& in) {
  ReasoningTrace trace;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line);
    std::string record = j.at("record").get<std::string>();
    if (record == "trace") {
      header = true;
      trace.id = j.at("id").get<std::string>();
      trace.request.lots = strings_from(j, "lots");
      for (const auto& [k, v] : j.at("inputs").items()) trace.request.inputs[k] = slot_from_json(v);
      trace.request.clock = j.at("clock").get<Tick>();
      if (j.contains("dimension")) trace.request.dimension = j.at("dimension").get<std::string>();
      trace.errored = j.at("errored").get<bool>();
      trace.error = str_or_empty(j, "error");
    } else if (record == "event") {
      trace.events.push_back(event_from_json(j));
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown trace record '" + record + "'");
    }
  }
  if (!header) throw Error(ErrorCode::InvalidArgument, "trace has no header record");
  return trace;
}

std::string render_trace(const ReasoningTrace& trace) {
  std::ostringstream out;
  for (const auto& e : trace.events) {
    out << "[t=" << e.tick << "] " << std::string(e.depth * 2, ' ') << e.lot;
    if (e.step) out << '#' << (*e.step + 1);
    out << ' ' << to_string(e.kind);
    if (!e.subject.empty()) out << ' ' << e.subject;
    if (!e.action.empty()) out << " (" << e.action << ')';
    if (!e.branch.empty()) out << " -> '" << e.branch << "'";
    if (!e.text.empty()) out << ": " << e.text;
    for (const auto& d : e.details) out << " | " << d;
    out << '\n';
  }
  if (trace.errored) out << "errored: " << trace.error << '\n';
  return out.str();
}

bool same_event(const TraceEvent& a, const TraceEvent& b, bool with_digests) {
  TraceEvent x = a;
  TraceEvent y = b;
  x.timestamp_ms = y.timestamp_ms = 0;
  if (!with_digests) {
    x.input_digest = x.output_digest = y.input_digest = y.output_digest = {};
  }
  return x == y;
}

}  // namespace keraia
