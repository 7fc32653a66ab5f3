#include "keraia/xai.hpp"

#include <map>
#include <sstream>

#include "keraia/error.hpp"
#include "keraia/kline.hpp"

namespace keraia {

namespace {

void flatten(const std::string& prefix, const SlotValue& v, std::map<std::string, SlotValue>& out) {
  if (v.is_map() && !v.entries().empty()) {
    for (const auto& e : v.entries()) flatten(prefix + "/" + e.name, e.value, out);
    return;
  }
  out[prefix] = v;
}

std::map<std::string, SlotValue> leaves(const KnowledgeBase& kb) {
  std::map<std::string, SlotValue> out;
  for (const auto& [name, ks] : kb.knowledge_sources()) {
    for (const auto& e : ks.slots.entries()) flatten(name + "/" + e.name, e.value, out);
  }
  return out;
}

Json opt_json(const std::optional<SlotValue>& v) { return to_json(v); }

}  // namespace

std::string narrative(const ReasoningTrace& trace) {
  std::ostringstream out;
  for (const auto& e : trace.events) {
    switch (e.kind) {
      case EventKind::StepActivated:
        out << "[t=" << e.tick << "] " << e.subject << ": " << e.text << '\n';
        break;
      case EventKind::RuleFired:
        out << "[t=" << e.tick << "] rule " << e.subject << " fired";
        if (!e.text.empty()) out << " with " << e.text;
        for (const auto& d : e.details) out << "; " << d;
        out << '\n';
        break;
      case EventKind::ForkTaken: {
        out << "[t=" << e.tick << "] " << e.subject << " fork: took '" << e.branch << "'";
        if (!e.details.empty()) {
          out << "; not taken: ";
          for (std::size_t i = 0; i < e.details.size(); ++i) out << (i ? ", '" : "'") << e.details[i] << "'";
        }
        out << '\n';
        break;
      }
      default: break;
    }
  }
  return out.str();
}

std::optional<std::size_t> divergence_point(const ReasoningTrace& a, const ReasoningTrace& b) {
  std::size_t n = std::min(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!same_event(a.events[i], b.events[i], false)) return i;
  }
  if (a.events.size() != b.events.size()) return n;
  return std::nullopt;
}

std::vector<SlotDifference> diff_state(const KnowledgeBase& a, const KnowledgeBase& b) {
  auto la = leaves(a);
  auto lb = leaves(b);
  std::vector<SlotDifference> out;
  auto ia = la.begin();
  auto ib = lb.begin();
  while (ia != la.end() || ib != lb.end()) {
    if (ib == lb.end() || (ia != la.end() && ia->first < ib->first)) {
      out.push_back({ia->first, ia->second, std::nullopt});
      ++ia;
    } else if (ia == la.end() || ib->first < ia->first) {
      out.push_back({ib->first, std::nullopt, ib->second});
      ++ib;
    } else {
      if (!(ia->second == ib->second)) out.push_back({ia->first, ia->second, ib->second});
      ++ia;
      ++ib;
    }
  }
  return out;
}

WhatIfReport what_if(const KnowledgeBase& kb, const std::vector<std::string>& lots, const Bindings& inputs,
                     const std::vector<Modification>& modifications, Tick clock, const LotOptions& options) {
  WhatIfReport report;
  KnowledgeBase base = kb.snapshot();
  KnowledgeBase variant = kb.snapshot();
  {
    KnowledgeBase::ActorScope actor(variant, "what-if");
    for (const auto& m : modifications) {
      SlotAddress addr = locate(variant, KLinePath::parse(m.path));
      const SlotValue* old = variant.slot(addr.ks, addr.path);
      report.modifications.push_back({m.path, old ? std::optional<SlotValue>(*old) : std::nullopt, m.value});
      variant.set_slot(addr.ks, addr.path, m.value);
    }
  }
  auto label = [](const char* arm, const Error& e) { return Error(e.code(), std::string(arm) + ": " + e.what()); };
  try {
    report.baseline = chain_lots(base, lots, inputs, clock, options);
  } catch (const Error& e) {
    throw label("baseline", e);
  }
  try {
    report.variant = chain_lots(variant, lots, inputs, clock, options);
  } catch (const Error& e) {
    throw label("variant", e);
  }
  report.divergence = divergence_point(report.baseline, report.variant);
  report.outcome_diff = diff_state(base, variant);
  return report;
}

void export_what_if(const WhatIfReport& report, std::ostream& out, bool normalize) {
  Json header;
  header["record"] = "what_if";
  header["baseline"] = report.baseline.id;
  header["variant"] = report.variant.id;
  Json mods = Json::array();
  for (const auto& m : report.modifications) {
    mods.push_back(Json{{"path", m.path}, {"old", opt_json(m.old_value)}, {"new", to_json(m.new_value)}});
  }
  header["modifications"] = mods;
  header["divergence"] = report.divergence ? Json(*report.divergence) : Json("none");
  Json diff = Json::array();
  for (const auto& d : report.outcome_diff) {
    diff.push_back(Json{{"path", d.path}, {"baseline", opt_json(d.baseline)}, {"variant", opt_json(d.variant)}});
  }
  header["outcome_diff"] = diff;
  out << header.dump() << '\n';
  export_trace(report.baseline, out, normalize);
  export_trace(report.variant, out, normalize);
}

KnowledgeBase replay_version_log(const KnowledgeBase& base, const KnowledgeBase& later) {
  KnowledgeBase out = base;
  const auto& log = later.version_log();
  KnowledgeBase::ActorScope actor(out, "replay");
  for (std::size_t i = base.version_log().size(); i < log.size(); ++i) {
    const VersionEntry& e = log[i];
    if (!e.new_value) throw Error(ErrorCode::InvalidArgument, "version entry " + std::to_string(e.seq) + " has no value");
    if (e.path == "*") {
      KnowledgeSource ks = out.ks(e.appellation);
      ks.slots = *e.new_value;
      std::string cloud = ks.owner_cloud;
      out.put_ks(std::move(ks), cloud);
    } else {
      out.set_slot(e.appellation, e.path, *e.new_value);
    }
  }
  out.take_pulses();
  return out;
}

std::vector<VersionEntry> history(const KnowledgeBase& kb, const std::string& ks,
                                  const std::optional<std::string>& path) {
  if (!kb.find_ks(ks)) throw Error(ErrorCode::UnknownKS, ks);
  std::vector<VersionEntry> out;
  for (const auto& e : kb.version_log()) {
    if (e.appellation != ks) continue;
    if (path && e.path != "*" && e.path != *path && e.path.rfind(*path + "/", 0) != 0) continue;
    out.push_back(e);
  }
  return out;
}

std::vector<FunctionLogEntry> function_log(const KnowledgeBase& kb, const std::optional<std::string>& function,
                                           const std::optional<std::string>& subject) {
  std::vector<FunctionLogEntry> out;
  for (const auto& e : kb.function_log()) {
    if (function && e.function != *function) continue;
    if (subject && e.subject != *subject) continue;
    out.push_back(e);
  }
  return out;
}

}  // namespace keraia
