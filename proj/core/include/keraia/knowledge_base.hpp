#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "keraia/model.hpp"

namespace keraia {

// One execution of a transformation function or responder, kept for audit
// and replay.
struct FunctionLogEntry {
  std::string function;
  std::string subject;  // source KS
  std::string output;   // produced KS, if any
  SlotMap inputs;
  SlotMap outputs;
  Tick tick = 0;
};

struct TemplateRun {
  std::string template_name;
  std::vector<std::string> generated;
  Tick tick = 0;
};

// Aggregate root for one reasoning session. Copying a KnowledgeBase is a deep
// snapshot; nothing is shared between copies.
class KnowledgeBase {
 public:
  // --- clouds ---
  void add_cloud(const std::string& name, const std::optional<std::string>& parent = std::nullopt);
  void link_sub_cloud(const std::string& parent, const std::string& child);
  void tag_cloud(const std::string& cloud, const std::string& dimension);
  const Cloud* find_cloud(std::string_view name) const;
  const Cloud& cloud(std::string_view name) const;
  const std::map<std::string, Cloud, std::less<>>& clouds() const { return clouds_; }
  // Members of `cloud` and every cloud it transitively contains.
  std::vector<std::string> members_within(std::string_view cloud) const;

  // --- knowledge sources ---
  void put_ks(KnowledgeSource ks, const std::string& cloud);
  void set_slot(const std::string& ks, const SlotPath& path, SlotValue value);
  void set_slot(const std::string& ks, std::string_view path, SlotValue value) {
    set_slot(ks, split_path(path), std::move(value));
  }
  const KnowledgeSource* find_ks(std::string_view name) const;
  const KnowledgeSource& ks(std::string_view name) const;
  const std::map<std::string, KnowledgeSource, std::less<>>& knowledge_sources() const { return ks_; }
  // Local slot value, or nullptr.
  const SlotValue* slot(std::string_view ks, const SlotPath& path) const;

  // --- relations, dimensions, definitions ---
  void add_drel(DRel drel);
  const std::vector<DRel>& drels() const { return drels_; }

  void add_dimension(Dimension dim);
  const Dimension* find_dimension(std::string_view name) const;
  const std::map<std::string, Dimension, std::less<>>& dimensions() const { return dimensions_; }

  void add_juncture(Juncture j);
  void link_juncture_lot(const std::string& juncture, const std::string& lot);
  const Juncture* find_juncture(std::string_view name) const;
  const std::map<std::string, Juncture, std::less<>>& junctures() const { return junctures_; }

  void add_lot(LineOfThought lot);
  const LineOfThought* find_lot(std::string_view name) const;
  const std::map<std::string, LineOfThought, std::less<>>& lots() const { return lots_; }

  void add_rule(Rule rule);
  std::vector<Rule> rules_in(std::string_view rule_set) const;
  const std::vector<Rule>& rules() const { return rules_; }

  void add_template(GppbTemplate tpl);
  const GppbTemplate* find_template(std::string_view name) const;
  const std::map<std::string, GppbTemplate, std::less<>>& templates() const { return templates_; }

  void add_anomaly_spec(AnomalySpec spec);
  const std::vector<AnomalySpec>& anomaly_specs() const { return anomaly_specs_; }

  void add_plan(ElaborationPlan plan);
  const ElaborationPlan* find_plan(std::string_view name) const;
  const std::map<std::string, ElaborationPlan, std::less<>>& plans() const { return plans_; }

  // --- audit ---
  const std::vector<VersionEntry>& version_log() const { return version_log_; }
  std::vector<Pulse> take_pulses();
  bool has_pending_pulses() const { return !pending_pulses_.empty(); }

  void append_function_log(FunctionLogEntry entry) { function_log_.push_back(std::move(entry)); }
  const std::vector<FunctionLogEntry>& function_log() const { return function_log_; }

  std::uint64_t next_template_counter(const std::string& tpl) { return ++template_counters_[tpl]; }
  void append_template_run(TemplateRun run) { template_runs_.push_back(std::move(run)); }
  const std::vector<TemplateRun>& template_runs() const { return template_runs_; }

  // Logical time stamped onto mutations and pulses.
  Tick tick() const { return tick_; }
  void set_tick(Tick t) { tick_ = t; }

  const std::string& actor() const { return actor_; }

  // Restores the previous actor on destruction.
  class ActorScope {
   public:
    ActorScope(KnowledgeBase& kb, std::string actor) : kb_(kb), previous_(std::move(kb.actor_)) {
      kb_.actor_ = std::move(actor);
    }
    ~ActorScope() { kb_.actor_ = std::move(previous_); }
    ActorScope(const ActorScope&) = delete;
    ActorScope& operator=(const ActorScope&) = delete;

   private:
    KnowledgeBase& kb_;
    std::string previous_;
  };

  // Content hash over clouds, knowledge sources (with versions), relations,
  // dimensions and junctures. Logs and definitions are excluded.
  std::string digest() const;
  std::string cloud_digest(std::string_view cloud) const;

  KnowledgeBase snapshot() const { return *this; }

 private:
  void ensure_unique_name(const std::string& name, bool is_cloud) const;
  bool cloud_reaches(const std::string& from, const std::string& to) const;
  void log_mutation(const std::string& ks, std::uint64_t version, std::string path,
                    std::optional<SlotValue> old_value, std::optional<SlotValue> new_value);

  std::map<std::string, Cloud, std::less<>> clouds_;
  std::map<std::string, KnowledgeSource, std::less<>> ks_;
  std::vector<DRel> drels_;
  std::map<std::string, Dimension, std::less<>> dimensions_;
  std::map<std::string, Juncture, std::less<>> junctures_;
  std::map<std::string, LineOfThought, std::less<>> lots_;
  std::vector<Rule> rules_;
  std::map<std::string, GppbTemplate, std::less<>> templates_;
  std::vector<AnomalySpec> anomaly_specs_;
  std::map<std::string, ElaborationPlan, std::less<>> plans_;

  std::vector<VersionEntry> version_log_;
  std::vector<Pulse> pending_pulses_;
  std::vector<FunctionLogEntry> function_log_;
  std::map<std::string, std::uint64_t> template_counters_;
  std::vector<TemplateRun> template_runs_;
  Tick tick_ = 0;
  std::string actor_ = "session";
};

std::string hash_hex(std::string_view data);

// Line-delimited JSON, one mutation per line. With `normalize`, wall-clock
// timestamps are written as 0.
void export_version_log(const KnowledgeBase& kb, std::ostream& out, bool normalize = false);

}  // namespace keraia
