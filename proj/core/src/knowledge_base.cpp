#include "keraia/knowledge_base.hpp"

#include <algorithm>
#include <chrono>

#include "keraia/error.hpp"
#include "keraia/json_io.hpp"

namespace keraia {

namespace {

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void validate_path(const SlotPath& path) {
  if (path.empty()) throw Error(ErrorCode::InvalidPath, "empty slot path");
  for (const auto& seg : path) {
    if (seg.empty()) throw Error(ErrorCode::InvalidPath, "empty segment in '" + join_path(path) + "'");
  }
}

}  // namespace

const ResponderBinding* KnowledgeSource::responder(std::string_view name) const {
  for (const auto& r : responders) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

std::string hash_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

void KnowledgeBase::ensure_unique_name(const std::string& name, bool is_cloud) const {
  if (is_cloud && ks_.count(name)) {
    throw Error(ErrorCode::AppellationConflict, "'" + name + "' already names a knowledge source");
  }
  if (!is_cloud && clouds_.count(name)) {
    throw Error(ErrorCode::AppellationConflict, "'" + name + "' already names a cloud");
  }
}

void KnowledgeBase::add_cloud(const std::string& name, const std::optional<std::string>& parent) {
  if (clouds_.count(name)) throw Error(ErrorCode::DuplicateAppellation, "cloud '" + name + "' already exists");
  ensure_unique_name(name, true);
  if (parent && !clouds_.count(*parent)) throw Error(ErrorCode::UnknownCloud, *parent);
  Cloud c;
  c.appellation = name;
  clouds_.emplace(name, std::move(c));
  if (parent) link_sub_cloud(*parent, name);
}

bool KnowledgeBase::cloud_reaches(const std::string& from, const std::string& to) const {
  if (from == to) return true;
  auto it = clouds_.find(from);
  if (it == clouds_.end()) return false;
  for (const auto& sub : it->second.sub_clouds) {
    if (cloud_reaches(sub, to)) return true;
  }
  return false;
}

void KnowledgeBase::link_sub_cloud(const std::string& parent, const std::string& child) {
  auto p = clouds_.find(parent);
  if (p == clouds_.end()) throw Error(ErrorCode::UnknownCloud, parent);
  auto c = clouds_.find(child);
  if (c == clouds_.end()) throw Error(ErrorCode::UnknownCloud, child);
  if (cloud_reaches(child, parent)) {
    throw Error(ErrorCode::CloudCycle, "linking '" + child + "' under '" + parent + "' creates a cycle");
  }
  p->second.sub_clouds.insert(child);
  c->second.parent = parent;
}

void KnowledgeBase::tag_cloud(const std::string& cloud, const std::string& dimension) {
  auto it = clouds_.find(cloud);
  if (it == clouds_.end()) throw Error(ErrorCode::UnknownCloud, cloud);
  it->second.dimension_tags.insert(dimension);
}

const Cloud* KnowledgeBase::find_cloud(std::string_view name) const {
  auto it = clouds_.find(name);
  return it == clouds_.end() ? nullptr : &it->second;
}

const Cloud& KnowledgeBase::cloud(std::string_view name) const {
  if (auto* c = find_cloud(name)) return *c;
  throw Error(ErrorCode::UnknownCloud, std::string(name));
}

std::vector<std::string> KnowledgeBase::members_within(std::string_view name) const {
  std::vector<std::string> out;
  const Cloud& c = cloud(name);
  out.insert(out.end(), c.members.begin(), c.members.end());
  for (const auto& sub : c.sub_clouds) {
    auto nested = members_within(sub);
    out.insert(out.end(), nested.begin(), nested.end());
  }
  return out;
}

void KnowledgeBase::log_mutation(const std::string& ks, std::uint64_t version, std::string path,
                                 std::optional<SlotValue> old_value, std::optional<SlotValue> new_value) {
  VersionEntry e;
  e.seq = version_log_.size() + 1;
  e.appellation = ks;
  e.version = version;
  e.path = path;
  e.old_value = old_value;
  e.new_value = new_value;
  e.tick = tick_;
  e.timestamp_ms = wall_clock_ms();
  e.actor = actor_;
  version_log_.push_back(std::move(e));
  pending_pulses_.push_back(Pulse{ks, std::move(path), std::move(old_value), std::move(new_value), tick_});
}

void KnowledgeBase::put_ks(KnowledgeSource ks, const std::string& cloud_name) {
  auto cit = clouds_.find(cloud_name);
  if (cit == clouds_.end()) throw Error(ErrorCode::UnknownCloud, cloud_name);
  ensure_unique_name(ks.appellation, false);
  if (!is_identifier(ks.appellation)) {
    throw Error(ErrorCode::InvalidArgument, "invalid appellation '" + ks.appellation + "'");
  }
  if (!ks.slots.is_map()) throw Error(ErrorCode::InvalidArgument, "slots of '" + ks.appellation + "' must be a map");
  for (const auto& a : ks.attractors) {
    if (!ks.responder(a.responder)) {
      throw Error(ErrorCode::UnknownResponder,
                  "attractor on '" + ks.appellation + "' references responder '" + a.responder + "'");
    }
  }

  auto existing = ks_.find(ks.appellation);
  if (existing == ks_.end()) {
    ks.version = 1;
    ks.owner_cloud = cloud_name;
    std::string name = ks.appellation;
    ks_.emplace(name, std::move(ks));
    cit->second.members.insert(name);
    return;
  }
  if (existing->second.owner_cloud != cloud_name) {
    throw Error(ErrorCode::AppellationConflict, "'" + ks.appellation + "' belongs to cloud '" +
                                                    existing->second.owner_cloud + "'");
  }
  SlotValue old_slots = existing->second.slots;
  ks.version = existing->second.version + 1;
  ks.owner_cloud = cloud_name;
  SlotValue new_slots = ks.slots;
  std::string name = ks.appellation;
  auto version = ks.version;
  existing->second = std::move(ks);
  log_mutation(name, version, "*", std::move(old_slots), std::move(new_slots));
}

void KnowledgeBase::set_slot(const std::string& ks_name, const SlotPath& path, SlotValue value) {
  auto it = ks_.find(ks_name);
  if (it == ks_.end()) throw Error(ErrorCode::UnknownKS, ks_name);
  validate_path(path);
  SlotValue* cur = &it->second.slots;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    SlotValue* next = cur->find(path[i]);
    if (!next) {
      next = &cur->put(path[i], SlotValue::map());
    } else if (!next->is_map()) {
      throw Error(ErrorCode::PathThroughScalar,
                  ks_name + "/" + join_path(path) + ": segment '" + path[i] + "' holds a " +
                      std::string(to_string(next->kind())));
    }
    cur = next;
  }
  std::optional<SlotValue> old_value;
  if (auto* prev = cur->find(path.back())) old_value = *prev;
  cur->put(path.back(), value);
  auto version = ++it->second.version;
  log_mutation(ks_name, version, join_path(path), std::move(old_value), std::move(value));
}

const KnowledgeSource* KnowledgeBase::find_ks(std::string_view name) const {
  auto it = ks_.find(name);
  return it == ks_.end() ? nullptr : &it->second;
}

const KnowledgeSource& KnowledgeBase::ks(std::string_view name) const {
  if (auto* k = find_ks(name)) return *k;
  throw Error(ErrorCode::UnknownKS, std::string(name));
}

const SlotValue* KnowledgeBase::slot(std::string_view ks_name, const SlotPath& path) const {
  const auto* k = find_ks(ks_name);
  if (!k) return nullptr;
  return lookup(k->slots, path);
}

void KnowledgeBase::add_drel(DRel drel) {
  if (drel.source_ks == drel.target_ks) {
    throw Error(ErrorCode::InvalidArgument, "DRel '" + drel.appellation + "' relates a KS to itself");
  }
  if (drel.shared_attributes.empty()) {
    throw Error(ErrorCode::InvalidArgument, "DRel '" + drel.appellation + "' shares no attributes");
  }
  for (const auto& d : drels_) {
    if (d.appellation == drel.appellation) {
      throw Error(ErrorCode::DuplicateAppellation, "DRel '" + drel.appellation + "'");
    }
  }
  drels_.push_back(std::move(drel));
}

void KnowledgeBase::add_dimension(Dimension dim) {
  auto name = dim.name;
  if (!dimensions_.emplace(name, std::move(dim)).second) {
    throw Error(ErrorCode::DuplicateAppellation, "dimension '" + name + "'");
  }
}

const Dimension* KnowledgeBase::find_dimension(std::string_view name) const {
  auto it = dimensions_.find(name);
  return it == dimensions_.end() ? nullptr : &it->second;
}

void KnowledgeBase::add_juncture(Juncture j) {
  if (j.member_dimensions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "juncture '" + j.name + "' references no dimension");
  }
  auto name = j.name;
  if (!junctures_.emplace(name, std::move(j)).second) {
    throw Error(ErrorCode::DuplicateAppellation, "juncture '" + name + "'");
  }
}

void KnowledgeBase::link_juncture_lot(const std::string& juncture, const std::string& lot) {
  auto it = junctures_.find(juncture);
  if (it == junctures_.end()) throw Error(ErrorCode::UnresolvedReference, "juncture '" + juncture + "'");
  it->second.linked_lots.insert(lot);
}

const Juncture* KnowledgeBase::find_juncture(std::string_view name) const {
  auto it = junctures_.find(name);
  return it == junctures_.end() ? nullptr : &it->second;
}

void KnowledgeBase::add_lot(LineOfThought lot) {
  if (lot.steps.empty()) throw Error(ErrorCode::InvalidArgument, "LoT '" + lot.name + "' has no steps");
  auto name = lot.name;
  if (!lots_.emplace(name, std::move(lot)).second) {
    throw Error(ErrorCode::DuplicateAppellation, "LoT '" + name + "'");
  }
}

const LineOfThought* KnowledgeBase::find_lot(std::string_view name) const {
  auto it = lots_.find(name);
  return it == lots_.end() ? nullptr : &it->second;
}

void KnowledgeBase::add_rule(Rule rule) { rules_.push_back(std::move(rule)); }

std::vector<Rule> KnowledgeBase::rules_in(std::string_view rule_set) const {
  std::vector<Rule> out;
  for (const auto& r : rules_) {
    if (r.rule_set == rule_set) out.push_back(r);
  }
  return out;
}

void KnowledgeBase::add_template(GppbTemplate tpl) {
  auto name = tpl.name;
  if (!templates_.emplace(name, std::move(tpl)).second) {
    throw Error(ErrorCode::DuplicateAppellation, "template '" + name + "'");
  }
}

const GppbTemplate* KnowledgeBase::find_template(std::string_view name) const {
  auto it = templates_.find(name);
  return it == templates_.end() ? nullptr : &it->second;
}

void KnowledgeBase::add_anomaly_spec(AnomalySpec spec) { anomaly_specs_.push_back(std::move(spec)); }

void KnowledgeBase::add_plan(ElaborationPlan plan) {
  auto name = plan.name;
  if (!plans_.emplace(name, std::move(plan)).second) {
    throw Error(ErrorCode::DuplicateAppellation, "elaboration plan '" + name + "'");
  }
}

const ElaborationPlan* KnowledgeBase::find_plan(std::string_view name) const {
  auto it = plans_.find(name);
  return it == plans_.end() ? nullptr : &it->second;
}

std::vector<Pulse> KnowledgeBase::take_pulses() {
  std::vector<Pulse> out;
  out.swap(pending_pulses_);
  return out;
}

std::string KnowledgeBase::digest() const {
  std::string buf;
  for (const auto& [name, c] : clouds_) {
    buf += "C:" + name + "|" + c.parent.value_or("") + "|";
    for (const auto& m : c.members) buf += m + ",";
    buf += "|";
    for (const auto& s : c.sub_clouds) buf += s + ",";
    buf += "|";
    for (const auto& t : c.dimension_tags) buf += t + ",";
    buf += "\n";
  }
  for (const auto& [name, k] : ks_) {
    buf += "K:" + name + "|" + k.owner_cloud + "|" + std::to_string(k.version) + "|" + canonical(k.slots) + "|";
    for (const auto& r : k.responders) buf += r.name + "=" + r.operation + canonical(SlotValue(r.params)) + ",";
    buf += "|";
    for (const auto& a : k.attractors) buf += a.condition.text + "->" + a.responder + "@" + a.watch + ",";
    buf += "|" + k.explains.value_or("") + "\n";
  }
  for (const auto& d : drels_) {
    buf += "D:" + d.appellation + "|" + d.source_ks + "|" + d.target_ks + "|" + d.condition.text + "|" +
           std::to_string(d.priority) + "|";
    for (const auto& s : d.shared_attributes) buf += s + ",";
    buf += "\n";
  }
  for (const auto& [name, d] : dimensions_) {
    buf += "M:" + name + "|" + d.parent_juncture.value_or("") + "|";
    for (const auto& a : d.assumptions) buf += a.path + "=" + canonical(a.value) + ",";
    buf += "\n";
  }
  for (const auto& [name, j] : junctures_) {
    buf += "J:" + name + "|";
    for (const auto& d : j.member_dimensions) buf += d + ",";
    buf += "|";
    for (const auto& l : j.linked_lots) buf += l + ",";
    buf += "\n";
  }
  return hash_hex(buf);
}

std::string KnowledgeBase::cloud_digest(std::string_view name) const {
  const Cloud& c = cloud(name);
  std::string buf = c.appellation + "|";
  for (const auto& m : c.members) buf += m + "@" + std::to_string(ks(m).version) + ",";
  buf += "|";
  for (const auto& s : c.sub_clouds) buf += s + ",";
  buf += "|";
  for (const auto& t : c.dimension_tags) buf += t + ",";
  return hash_hex(buf);
}

void export_version_log(const KnowledgeBase& kb, std::ostream& out, bool normalize) {
  for (const auto& e : kb.version_log()) {
    Json j;
    j["record"] = "version";
    j["seq"] = e.seq;
    j["appellation"] = e.appellation;
    j["version"] = e.version;
    j["path"] = e.path;
    j["old"] = to_json(e.old_value);
    j["new"] = to_json(e.new_value);
    j["tick"] = e.tick;
    j["timestamp"] = normalize ? 0 : e.timestamp_ms;
    j["actor"] = e.actor;
    out << j.dump() << '\n';
  }
}

}  // namespace keraia
