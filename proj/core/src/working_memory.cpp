#include "keraia/working_memory.hpp"

#include <algorithm>

namespace keraia {

namespace {

const std::vector<std::size_t> kNoFacts;
const std::vector<std::string> kNoObjects;

std::string type_of(const KnowledgeSource& ks) {
  const SlotValue* t = ks.slots.find("type");
  if (t && t->symbol()) return std::string(*t->symbol());
  return {};
}

}  // namespace

std::string fact_term_key(const SlotValue& value) {
  if (auto s = value.symbol()) return "'" + std::string(*s);
  if (value.is_number()) return "#" + format_number(value.number());
  return canonical(value);
}

std::string Fact::key() const {
  std::string k = relation + "(";
  for (std::size_t i = 0; i < args.size(); ++i) k += (i ? "," : "") + fact_term_key(args[i]);
  return k + ")";
}

std::string Fact::str() const {
  std::string s = relation + "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + render(args[i]);
  return s + ")";
}

void WorkingMemory::sync(const KnowledgeBase& kb) {
  objects_.clear();
  for (const auto& [name, ks] : kb.knowledge_sources()) refresh(kb, name);
}

void WorkingMemory::refresh(const KnowledgeBase& kb, const std::string& name) {
  const KnowledgeSource* ks = kb.find_ks(name);
  if (!ks) {
    if (objects_.erase(name)) types_dirty_ = true;
    return;
  }
  ObjectView view;
  view.type = type_of(*ks);
  flatten(ks->slots, "", view.slots);
  auto it = objects_.find(name);
  if (it == objects_.end() || it->second.type != view.type) types_dirty_ = true;
  objects_[name] = std::move(view);
}

void WorkingMemory::rebuild_type_index() const {
  types_.clear();
  auto& all = types_[""];
  for (const auto& [name, view] : objects_) {
    all.push_back(name);
    if (!view.type.empty()) types_[view.type].push_back(name);
  }
  types_dirty_ = false;
}

const std::vector<std::string>& WorkingMemory::objects_of_type(const std::string& type) const {
  if (types_dirty_) rebuild_type_index();
  auto it = types_.find(type);
  return it == types_.end() ? kNoObjects : it->second;
}

bool WorkingMemory::assert_fact(Fact fact) {
  std::string k = fact.key();
  if (index_.count(k)) return false;
  std::size_t i = facts_.size();
  index_.emplace(k, i);
  by_relation_[fact.relation].push_back(i);
  if (!fact.args.empty()) by_first_[fact.relation + "|" + fact_term_key(fact.args[0])].push_back(i);
  facts_.push_back(std::move(fact));
  alive_.push_back(true);
  return true;
}

bool WorkingMemory::retract(const std::string& relation, const std::vector<SlotValue>& args) {
  Fact probe{relation, args, {}};
  auto it = index_.find(probe.key());
  if (it == index_.end()) return false;
  alive_[it->second] = false;
  index_.erase(it);
  return true;
}

void WorkingMemory::retract_relation(const std::string& relation) {
  auto it = by_relation_.find(relation);
  if (it == by_relation_.end()) return;
  for (std::size_t i : it->second) {
    if (alive_[i]) {
      alive_[i] = false;
      index_.erase(facts_[i].key());
    }
  }
  if (index_.size() * 2 < facts_.size()) compact();
}

void WorkingMemory::compact() {
  std::vector<Fact> live;
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    if (alive_[i]) live.push_back(std::move(facts_[i]));
  }
  facts_.clear();
  alive_.clear();
  index_.clear();
  by_relation_.clear();
  by_first_.clear();
  for (auto& f : live) assert_fact(std::move(f));
}

bool WorkingMemory::contains(const std::string& relation, const std::vector<SlotValue>& args) const {
  return index_.count(Fact{relation, args, {}}.key()) > 0;
}

std::vector<const Fact*> WorkingMemory::facts() const {
  std::vector<const Fact*> out;
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    if (alive_[i]) out.push_back(&facts_[i]);
  }
  return out;
}

const std::vector<std::size_t>& WorkingMemory::by_relation(const std::string& relation) const {
  auto it = by_relation_.find(relation);
  return it == by_relation_.end() ? kNoFacts : it->second;
}

const std::vector<std::size_t>& WorkingMemory::by_first(const std::string& relation, const SlotValue& first) const {
  auto it = by_first_.find(relation + "|" + fact_term_key(first));
  return it == by_first_.end() ? kNoFacts : it->second;
}

}  // namespace keraia
