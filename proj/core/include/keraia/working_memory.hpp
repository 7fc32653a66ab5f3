#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "keraia/knowledge_base.hpp"

namespace keraia {

// Tuple fact such as IsAdjacent(Siam, Indonesia). `origin` names the rule
// (or caller) that asserted it.
struct Fact {
  std::string relation;
  std::vector<SlotValue> args;
  std::string origin;

  std::string key() const;
  std::string str() const;
};

// Identity key of a single value inside a fact: text and references share
// one namespace, numbers ignore units.
std::string fact_term_key(const SlotValue& value);

// Flat (ks, path, value) projection of the knowledge base plus transient
// tuple facts. The projection is refreshed per KS after committed mutations.
class WorkingMemory {
 public:
  struct ObjectView {
    std::string type;
    std::vector<std::pair<std::string, SlotValue>> slots;  // flattened paths
  };

  // Rebuilds the projection from scratch; tuple facts are kept.
  void sync(const KnowledgeBase& kb);
  void refresh(const KnowledgeBase& kb, const std::string& ks);

  const std::map<std::string, ObjectView>& objects() const { return objects_; }
  // Appellations whose `type` slot equals `type` (all when empty), ascending.
  const std::vector<std::string>& objects_of_type(const std::string& type) const;

  bool assert_fact(Fact fact);  // false if an identical fact is present
  bool retract(const std::string& relation, const std::vector<SlotValue>& args);
  void retract_relation(const std::string& relation);
  bool contains(const std::string& relation, const std::vector<SlotValue>& args) const;
  bool contains_key(const std::string& key) const { return index_.count(key) > 0; }

  // Live facts in assertion order.
  std::vector<const Fact*> facts() const;
  const std::vector<std::size_t>& by_relation(const std::string& relation) const;
  const std::vector<std::size_t>& by_first(const std::string& relation, const SlotValue& first) const;
  const Fact& fact_at(std::size_t i) const { return facts_[i]; }
  bool live(std::size_t i) const { return alive_[i]; }

  std::size_t fact_count() const { return index_.size(); }

 private:
  void rebuild_type_index() const;
  void compact();

  std::map<std::string, ObjectView> objects_;
  mutable std::map<std::string, std::vector<std::string>> types_;
  mutable bool types_dirty_ = true;

  std::vector<Fact> facts_;
  std::vector<bool> alive_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_relation_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
};

}  // namespace keraia
