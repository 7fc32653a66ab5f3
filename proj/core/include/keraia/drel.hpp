#pragma once

#include <optional>
#include <string>
#include <vector>

#include "keraia/knowledge_base.hpp"

namespace keraia {

struct Provenance {
  enum class Kind { Local, Inherited, Assumed };
  Kind kind = Kind::Local;
  std::string drel;      // Inherited only
  std::string provider;  // KS the value was read from

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Resolved {
  SlotValue value;
  Provenance provenance;
};

struct ResolveOptions {
  bool multi_hop = false;
  const Dimension* dimension = nullptr;
};

// Local value first; otherwise the highest-priority satisfied DRel whose
// target is `ks` and which shares `path` (or an enclosing subtree). Ties go to
// the lexicographically smallest appellation. Conditions are evaluated over
// local values only, with roles `source`, `target` and `self` (= target).
// Throws Unresolvable, or InheritanceCycle with multi-hop enabled.
Resolved resolve_attribute(const KnowledgeBase& kb, const std::string& ks, const SlotPath& path, Tick clock,
                           const ResolveOptions& options = {});
std::optional<Resolved> try_resolve_attribute(const KnowledgeBase& kb, const std::string& ks, const SlotPath& path,
                                              Tick clock, const ResolveOptions& options = {});

bool drel_satisfied(const KnowledgeBase& kb, const DRel& drel, Tick clock, const Dimension* dimension = nullptr);

struct DRelStatus {
  const DRel* drel = nullptr;
  bool satisfied = false;
};

// Every DRel with `ks` as source or target, ordered by priority desc then
// appellation asc.
std::vector<DRelStatus> active_drels(const KnowledgeBase& kb, const std::string& ks, Tick clock);

bool shares_path(const DRel& drel, const SlotPath& path);

}  // namespace keraia
