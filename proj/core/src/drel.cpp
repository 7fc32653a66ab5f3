#include "keraia/drel.hpp"

#include <algorithm>
#include <set>

#include "keraia/error.hpp"
#include "keraia/eval.hpp"
#include "keraia/kline.hpp"

namespace keraia {

namespace {

bool drel_order(const DRel* a, const DRel* b) {
  if (a->priority != b->priority) return a->priority > b->priority;
  return a->appellation < b->appellation;
}

std::optional<Resolved> resolve_impl(const KnowledgeBase& kb, const std::string& ks, const SlotPath& path,
                                     Tick clock, const ResolveOptions& options,
                                     std::set<std::string>& visiting) {
  const KnowledgeSource& frame = kb.ks(ks);
  if (options.dimension) {
    if (const SlotValue* v = assumed_value(kb, *options.dimension, SlotAddress{ks, path})) {
      return Resolved{*v, {Provenance::Kind::Assumed, {}, ks}};
    }
  }
  if (const SlotValue* v = lookup(frame.slots, path)) return Resolved{*v, {Provenance::Kind::Local, {}, ks}};

  std::vector<const DRel*> candidates;
  for (const auto& d : kb.drels()) {
    if (d.target_ks == ks && shares_path(d, path)) candidates.push_back(&d);
  }
  std::sort(candidates.begin(), candidates.end(), drel_order);

  for (const DRel* d : candidates) {
    if (!drel_satisfied(kb, *d, clock, options.dimension)) continue;
    if (!options.multi_hop) {
      if (!kb.find_ks(d->source_ks)) continue;
      const SlotValue* v = lookup(kb.ks(d->source_ks).slots, path);
      if (options.dimension) {
        if (const SlotValue* a = assumed_value(kb, *options.dimension, SlotAddress{d->source_ks, path})) v = a;
      }
      if (v) return Resolved{*v, {Provenance::Kind::Inherited, d->appellation, d->source_ks}};
      continue;
    }
    std::string key = d->source_ks + "/" + join_path(path);
    if (!visiting.insert(key).second) {
      throw Error(ErrorCode::InheritanceCycle, "cycle through '" + key + "' via " + d->appellation);
    }
    auto inner = resolve_impl(kb, d->source_ks, path, clock, options, visiting);
    visiting.erase(key);
    if (inner) {
      return Resolved{inner->value, {Provenance::Kind::Inherited, d->appellation, inner->provenance.provider}};
    }
  }
  return std::nullopt;
}

}  // namespace

bool shares_path(const DRel& drel, const SlotPath& path) {
  for (const auto& attr : drel.shared_attributes) {
    SlotPath root = split_path(attr);
    if (root.size() <= path.size() && std::equal(root.begin(), root.end(), path.begin())) return true;
  }
  return false;
}

bool drel_satisfied(const KnowledgeBase& kb, const DRel& drel, Tick clock, const Dimension* dimension) {
  if (drel.condition.empty()) return true;
  EvalContext ctx;
  ctx.kb = &kb;
  ctx.clock = clock;
  ctx.roles = {{"source", drel.source_ks}, {"target", drel.target_ks}, {"self", drel.target_ks}};
  ctx.dimension = dimension;
  ctx.inherit = false;
  return eval_condition(drel.condition, ctx);
}

std::optional<Resolved> try_resolve_attribute(const KnowledgeBase& kb, const std::string& ks, const SlotPath& path,
                                              Tick clock, const ResolveOptions& options) {
  std::set<std::string> visiting{ks + "/" + join_path(path)};
  return resolve_impl(kb, ks, path, clock, options, visiting);
}

Resolved resolve_attribute(const KnowledgeBase& kb, const std::string& ks, const SlotPath& path, Tick clock,
                           const ResolveOptions& options) {
  if (auto r = try_resolve_attribute(kb, ks, path, clock, options)) return std::move(*r);
  throw Error(ErrorCode::Unresolvable, ks + "/" + join_path(path) + " has no local value and no satisfied DRel");
}

std::vector<DRelStatus> active_drels(const KnowledgeBase& kb, const std::string& ks, Tick clock) {
  kb.ks(ks);
  std::vector<const DRel*> touching;
  for (const auto& d : kb.drels()) {
    if (d.source_ks == ks || d.target_ks == ks) touching.push_back(&d);
  }
  std::sort(touching.begin(), touching.end(), drel_order);
  std::vector<DRelStatus> out;
  for (const DRel* d : touching) out.push_back({d, drel_satisfied(kb, *d, clock)});
  return out;
}

}  // namespace keraia
