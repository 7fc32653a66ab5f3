#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "keraia/knowledge_base.hpp"

namespace keraia {

// Slash-delimited address through clouds and knowledge sources down to a
// slot, e.g. WaterTreatmentSystem/WaterQuality/pH/CurrentValue.
struct KLinePath {
  std::vector<std::string> segments;

  static KLinePath parse(std::string_view text);
  std::string str() const { return join_path(segments); }

  friend bool operator==(const KLinePath&, const KLinePath&) = default;
};

// The knowledge source and local slot path a KLine lands on.
struct SlotAddress {
  std::string ks;
  SlotPath path;

  std::string str() const { return path.empty() ? ks : ks + "/" + join_path(path); }
  friend bool operator==(const SlotAddress&, const SlotAddress&) = default;
};

// Walks the cloud/KS structure without reading the final value. Segments may
// omit the "Cloud-"/"KS-" prefixes. At a cloud, a KS that is a direct or
// transitive member takes precedence over a sub-cloud of the same name.
// Throws UnknownSegment, or AmbiguousSegment when the preferred KS match fails
// further down and a sub-cloud alternative exists.
SlotAddress locate(const KnowledgeBase& kb, const KLinePath& path);

// Value at `path`. Assumptions of `context` shadow stored values.
SlotValue resolve_kline(const KnowledgeBase& kb, const KLinePath& path, const Dimension* context = nullptr);

// Assumption value covering `address` (exact or enclosing subtree), if any.
const SlotValue* assumed_value(const KnowledgeBase& kb, const Dimension& dim, const SlotAddress& address);

}  // namespace keraia
