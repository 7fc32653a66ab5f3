#include "keraia/kline.hpp"

#include "keraia/error.hpp"

namespace keraia {

namespace {

bool matches(const std::string& appellation, const std::string& segment, std::string_view prefix) {
  if (appellation == segment) return true;
  return appellation.size() == prefix.size() + segment.size() &&
         appellation.compare(0, prefix.size(), prefix) == 0 &&
         appellation.compare(prefix.size(), std::string::npos, segment) == 0;
}

std::string describe(const KLinePath& path, std::size_t index) {
  return "segment " + std::to_string(index) + " ('" + path.segments[index] + "') of '" + path.str() + "'";
}

const KnowledgeSource* find_ks_named(const KnowledgeBase& kb, const std::vector<std::string>& pool,
                                     const std::string& segment) {
  const KnowledgeSource* prefixed = nullptr;
  for (const auto& name : pool) {
    if (name == segment) return &kb.ks(name);
    if (matches(name, segment, "KS-")) prefixed = &kb.ks(name);
  }
  return prefixed;
}

const Cloud* find_sub_cloud(const KnowledgeBase& kb, const Cloud& cloud, const std::string& segment) {
  const Cloud* prefixed = nullptr;
  for (const auto& sub : cloud.sub_clouds) {
    if (sub == segment) return &kb.cloud(sub);
    if (matches(sub, segment, "Cloud-")) prefixed = &kb.cloud(sub);
  }
  return prefixed;
}

SlotAddress walk_ks(const KnowledgeBase& kb, const KnowledgeSource& ks, const KLinePath& path, std::size_t start) {
  SlotAddress out{ks.appellation, {}};
  const SlotValue* cur = &ks.slots;
  for (std::size_t i = start; i < path.segments.size(); ++i) {
    cur = cur->find(path.segments[i]);
    if (!cur) throw Error(ErrorCode::UnknownSegment, describe(path, i));
    out.path.push_back(path.segments[i]);
  }
  (void)kb;
  return out;
}

SlotAddress walk_cloud(const KnowledgeBase& kb, const Cloud& cloud, const KLinePath& path, std::size_t i) {
  if (i == path.segments.size()) {
    throw Error(ErrorCode::InvalidPath, "'" + path.str() + "' ends at cloud '" + cloud.appellation + "'");
  }
  const auto& seg = path.segments[i];
  const KnowledgeSource* ks = find_ks_named(kb, kb.members_within(cloud.appellation), seg);
  const Cloud* sub = find_sub_cloud(kb, cloud, seg);
  if (ks) {
    try {
      return walk_ks(kb, *ks, path, i + 1);
    } catch (const Error& e) {
      if (!sub || e.code() != ErrorCode::UnknownSegment) throw;
      throw Error(ErrorCode::AmbiguousSegment, describe(path, i) + " matches KS '" + ks->appellation +
                                                   "' and sub-cloud '" + sub->appellation + "': " + e.what());
    }
  }
  if (sub) return walk_cloud(kb, *sub, path, i + 1);
  throw Error(ErrorCode::UnknownSegment, describe(path, i));
}

}  // namespace

KLinePath KLinePath::parse(std::string_view text) {
  KLinePath p{split_path(text)};
  if (p.segments.empty()) throw Error(ErrorCode::InvalidPath, "empty KLine path");
  for (const auto& s : p.segments) {
    if (s.empty()) throw Error(ErrorCode::InvalidPath, "empty segment in KLine '" + std::string(text) + "'");
  }
  return p;
}

SlotAddress locate(const KnowledgeBase& kb, const KLinePath& path) {
  if (path.segments.empty()) throw Error(ErrorCode::InvalidPath, "empty KLine path");
  const auto& first = path.segments.front();
  const KnowledgeSource* ks = kb.find_ks(first);
  if (!ks) ks = kb.find_ks("KS-" + first);
  if (ks) return walk_ks(kb, *ks, path, 1);
  const Cloud* cloud = kb.find_cloud(first);
  if (!cloud) cloud = kb.find_cloud("Cloud-" + first);
  if (cloud) return walk_cloud(kb, *cloud, path, 1);
  throw Error(ErrorCode::UnknownSegment, describe(path, 0));
}

const SlotValue* assumed_value(const KnowledgeBase& kb, const Dimension& dim, const SlotAddress& address) {
  for (const auto& a : dim.assumptions) {
    SlotAddress at;
    try {
      KLinePath p = KLinePath::parse(a.path);
      // Assumptions may name slots the KS does not hold yet: locate the KS
      // through the longest resolvable prefix.
      at = locate(kb, KLinePath{{p.segments.begin(), p.segments.end() - 1}});
      at.path.push_back(p.segments.back());
    } catch (const Error&) {
      try {
        at = locate(kb, KLinePath::parse(a.path));
      } catch (const Error&) {
        continue;
      }
    }
    if (at.ks != address.ks || at.path.size() > address.path.size()) continue;
    if (!std::equal(at.path.begin(), at.path.end(), address.path.begin())) continue;
    if (at.path.size() == address.path.size()) return &a.value;
    SlotPath rest(address.path.begin() + static_cast<std::ptrdiff_t>(at.path.size()), address.path.end());
    if (const SlotValue* inner = lookup(a.value, rest)) return inner;
  }
  return nullptr;
}

SlotValue resolve_kline(const KnowledgeBase& kb, const KLinePath& path, const Dimension* context) {
  SlotAddress addr;
  try {
    addr = locate(kb, path);
  } catch (const Error& e) {
    // Shadowing also covers slots that exist only as assumptions.
    if (!context || e.code() != ErrorCode::UnknownSegment || path.segments.size() < 2) throw;
    try {
      addr = locate(kb, KLinePath{{path.segments.begin(), path.segments.end() - 1}});
    } catch (const Error&) {
      throw e;
    }
    addr.path.push_back(path.segments.back());
    if (const SlotValue* v = assumed_value(kb, *context, addr)) return *v;
    throw;
  }
  if (context) {
    if (const SlotValue* v = assumed_value(kb, *context, addr)) return *v;
  }
  return *lookup(kb.ks(addr.ks).slots, addr.path);
}

}  // namespace keraia
