#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "keraia/xai.hpp"

namespace keraia {
namespace {

using test::error_code;

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Narrative, OneLinePerActivation) {
  KnowledgeBase kb = test::pack_kb("naval");
  auto text = narrative(run_lot(kb, "LoT-1"));
  EXPECT_EQ(line_count(text), 3u);
  EXPECT_NE(text.find("KS-TR1: Radar contact T-0417 at bearing 42, range 18 nm"), std::string::npos);
  EXPECT_EQ(narrative(ReasoningTrace{}), "");
}

TEST(Narrative, ForkLineNamesUntakenBranches) {
  KnowledgeBase kb = test::pack_kb("naval");
  auto text = narrative(chain_lots(kb, {"LoT-1", "LoT-2", "LoT-3", "LoT-4", "LoT-5"}));
  EXPECT_NE(text.find("KS-FC2 fork: took 'high-threat'; not taken: 'investigate', 'opportunistic'"),
            std::string::npos)
      << text;
}

TEST(WhatIf, NoModificationsMeansNoDivergence) {
  KnowledgeBase kb = test::pack_kb("naval");
  std::string before = kb.digest();
  auto r = what_if(kb, {"LoT-1", "LoT-2", "LoT-3", "LoT-4", "LoT-5", "LoT-6"}, {}, {});
  EXPECT_FALSE(r.divergence.has_value());
  EXPECT_TRUE(r.outcome_diff.empty());
  EXPECT_EQ(export_trace(r.baseline, true), export_trace(r.variant, true));
  EXPECT_EQ(kb.digest(), before);
}

TEST(WhatIf, NeutralContactDivergesAtFork) {
  KnowledgeBase kb = test::pack_kb("naval");
  ASSERT_FALSE(chain_lots(kb, {"LoT-1", "LoT-2", "LoT-3", "LoT-4"}).errored);
  auto r = what_if(kb, {"LoT-5", "LoT-6"}, {}, {{"FC/KS-FC2/threat_classification", SlotValue("neutral")}});
  ASSERT_EQ(r.modifications.size(), 1u);
  EXPECT_EQ(r.modifications[0].old_value, SlotValue("hostile"));
  ASSERT_TRUE(r.divergence.has_value());
  const auto& base = r.baseline.events[*r.divergence];
  const auto& var = r.variant.events[*r.divergence];
  EXPECT_EQ(base.kind, EventKind::ForkTaken);
  EXPECT_EQ(var.kind, EventKind::ForkTaken);
  EXPECT_EQ(base.lot, "LoT-5");
  EXPECT_EQ(base.branch, "high-threat");
  EXPECT_EQ(var.branch, "opportunistic");
  EXPECT_FALSE(r.outcome_diff.empty());
}

TEST(WhatIf, UnreadSlotChangesOnlyItself) {
  KnowledgeBase kb = test::pack_kb("naval");
  auto r = what_if(kb, {"LoT-1"}, {}, {{"Environment/KS-Sea/sea_state", SlotValue(6.0)}});
  EXPECT_FALSE(r.divergence.has_value());
  ASSERT_EQ(r.outcome_diff.size(), 1u);
  EXPECT_EQ(r.outcome_diff[0].path, "KS-Sea/sea_state");
  EXPECT_EQ(r.outcome_diff[0].variant, SlotValue(6.0));
}

TEST(WhatIf, ReportExportsAsJsonLines) {
  KnowledgeBase kb = test::pack_kb("naval");
  auto r = what_if(kb, {"LoT-1"}, {}, {{"Environment/KS-Sea/sea_state", SlotValue(6.0)}});
  std::ostringstream out;
  export_what_if(r, out, true);
  std::istringstream in(out.str());
  std::string line;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    EXPECT_NO_THROW((void)Json::parse(line)) << line;
    ++records;
  }
  EXPECT_GT(records, 2u);
}

TEST(DiffState, ReportsLeafDifferences) {
  KnowledgeBase a = test::pack_kb("water");
  KnowledgeBase b = a.snapshot();
  b.set_slot("KS-WaterQuality", "pH/CurrentValue", SlotValue(6.9));
  b.set_slot("KS-Pump", "note", SlotValue("new"));
  auto d = diff_state(a, b);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].path, "KS-Pump/note");
  EXPECT_FALSE(d[0].baseline.has_value());
  EXPECT_EQ(d[1].path, "KS-WaterQuality/pH/CurrentValue");
  EXPECT_EQ(d[1].baseline, SlotValue(7.2));
  EXPECT_TRUE(diff_state(a, a).empty());
}

TEST(History, VersionsFollowMutations) {
  KnowledgeBase kb = test::pack_kb("water");
  {
    KnowledgeBase::ActorScope scope(kb, "operator");
    kb.set_slot("KS-Filter", "head_loss", SlotValue(2.0));
    kb.set_slot("KS-Filter", "backwash/hours_since_last", SlotValue(0.0));
    kb.set_slot("KS-Filter", "head_loss", SlotValue(2.1));
  }
  auto h = history(kb, "KS-Filter");
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0].version, 2u);
  EXPECT_EQ(h[1].version, 3u);
  EXPECT_EQ(h[2].version, 4u);
  EXPECT_EQ(h[0].old_value, SlotValue(1.9));
  EXPECT_EQ(h[2].actor, "operator");
  EXPECT_EQ(history(kb, "KS-Filter", std::string("backwash")).size(), 1u);
  EXPECT_EQ(history(kb, "KS-Filter", std::string("head_loss")).size(), 2u);
  EXPECT_EQ(error_code([&] { history(kb, "KS-Nope"); }), ErrorCode::UnknownKS);
}

TEST(History, ReplayOfVersionLogReproducesState) {
  KnowledgeBase kb = test::pack_kb("naval");
  KnowledgeBase base = kb.snapshot();
  ASSERT_FALSE(chain_lots(kb, {"LoT-1", "LoT-2", "LoT-3", "LoT-4", "LoT-5", "LoT-6"}).errored);
  KnowledgeBase replayed = replay_version_log(base, kb);
  EXPECT_TRUE(diff_state(replayed, kb).empty());
  EXPECT_FALSE(diff_state(base, kb).empty());
}

TEST(TraceIo, ExportImportRoundTrip) {
  KnowledgeBase kb = test::pack_kb("naval");
  auto t = chain_lots(kb, {"LoT-1", "LoT-2", "LoT-3", "LoT-4", "LoT-5"});
  std::string text = export_trace(t);
  std::istringstream in(text);
  auto back = import_trace(in);
  EXPECT_EQ(back.id, t.id);
  EXPECT_EQ(back.events, t.events);
  EXPECT_EQ(export_trace(back), text);
  EXPECT_EQ(export_trace(back, true), export_trace(t, true));
}

TEST(TraceIo, NormalizedExportDropsTimestamps) {
  KnowledgeBase kb = test::pack_kb("naval");
  auto normalized = export_trace(run_lot(kb, "LoT-1"), true);
  EXPECT_EQ(normalized.find("\"timestamp\":1"), std::string::npos);
  EXPECT_EQ(parse_event_kind(to_string(EventKind::ForkTaken)), EventKind::ForkTaken);
}

}  // namespace
}  // namespace keraia
