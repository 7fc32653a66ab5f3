#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "keraia/drel.hpp"
#include "keraia/eval.hpp"

namespace keraia {
namespace {

using test::error_code;

TEST(DRel, HeloInheritsShipSpeedOnlyWhileAboard) {
  KnowledgeBase kb = test::pack_kb("naval");
  auto on_ship = resolve_attribute(kb, "KS-Helo", {"speed"}, 0);
  EXPECT_EQ(on_ship.value.number(), 18);
  EXPECT_EQ(on_ship.provenance.kind, Provenance::Kind::Inherited);
  EXPECT_EQ(on_ship.provenance.drel, "DRel-helo-speed");
  EXPECT_EQ(on_ship.provenance.provider, "KS-Ship");

  kb.set_slot("KS-Helo", "location", SlotValue("airborne"));
  EXPECT_EQ(error_code([&] { resolve_attribute(kb, "KS-Helo", {"speed"}, 0); }), ErrorCode::Unresolvable);
  EXPECT_FALSE(try_resolve_attribute(kb, "KS-Helo", {"speed"}, 0).has_value());

  kb.set_slot("KS-Helo", "location", SlotValue("ship"));
  EXPECT_EQ(resolve_attribute(kb, "KS-Helo", {"speed"}, 0).value.number(), 18);
}

TEST(DRel, LocalValueTakesPrecedence) {
  KnowledgeBase kb = test::pack_kb("naval");
  kb.set_slot("KS-Helo", "speed", SlotValue(120.0));
  auto r = resolve_attribute(kb, "KS-Helo", {"speed"}, 0);
  EXPECT_EQ(r.value.number(), 120);
  EXPECT_EQ(r.provenance.kind, Provenance::Kind::Local);
}

TEST(DRel, NonSharedAttributeIsNotInherited) {
  KnowledgeBase kb = test::pack_kb("naval");
  EXPECT_EQ(error_code([&] { resolve_attribute(kb, "KS-Helo", {"heading"}, 0); }), ErrorCode::Unresolvable);
}

constexpr const char* kProviders = R"(
cloud C {
  ks KS-T { slot kind = "target" }
  ks KS-A { slot x = 1 }
  ks KS-B { slot x = 2 }
  ks KS-C { slot x = 3 }
}
)";

DRel provider(const std::string& name, const std::string& source, int priority) {
  DRel d;
  d.appellation = name;
  d.source_ks = source;
  d.target_ks = "KS-T";
  d.shared_attributes = {"x"};
  d.priority = priority;
  return d;
}

TEST(DRel, HighestPriorityWins) {
  KnowledgeBase kb = test::source_kb(kProviders);
  kb.add_drel(provider("DRel-a", "KS-A", 1));
  kb.add_drel(provider("DRel-b", "KS-B", 5));
  kb.add_drel(provider("DRel-c", "KS-C", 3));
  auto r = resolve_attribute(kb, "KS-T", {"x"}, 0);
  EXPECT_EQ(r.value.number(), 2);
  EXPECT_EQ(r.provenance.drel, "DRel-b");
}

// Equal priorities break ties by appellation, independent of insertion order.
TEST(DRelProperty, TieBreakIgnoresInsertionOrder) {
  std::vector<DRel> drels{provider("DRel-m", "KS-B", 2), provider("DRel-k", "KS-A", 2),
                          provider("DRel-z", "KS-C", 2)};
  std::mt19937 rng(3);
  for (int i = 0; i < 12; ++i) {
    std::shuffle(drels.begin(), drels.end(), rng);
    KnowledgeBase kb = test::source_kb(kProviders);
    for (const auto& d : drels) kb.add_drel(d);
    auto r = resolve_attribute(kb, "KS-T", {"x"}, 0);
    EXPECT_EQ(r.provenance.drel, "DRel-k");
    EXPECT_EQ(r.value.number(), 1);
  }
}

TEST(DRel, ConditionsShortCircuit) {
  KnowledgeBase kb = test::source_kb(R"(
cloud C { ks KS-T { slot flag = false } ks KS-S { slot x = 4 } }
drel DRel-guarded { source KS-S target KS-T share x when "self.flag == true and self.missing > 1" }
drel DRel-either { source KS-S target KS-T share y when "true or self.missing > 1" }
)");
  EXPECT_FALSE(drel_satisfied(kb, kb.drels()[0], 0));
  EXPECT_TRUE(drel_satisfied(kb, kb.drels()[1], 0));
}

TEST(DRel, DistanceConditionUsesRoles) {
  KnowledgeBase kb = test::source_kb(R"(
cloud C { ks KS-T { slot pos = [3, 4] } ks KS-S { slot pos = [0, 0] slot x = 7 } }
drel DRel-near { source KS-S target KS-T share x when "distance(source.pos, target.pos) < 10" }
)");
  EXPECT_EQ(resolve_attribute(kb, "KS-T", {"x"}, 0).value.number(), 7);
  kb.set_slot("KS-T", "pos", SlotValue(SlotList{SlotValue(30.0), SlotValue(40.0)}));
  EXPECT_FALSE(try_resolve_attribute(kb, "KS-T", {"x"}, 0).has_value());
}

TEST(DRel, TypeMismatchInCondition) {
  KnowledgeBase kb = test::source_kb(R"(
cloud C { ks KS-T { slot label = "abc" } ks KS-S { slot x = 1 } }
drel DRel-bad { source KS-S target KS-T share x when "self.label > 3" }
)");
  EXPECT_EQ(error_code([&] { drel_satisfied(kb, kb.drels()[0], 0); }), ErrorCode::TypeMismatch);
}

TEST(DRel, ActiveDrelsListsBothDirectionsOrdered) {
  KnowledgeBase kb = test::source_kb(kProviders);
  kb.add_drel(provider("DRel-b", "KS-B", 1));
  kb.add_drel(provider("DRel-a", "KS-A", 1));
  kb.add_drel(provider("DRel-c", "KS-C", 9));
  auto target = active_drels(kb, "KS-T", 0);
  ASSERT_EQ(target.size(), 3u);
  EXPECT_EQ(target[0].drel->appellation, "DRel-c");
  EXPECT_EQ(target[1].drel->appellation, "DRel-a");
  EXPECT_EQ(target[2].drel->appellation, "DRel-b");
  EXPECT_TRUE(target[0].satisfied);
  auto source = active_drels(kb, "KS-A", 0);
  ASSERT_EQ(source.size(), 1u);
  EXPECT_EQ(error_code([&] { active_drels(kb, "KS-Nobody", 0); }), ErrorCode::UnknownKS);
}

TEST(DRel, ValveSeesPumpPressureOnlyWhileMotorRuns) {
  KnowledgeBase kb = test::pack_kb("water");
  EXPECT_EQ(resolve_attribute(kb, "KS-Valve", {"discharge_pressure"}, 0).value.number(), 3.2);
  kb.set_slot("KS-Pump", "MotorState", SlotValue("Tripped"));
  EXPECT_EQ(error_code([&] { resolve_attribute(kb, "KS-Valve", {"discharge_pressure"}, 0); }),
            ErrorCode::Unresolvable);
}

TEST(DRel, SharedSubtreeCoversNestedPath) {
  KnowledgeBase kb = test::source_kb(R"(
cloud C { ks KS-T { } ks KS-S { slot nav = {speed = 5, heading = 90} } }
drel DRel-nav { source KS-S target KS-T share nav }
)");
  EXPECT_TRUE(shares_path(kb.drels()[0], {"nav", "speed"}));
  EXPECT_FALSE(shares_path(kb.drels()[0], {"navy"}));
  EXPECT_EQ(resolve_attribute(kb, "KS-T", {"nav", "heading"}, 0).value.number(), 90);
}

TEST(DRel, MultiHopFollowsChainAndDetectsCycles) {
  KnowledgeBase kb = test::source_kb(R"(
cloud C { ks KS-A { slot x = 1 } ks KS-B { } ks KS-C { } }
drel DRel-ab { source KS-A target KS-B share x }
drel DRel-bc { source KS-B target KS-C share x }
)");
  EXPECT_FALSE(try_resolve_attribute(kb, "KS-C", {"x"}, 0).has_value());
  EXPECT_EQ(resolve_attribute(kb, "KS-C", {"x"}, 0, {true, nullptr}).value.number(), 1);

  KnowledgeBase loop = test::source_kb(R"(
cloud C { ks KS-A { } ks KS-B { } }
drel DRel-ab { source KS-A target KS-B share x }
drel DRel-ba { source KS-B target KS-A share x }
)");
  EXPECT_EQ(error_code([&] { resolve_attribute(loop, "KS-A", {"x"}, 0, {true, nullptr}); }),
            ErrorCode::InheritanceCycle);
}

TEST(DRelProperty, ResolutionDoesNotMutate) {
  KnowledgeBase kb = test::pack_kb("naval");
  std::string before = kb.digest();
  auto log_size = kb.version_log().size();
  for (int i = 0; i < 10; ++i) {
    (void)try_resolve_attribute(kb, "KS-Helo", {"speed"}, i);
    (void)active_drels(kb, "KS-Ship", i);
  }
  EXPECT_EQ(kb.digest(), before);
  EXPECT_EQ(kb.version_log().size(), log_size);
  EXPECT_FALSE(kb.has_pending_pulses());
}

TEST(Expr, ElapsedSinceUsesClock) {
  KnowledgeBase kb = test::source_kb("cloud C { ks KS-T { slot seen = 4 } }");
  EvalContext ctx{&kb, 10};
  ctx.roles["self"] = "KS-T";
  EXPECT_EQ(evaluate(*Condition::parse("elapsed_since(self.seen)").ast, ctx).number(), 6);
  EXPECT_TRUE(eval_condition(Condition::parse("abs(-3) == 3 and max(1, 5, 2) == 5"), ctx));
  EXPECT_TRUE(eval_condition(Condition::parse("exists(self.seen) and not exists(self.gone)"), ctx));
}

}  // namespace
}  // namespace keraia
