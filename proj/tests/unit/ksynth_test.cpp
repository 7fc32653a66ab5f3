#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "../support/random_docs.hpp"
#include "helpers.hpp"
#include "keraia/kline.hpp"

namespace keraia {
namespace {

using test::error_code;

std::size_t count_lines(std::string_view text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1; }

TEST(Ksynth, MinimalDocument) {
  auto r = ksynth::parse(R"(cloud Cloud-SF { ks KS-TR1 { slot type = "Radar System" } })");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.document.decls.size(), 1u);
  const auto& cloud = std::get<ksynth::CloudDecl>(r.document.decls[0].node);
  EXPECT_EQ(cloud.name, "Cloud-SF");
  ASSERT_EQ(cloud.body.size(), 1u);
  const auto& ks = std::get<ksynth::KsDecl>(cloud.body[0].node);
  EXPECT_EQ(ks.name, "KS-TR1");
  EXPECT_EQ(*ks.slots.find("type"), SlotValue("Radar System"));
}

TEST(Ksynth, WaterPumpCarriesNestedComponentSlots) {
  KnowledgeBase kb = test::pack_kb("water");
  const KnowledgeSource& pump = kb.ks("KS-Pump");
  for (const char* name : {"MotorState", "BearingTemperature", "VibrationLevel", "EfficiencyCurve"}) {
    EXPECT_NE(pump.slots.find(name), nullptr) << name;
  }
  EXPECT_EQ(pump.slots.find("BearingTemperature")->unit(), "C");
  EXPECT_EQ(pump.slots.find("EfficiencyCurve")->list().size(), 4u);
}

TEST(Ksynth, UnresolvedStepTarget) {
  auto r = ksynth::parse(R"(
cloud Cloud-A { ks KS-1 { slot x = 1 } }
lot LoT-1 { step KS-Ghost }
)");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].code, ErrorCode::UnresolvedReference);
  EXPECT_NE(r.diagnostics[0].message.find("KS-Ghost"), std::string::npos);
  EXPECT_EQ(r.diagnostics[0].pos.line, 3u);
}

TEST(Ksynth, DuplicateAppellation) {
  auto r = ksynth::parse("cloud Cloud-A { ks KS-1 { } ks KS-1 { } }");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].code, ErrorCode::DuplicateAppellation);
}

TEST(Ksynth, SyntaxErrorPositionsStayInsideInput) {
  const std::vector<std::string> broken{
      "cloud", "cloud Cloud-A {", "cloud Cloud-A { ks KS-1 { slot x = } }", "ks {", "lot L { step }",
      "cloud A { ks B { slot x = [1, 2 } }", "rule r { then { frobnicate } }", "\"unterminated",
      "cloud A {\n  ks B {\n    slot x = 1 \"unit\n  }\n}"};
  for (const auto& text : broken) {
    auto r = ksynth::parse(text);
    ASSERT_FALSE(r.ok()) << text;
    for (const auto& d : r.diagnostics) {
      EXPECT_EQ(d.code, ErrorCode::SyntaxError) << text;
      EXPECT_GE(d.pos.line, 1u);
      EXPECT_LE(d.pos.line, count_lines(text)) << text;
      EXPECT_GE(d.pos.column, 1u);
    }
  }
}

TEST(Ksynth, EmptyDocumentSerializesToEmptyText) {
  EXPECT_EQ(ksynth::serialize(ksynth::Document{}), "");
  auto r = ksynth::parse("# only a comment\n");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.document.decls.empty());
}

TEST(Ksynth, UnitsAndValueKinds) {
  auto doc = ksynth::parse_or_throw(R"(
cloud C {
  ks KS-Ship { slot speed = 18 "knots" slot flag = true slot peer = KS-Ship slot pos = [0, -1.5] slot m = {a = 1, b = "x"} }
})");
  KnowledgeBase kb;
  ksynth::load(kb, doc);
  const auto& s = kb.ks("KS-Ship").slots;
  EXPECT_EQ(s.find("speed")->number(), 18);
  EXPECT_EQ(s.find("speed")->unit(), "knots");
  EXPECT_TRUE(s.find("flag")->boolean());
  EXPECT_TRUE(s.find("peer")->is_ref());
  EXPECT_EQ(s.find("pos")->list()[1].number(), -1.5);
  EXPECT_EQ(*s.find("m")->find("b"), SlotValue("x"));
}

TEST(Ksynth, RoundTripShippedPacks) {
  for (const auto& name : pack_names()) {
    auto doc = parse_pack(name);
    auto again = ksynth::parse_or_throw(ksynth::serialize(doc), {"<round-trip>", pack_dir(), true});
    EXPECT_EQ(again, doc) << name;
  }
}

TEST(KsynthProperty, RoundTripRandomDocuments) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::string text = test::RandomDocument(seed).generate();
    auto first = ksynth::parse(text);
    ASSERT_TRUE(first.ok()) << "seed " << seed << ": " << first.diagnostics[0].str() << "\n" << text;
    std::string printed = ksynth::serialize(first.document);
    auto second = ksynth::parse(printed);
    ASSERT_TRUE(second.ok()) << "seed " << seed << "\n" << printed;
    EXPECT_EQ(second.document, first.document) << "seed " << seed;
    EXPECT_EQ(ksynth::serialize(second.document), printed) << "seed " << seed;
  }
}

TEST(KsynthProperty, ParseIsDeterministic) {
  std::string text = test::RandomDocument(5).generate() + "\ncloud {";
  auto a = ksynth::parse(text);
  auto b = ksynth::parse(text);
  EXPECT_EQ(a.document, b.document);
  ASSERT_EQ(a.diagnostics.size(), b.diagnostics.size());
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i) EXPECT_EQ(a.diagnostics[i].str(), b.diagnostics[i].str());
}

TEST(Ksynth, UseIncludesOnceAndDetectsCycles) {
  auto dir = std::filesystem::temp_directory_path() / "keraia_use_test";
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
  };
  write("a.ksynth", "use \"b.ksynth\"\ncloud A { ks KS-A { slot x = 1 } }\n");
  write("b.ksynth", "use \"a.ksynth\"\n");
  auto r = ksynth::parse_file(dir / "a.ksynth");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].code, ErrorCode::IncludeCycle);

  write("c.ksynth", "cloud C { ks KS-C { slot x = 1 } }\n");
  write("d.ksynth", "use \"c.ksynth\"\nuse \"c.ksynth\"\n");
  auto d = ksynth::parse_file(dir / "d.ksynth");
  ASSERT_TRUE(d.ok()) << d.diagnostics[0].str();
  KnowledgeBase kb;
  ksynth::load(kb, d.document);
  EXPECT_NE(kb.find_ks("KS-C"), nullptr);
  std::filesystem::remove_all(dir);
}

TEST(KLine, RenderedFormRoundTrips) {
  auto p = KLinePath::parse("WaterTreatmentSystem/WaterQuality/pH/CurrentValue");
  EXPECT_EQ(p.segments.size(), 4u);
  EXPECT_EQ(KLinePath::parse(p.str()), p);
  EXPECT_EQ(error_code([] { KLinePath::parse("a//b"); }), ErrorCode::InvalidPath);
}

TEST(KLine, ResolvesWaterPhPath) {
  KnowledgeBase kb = test::pack_kb("water");
  EXPECT_EQ(resolve_kline(kb, KLinePath::parse("WaterTreatmentSystem/WaterQuality/pH/CurrentValue")), SlotValue(7.2));
  auto addr = locate(kb, KLinePath::parse("WaterTreatmentSystem/WaterQuality/pH/CurrentValue"));
  EXPECT_EQ(addr.ks, "KS-WaterQuality");
  EXPECT_EQ(addr.path, (SlotPath{"pH", "CurrentValue"}));
}

TEST(KLine, DimensionShadowsStoredValue) {
  KnowledgeBase kb = test::source_kb(R"(
cloud Cloud-Q { ks KS-pH { slot CurrentValue = 7.2 } }
dimension Dim-Acid { assume Cloud-Q/KS-pH/CurrentValue = 9.1 }
)");
  auto path = KLinePath::parse("Cloud-Q/KS-pH/CurrentValue");
  EXPECT_EQ(resolve_kline(kb, path), SlotValue(7.2));
  EXPECT_EQ(resolve_kline(kb, path, kb.find_dimension("Dim-Acid")), SlotValue(9.1));
}

TEST(KLine, UnknownMiddleSegmentNamesIndex) {
  KnowledgeBase kb = test::pack_kb("water");
  try {
    resolve_kline(kb, KLinePath::parse("WaterTreatmentSystem/Nope/pH/CurrentValue"));
    FAIL() << "expected UnknownSegment";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSegment);
    EXPECT_NE(std::string(e.what()).find("segment 1"), std::string::npos);
  }
}

TEST(KLine, KsWinsOverSubCloudAndAmbiguityOnlyOnFailure) {
  KnowledgeBase kb = test::source_kb(R"(
cloud Root {
  ks KS-Twin { slot a = 1 }
  cloud Twin { ks KS-Inner { slot b = 2 } }
}
)");
  EXPECT_EQ(resolve_kline(kb, KLinePath::parse("Root/Twin/a")), SlotValue(1.0));
  EXPECT_EQ(error_code([&] { resolve_kline(kb, KLinePath::parse("Root/Twin/Inner/b")); }),
            ErrorCode::AmbiguousSegment);
}

TEST(KLineProperty, ResolutionIsReadOnly) {
  KnowledgeBase kb = test::pack_kb("naval");
  std::string before = kb.digest();
  for (const char* p : {"OR/KS-Ship/speed", "Environment/Sea/drift", "FC/KS-FC2/engagement_range", "TR/TR5/alert"}) {
    try {
      resolve_kline(kb, KLinePath::parse(p));
    } catch (const Error&) {
    }
  }
  EXPECT_EQ(kb.digest(), before);
}

}  // namespace
}  // namespace keraia
