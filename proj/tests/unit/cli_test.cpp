#if KERAIA_HAVE_CLI

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "keraia_cli/cli.hpp"

namespace keraia::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, CheckShippedPacks) {
  auto r = invoke({"check", "naval", "water", "risk-weakest", "risk-strongest"});
  EXPECT_EQ(r.code, kOk) << r.err;
}

TEST(Cli, CheckReportsDiagnostics) {
  auto path = std::filesystem::temp_directory_path() / "keraia_cli_bad.ksynth";
  std::ofstream(path) << "cloud A {\n  ks KS-1 { slot x = }\n}\n";
  auto r = invoke({"check", path.string()});
  EXPECT_EQ(r.code, kDomainError);
  EXPECT_NE((r.out + r.err).find("SyntaxError"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kUsageError);
  EXPECT_EQ(invoke({"check"}).code, kUsageError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsageError);
  EXPECT_EQ(invoke({"run", "--pack", "naval"}).code, kUsageError);
  EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST(Cli, RunPrintsTrace) {
  auto r = invoke({"run", "--pack", "naval", "--lot", "LoT-1"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("StepActivated KS-TR1"), std::string::npos);
}

TEST(Cli, RunUnknownLotIsDomainError) {
  auto r = invoke({"run", "--pack", "naval", "--lot", "LoT-99"});
  EXPECT_EQ(r.code, kDomainError);
  EXPECT_NE(r.err.find("UnknownLoT"), std::string::npos);
}

TEST(Cli, ErroredRunExitsNonZero) {
  auto r = invoke({"run", "--pack", "naval", "--lot", "LoT-1", "--lot", "LoT-3"});
  EXPECT_EQ(r.code, kDomainError);
  EXPECT_NE(r.err.find("sequence position 2"), std::string::npos);
}

TEST(Cli, QueryResolvesKLine) {
  auto r = invoke({"query", "--pack", "water", "WaterTreatmentSystem/WaterQuality/pH/CurrentValue"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("7.2"), std::string::npos);
  EXPECT_EQ(invoke({"query", "--pack", "water", "WaterTreatmentSystem/Nope/x"}).code, kDomainError);
}

TEST(Cli, WhatIfReportsDivergence) {
  auto r = invoke({"run", "--pack", "naval", "--lot", "LoT-1", "--lot", "LoT-2", "--lot", "LoT-3", "--lot", "LoT-4",
                   "--lot", "LoT-5", "--what-if", "FC/KS-FC2/threat_classification=neutral"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("diverge"), std::string::npos) << r.out;
}

TEST(Cli, StructuredExportRoundTrips) {
  auto dir = std::filesystem::temp_directory_path();
  auto first = (dir / "keraia_cli_trace.jsonl").string();
  auto second = (dir / "keraia_cli_trace2.jsonl").string();
  ASSERT_EQ(invoke({"run", "--pack", "naval", "--lot", "LoT-1", "--format", "structured", "--out", first}).code, kOk);
  ASSERT_EQ(invoke({"trace", "export", "--in", first, "--format", "structured", "--out", second}).code, kOk);
  std::ifstream a(first);
  std::ifstream b(second);
  std::stringstream sa;
  std::stringstream sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(sa.str().empty());
}

TEST(Cli, RiskWritesCsv) {
  auto path = (std::filesystem::temp_directory_path() / "keraia_cli_risk.csv").string();
  auto r = invoke({"risk", "--bots", "aiasset,random", "--games", "2", "--seed", "7", "--out", path});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("record,game,seed", 0), 0u);
  EXPECT_EQ(invoke({"risk", "--bots", "aiasset,oracle", "--games", "1"}).code, kDomainError);
}

}  // namespace
}  // namespace keraia::cli

#endif
