#include "keraia_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "keraia/error.hpp"
#include "keraia/kline.hpp"
#include "keraia/ksynth.hpp"
#include "keraia/lot.hpp"
#include "keraia/packs.hpp"
#include "keraia/risk/game.hpp"
#include "keraia/trace.hpp"
#include "keraia/xai.hpp"

namespace keraia::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path input_file(const std::string& arg) {
  if (std::filesystem::exists(arg)) return arg;
  return pack_file(arg);
}

KnowledgeBase load(const std::string& pack) {
  auto path = input_file(pack);
  auto parsed = ksynth::parse_file(path);
  if (!parsed.ok()) {
    std::string msg;
    for (const auto& d : parsed.diagnostics) msg += (msg.empty() ? "" : "\n") + d.str();
    throw Error(parsed.diagnostics.front().code, path.string() + " has diagnostics:\n" + msg);
  }
  KnowledgeBase kb;
  ksynth::load(kb, parsed.document);
  return kb;
}

// "3.5" → number, "true"/"false" → boolean, quoted or bare text otherwise.
SlotValue parse_value(const std::string& s) {
  double d = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return SlotValue(d);
  if (s == "true") return SlotValue(true);
  if (s == "false") return SlotValue(false);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    return SlotValue(s.substr(1, s.size() - 2));
  }
  return SlotValue(s);
}

std::vector<Modification> parse_modifications(const std::vector<std::string>& specs) {
  std::vector<Modification> out;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--what-if expects path=value, got '" + s + "'");
    out.push_back({s.substr(0, eq), parse_value(s.substr(eq + 1))});
  }
  return out;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + out_path);
  f << text;
}

std::string tail(const std::string& text, std::size_t lines) {
  std::vector<std::string> all;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) all.push_back(l);
  std::string out;
  for (std::size_t i = all.size() > lines ? all.size() - lines : 0; i < all.size(); ++i) out += all[i] + "\n";
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

int cmd_check(const std::vector<std::string>& files, std::ostream& out, std::ostream& err) {
  bool clean = true;
  for (const auto& f : files) {
    auto path = input_file(f);
    auto parsed = ksynth::parse_file(path);
    for (const auto& d : parsed.diagnostics) err << d.str() << "\n";
    if (parsed.ok()) out << path.string() << ": ok\n";
    clean = clean && parsed.ok();
  }
  return clean ? kOk : kDomainError;
}

struct RunArgs {
  std::string pack;
  std::vector<std::string> lots;
  std::string rule_set;
  std::string self;
  std::vector<std::string> what_if;
  std::string format = "text";
  std::string out;
  std::string dimension;
  std::size_t step_limit = 10000;
  Tick clock = 0;
  bool normalize = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  if (a.lots.empty() == a.rule_set.empty()) throw UsageError("run needs exactly one of --lot or --ruleset");
  if (!a.what_if.empty() && a.lots.empty()) throw UsageError("--what-if needs --lot");
  KnowledgeBase kb = load(a.pack);
  bool structured = a.format == "structured";

  if (!a.rule_set.empty()) {
    Runtime rt;
    rt.clock = a.clock;
    if (!a.dimension.empty()) {
      rt.dimension = kb.find_dimension(a.dimension);
      if (!rt.dimension) throw Error(ErrorCode::InvalidArgument, "unknown dimension '" + a.dimension + "'");
    }
    if (kb.rules_in(a.rule_set).empty()) throw Error(ErrorCode::InvalidArgument, "no rules in rule set '" + a.rule_set + "'");
    OpResult r = run_rule_set(kb, rt, a.rule_set, a.self);
    std::ostringstream s;
    for (const auto& f : r.fired) {
      if (structured) s << Json{{"record", "firing"}, {"rule", f.rule}, {"bindings", f.bindings_str()}}.dump() << "\n";
      else s << "fired " << f.rule << " " << f.bindings_str() << "\n";
    }
    for (const auto& c : r.commands) {
      if (structured) s << Json{{"record", "command"}, {"rule", c.rule}, {"command", c.str()}}.dump() << "\n";
      else s << "command " << c.str() << "\n";
    }
    if (!structured && r.fired.empty()) s << "no rules fired\n";
    emit(s.str(), a.out, out);
    return kOk;
  }

  LotOptions opts;
  opts.step_limit = a.step_limit;
  if (!a.dimension.empty()) opts.dimension = a.dimension;
  if (!a.what_if.empty()) {
    WhatIfReport report = what_if(kb, a.lots, {}, parse_modifications(a.what_if), a.clock, opts);
    std::ostringstream s;
    if (structured) {
      export_what_if(report, s, a.normalize);
    } else {
      for (const auto& m : report.modifications) {
        s << "modified " << m.path << ": " << (m.old_value ? render(*m.old_value) : "unset") << " -> "
          << render(m.new_value) << "\n";
      }
      if (report.divergence) {
        std::size_t i = *report.divergence;
        s << "diverges at event " << i << "\n";
        auto show = [&](const char* label, const ReasoningTrace& t) {
          if (i >= t.events.size()) return;
          const TraceEvent& e = t.events[i];
          s << "  " << label << e.subject << " " << to_string(e.kind);
          if (!e.branch.empty()) s << " -> '" << e.branch << "'";
          if (!e.text.empty()) s << ": " << e.text;
          s << "\n";
        };
        show("baseline: ", report.baseline);
        show("variant:  ", report.variant);
      } else {
        s << "no divergence\n";
      }
      for (const auto& d : report.outcome_diff) {
        s << "diff " << d.path << ": " << (d.baseline ? render(*d.baseline) : "unset") << " | "
          << (d.variant ? render(*d.variant) : "unset") << "\n";
      }
      s << "--- baseline\n" << narrative(report.baseline) << "--- variant\n" << narrative(report.variant);
    }
    emit(s.str(), a.out, out);
    return kOk;
  }

  ReasoningTrace trace = chain_lots(kb, a.lots, {}, a.clock, opts);
  emit(structured ? export_trace(trace, a.normalize) : render_trace(trace), a.out, out);
  if (trace.errored) {
    err << "error: " << trace.error << "\n" << tail(narrative(trace), 5);
    return kDomainError;
  }
  return kOk;
}

int cmd_query(const std::string& pack, const std::string& path, const std::string& dimension, std::ostream& out) {
  KnowledgeBase kb = load(pack);
  const Dimension* dim = nullptr;
  if (!dimension.empty()) {
    dim = kb.find_dimension(dimension);
    if (!dim) throw Error(ErrorCode::InvalidArgument, "unknown dimension '" + dimension + "'");
  }
  out << render(resolve_kline(kb, KLinePath::parse(path), dim)) << "\n";
  return kOk;
}

struct RiskArgs {
  std::string bots = "aiasset,random,random,random";
  int games = 1;
  std::uint64_t seed = 1;
  int max_turns = 300;
  std::string out;
  bool log = false;
};

int cmd_risk(const RiskArgs& a, std::ostream& out) {
  auto bots = split_list(a.bots);
  if (bots.size() < 2 || bots.size() > 6) throw UsageError("--bots needs 2 to 6 comma-separated bots");
  if (a.games < 1) throw UsageError("--games must be positive");
  risk::GameOptions opts;
  opts.max_turns = a.max_turns;
  std::vector<risk::GameResult> results;
  std::vector<int> wins(bots.size(), 0);
  int unfinished = 0;
  for (int g = 0; g < a.games; ++g) {
    auto r = risk::simulate_game(bots, a.seed + static_cast<std::uint64_t>(g), opts);
    out << "game " << g << " seed " << r.seed << ": ";
    if (r.winner < 0) {
      out << "turn limit after " << r.turns << " turns\n";
      ++unfinished;
    } else {
      out << "P" << r.winner << " (" << bots[r.winner] << ") won in " << r.turns << " turns\n";
      ++wins[r.winner];
    }
    if (a.log) out << risk::format_log(risk::classic_board(), r.log);
    results.push_back(std::move(r));
  }
  for (std::size_t p = 0; p < bots.size(); ++p) {
    out << "P" << p << " " << bots[p] << ": " << wins[p] << "/" << a.games << " wins\n";
  }
  out << "turn limit: " << unfinished << "/" << a.games << "\n";
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + a.out);
    risk::write_results_csv(f, results);
  }
  return kOk;
}

int cmd_trace_export(const std::string& in_path, const std::string& format, bool normalize, const std::string& out_path,
                     std::ostream& out) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + in_path);
  ReasoningTrace trace = import_trace(in);
  emit(format == "structured" ? export_trace(trace, normalize) : render_trace(trace), out_path, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"KERAIA knowledge engine"};
  app.name("keraia");
  app.require_subcommand(1);

  std::vector<std::string> files;
  auto* check = app.add_subcommand("check", "Parse and cross-reference KSYNTH files or packs");
  check->add_option("files", files, "Files or pack names")->required();

  RunArgs ra;
  auto* runc = app.add_subcommand("run", "Run lines of thought or a rule set");
  runc->add_option("--pack", ra.pack, "Pack name or .ksynth file")->required();
  auto* lot_opt = runc->add_option("--lot", ra.lots, "Line of thought; repeat to chain");
  auto* rs_opt = runc->add_option("--ruleset", ra.rule_set, "Rule set to forward-chain");
  lot_opt->excludes(rs_opt);
  runc->add_option("--self", ra.self, "KS bound to ?Self for --ruleset");
  runc->add_option("--what-if", ra.what_if, "Hypothetical change path=value; repeatable");
  runc->add_option("--format", ra.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  runc->add_option("--out", ra.out, "Output file");
  runc->add_option("--dimension", ra.dimension, "Dimension whose assumptions apply");
  runc->add_option("--tick-limit", ra.step_limit, "Step limit per line of thought");
  runc->add_option("--clock", ra.clock, "Logical clock at the start of the run");
  runc->add_flag("--normalize", ra.normalize, "Zero wall-clock timestamps in structured output");

  std::string qpack, qpath, qdim;
  auto* query = app.add_subcommand("query", "Resolve a KLine path");
  query->add_option("--pack", qpack, "Pack name or .ksynth file")->required();
  query->add_option("path", qpath, "KLine path, e.g. WaterTreatmentSystem/WaterQuality/pH/CurrentValue")->required();
  query->add_option("--dimension", qdim, "Dimension whose assumptions apply");

  RiskArgs rk;
  auto* riskc = app.add_subcommand("risk", "Simulate RISK games");
  riskc->add_option("--bots", rk.bots, "Comma-separated bots: aiasset, aiasset-strongest, random, benevolent, cheater");
  riskc->add_option("--games", rk.games, "Number of games");
  riskc->add_option("--seed", rk.seed, "Seed of the first game; game g uses seed + g");
  riskc->add_option("--max-turns", rk.max_turns, "Round limit per game");
  riskc->add_option("--out", rk.out, "CSV with per-round continent owners and winners");
  riskc->add_flag("--log", rk.log, "Print every command");

  std::string tin, tformat = "text", tout;
  bool tnorm = false;
  auto* trace = app.add_subcommand("trace", "Work with exported traces");
  trace->require_subcommand(1);
  auto* texport = trace->add_subcommand("export", "Re-export a structured trace");
  texport->add_option("--in", tin, "Structured trace file")->required();
  texport->add_option("--format", tformat, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  texport->add_option("--out", tout, "Output file");
  texport->add_flag("--normalize", tnorm, "Zero wall-clock timestamps");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (*check) return cmd_check(files, out, err);
    if (*runc) return cmd_run(ra, out, err);
    if (*query) return cmd_query(qpack, qpath, qdim, out);
    if (*riskc) return cmd_risk(rk, out);
    if (*texport) return cmd_trace_export(tin, tformat, tnorm, tout, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace keraia::cli
