#include <gtest/gtest.h>

#include <map>
#include <set>

#include "helpers.hpp"
#include "keraia/risk/game.hpp"
#include "keraia/xai.hpp"

namespace keraia::risk {
namespace {

using test::error_code;

// Player 1 holds every territory not listed, with one army each.
GameState position(const std::map<std::string, std::pair<int, int>>& placed) {
  GameState s;
  s.board = &classic_board();
  s.alive = {true, true};
  s.territories.assign(s.board->size(), {1, 1});
  for (const auto& [name, oa] : placed) {
    int i = s.board->index(name);
    EXPECT_GE(i, 0) << name;
    s.territories[i] = {oa.first, oa.second};
  }
  return s;
}

Json territories_json(const GameState& s) {
  Json list = Json::array();
  for (std::size_t i = 0; i < s.territories.size(); ++i) {
    list.push_back({{"name", s.board->name(static_cast<int>(i))},
                    {"owner", s.territories[i].owner},
                    {"armies", s.territories[i].armies}});
  }
  return list;
}

// Feeds `state` to an AIAsset seated as player 0 and returns its reply.
Json ask_agent(const GameState& state, Phase phase, int pool, const std::string& pack = "risk-weakest") {
  TopicBus bus;
  auto commands = bus.subscribe(kCommandTopic);
  AIAsset agent(pack);
  agent.join(bus, 0);
  bus.publish(kStateTopic, {{"event", "setup"}, {"players", 2}, {"seed", 0}, {"territories", territories_json(state)}});
  bus.publish(kStateTopic,
              {{"event", "prompt"}, {"player", 0}, {"turn", 1}, {"phase", std::string(to_string(phase))}, {"pool", pool}});
  agent.act(bus);
  auto replies = bus.drain(commands);
  EXPECT_EQ(replies.size(), 1u);
  return replies.empty() ? Json{} : replies[0].body;
}

const std::map<std::string, std::pair<int, int>> kAustraliaAndSiam{{"EasternAustralia", {0, 1}},
                                                                    {"Indonesia", {0, 1}},
                                                                    {"NewGuinea", {0, 1}},
                                                                    {"WesternAustralia", {0, 1}},
                                                                    {"Siam", {0, 3}}};

TEST(Board, ClassicMapShape) {
  const Board& b = classic_board();
  EXPECT_EQ(b.size(), 42u);
  EXPECT_EQ(b.continents().size(), 6u);
  EXPECT_EQ(b.edges().size(), 83u);
  for (const auto& [x, y] : b.edges()) {
    EXPECT_TRUE(b.adjacent(x, y));
    EXPECT_TRUE(b.adjacent(y, x));
  }
  EXPECT_EQ(b.index("Atlantis"), -1);
}

TEST(Battle, TiesGoToDefender) {
  auto o = resolve_battle({6, 5, 3}, {6, 4});
  EXPECT_EQ(o.attacker_losses, 1);
  EXPECT_EQ(o.defender_losses, 1);
  auto unsorted = resolve_battle({3, 6, 5}, {4, 6});
  EXPECT_EQ(unsorted.attacker_losses, 1);
  EXPECT_EQ(unsorted.defender_losses, 1);
  auto single = resolve_battle({2}, {1, 1});
  EXPECT_EQ(single.attacker_losses, 0);
  EXPECT_EQ(single.defender_losses, 1);
}

TEST(GameState, ReinforcementsIncludeContinentBonus) {
  GameState s = position(kAustraliaAndSiam);
  EXPECT_EQ(s.reinforcements(0), 3 + 2);
  EXPECT_EQ(s.continent_owner(classic_board().continent_of(classic_board().index("Indonesia"))), 0);
  EXPECT_TRUE(s.valid());
  s.territories[0].armies = 0;
  EXPECT_FALSE(s.valid());
}

TEST(ThreatTable, LoneSiamSeesOnlyFoes) {
  GameState s = position({{"Siam", {0, 3}}});
  auto table = build_threat_table(s, 0);
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table[0].territory, "Siam");
  EXPECT_EQ(table[0].armies, 3);
  std::set<std::string> names;
  for (const auto& n : table[0].neighbors) {
    names.insert(n.territory);
    EXPECT_FALSE(n.friendly);
    EXPECT_EQ(n.owner, 1);
  }
  EXPECT_EQ(names, (std::set<std::string>{"China", "India", "Indonesia"}));
  EXPECT_TRUE(table[0].is_continent_border);
}

TEST(ThreatTable, AustraliaBorderIsIndonesiaOnly) {
  GameState s = position({{"EasternAustralia", {0, 1}},
                          {"Indonesia", {0, 1}},
                          {"NewGuinea", {0, 1}},
                          {"WesternAustralia", {0, 1}}});
  auto table = build_threat_table(s, 0);
  ASSERT_EQ(table.size(), 4u);
  for (std::size_t i = 1; i < table.size(); ++i) EXPECT_LT(table[i - 1].territory, table[i].territory);
  for (const auto& row : table) EXPECT_EQ(row.is_continent_border, row.territory == "Indonesia") << row.territory;
}

TEST(ThreatTable, EliminatedAndUnknownPlayers) {
  GameState s = position({{"Siam", {0, 3}}});
  s.alive = {true, true, false};
  EXPECT_TRUE(build_threat_table(s, 2).empty());
  EXPECT_EQ(error_code([&] { build_threat_table(s, 7); }), ErrorCode::UnknownPlayer);
  EXPECT_EQ(error_code([&] { build_threat_table(s, -1); }), ErrorCode::UnknownPlayer);
}

TEST(TopicBusProperty, PerTopicFifoOverInterleavedPublishes) {
  TopicBus bus;
  auto a1 = bus.subscribe("a");
  auto b1 = bus.subscribe("b");
  std::mt19937 rng(5);
  std::map<std::string, int> next{{"a", 0}, {"b", 0}};
  std::optional<TopicBus::SubscriberId> late;
  for (int i = 0; i < 1000; ++i) {
    std::string topic = rng() % 2 ? "a" : "b";
    bus.publish(topic, {{"n", next[topic]++}});
    if (i == 500) late = bus.subscribe("a");
    if (rng() % 7 == 0) (void)bus.poll(b1);
  }
  auto check = [&](TopicBus::SubscriberId id, int first) {
    auto msgs = bus.drain(id);
    for (std::size_t i = 1; i < msgs.size(); ++i) EXPECT_EQ(msgs[i].seq, msgs[i - 1].seq + 1);
    for (std::size_t i = 0; i < msgs.size(); ++i) EXPECT_EQ(msgs[i].body["n"].get<int>(), first + static_cast<int>(i));
    return msgs.size();
  };
  EXPECT_EQ(check(a1, 0), static_cast<std::size_t>(next["a"]));
  check(*late, next["a"] - static_cast<int>(bus.pending(*late)));
  EXPECT_EQ(bus.pending(a1), 0u);
  EXPECT_EQ(bus.published("a") + bus.published("b"), 1000u);
}

TEST(AIAssetRules, ReinforceSiamWhenHoldingAustralia) {
  Json c = ask_agent(position(kAustraliaAndSiam), Phase::Reinforce, 5);
  EXPECT_EQ(c["command"], "Reinforce");
  EXPECT_EQ(c["from"], "Siam");
  EXPECT_EQ(c["amount"], 2);
}

TEST(AIAssetRules, AttackWeakestNeighbour) {
  auto placed = kAustraliaAndSiam;
  placed["Siam"] = {0, 5};
  placed["China"] = {1, 2};
  placed["India"] = {1, 4};
  Json c = ask_agent(position(placed), Phase::Attack, 0);
  EXPECT_EQ(c["command"], "Attack");
  EXPECT_EQ(c["from"], "Siam");
  EXPECT_EQ(c["to"], "China");
  EXPECT_EQ(c["amount"], 3);

  Json s = ask_agent(position(placed), Phase::Attack, 0, "risk-strongest");
  EXPECT_EQ(s["command"], "EndPhase");  // 5 is not enough against 4 + 1
  placed["Siam"] = {0, 9};
  s = ask_agent(position(placed), Phase::Attack, 0, "risk-strongest");
  EXPECT_EQ(s["to"], "India");
}

TEST(AIAssetRules, FortifyInteriorTowardBorder) {
  auto placed = kAustraliaAndSiam;
  placed.erase("Siam");
  placed["EasternAustralia"] = {0, 7};
  Json c = ask_agent(position(placed), Phase::Fortify, 0);
  EXPECT_EQ(c["command"], "Fortify");
  EXPECT_EQ(c["from"], "EasternAustralia");
  EXPECT_EQ(c["to"], "Indonesia");
  EXPECT_EQ(c["amount"], 6);
}

TEST(Simulation, AIAssetGameIsReproducible) {
  auto a = simulate_game(std::vector<std::string>{"aiasset", "random"}, 42);
  auto b = simulate_game(std::vector<std::string>{"aiasset", "random"}, 42);
  EXPECT_EQ(a.winner, b.winner);
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.continent_owners, b.continent_owners);
  EXPECT_EQ(a.invariant_violations, 0u);
}

TEST(Simulation, RandomGamesRepeatPerSeed) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto a = simulate_game(std::vector<std::string>{"random", "random"}, seed);
    auto b = simulate_game(std::vector<std::string>{"random", "random"}, seed);
    EXPECT_EQ(a.log, b.log) << seed;
  }
}

TEST(Simulation, BenevolentNeverAttacks) {
  GameOptions opts;
  opts.max_turns = 60;
  std::size_t states = 0;
  opts.observer = [&](const GameState& s, const LoggedCommand&) {
    ++states;
    EXPECT_TRUE(s.valid());
  };
  auto r = simulate_game(std::vector<std::string>{"benevolent", "random", "random"}, 9, opts);
  EXPECT_GT(states, 0u);
  for (const auto& e : r.log) {
    if (e.player == 0) EXPECT_NE(e.command.kind, GameCommand::Kind::Attack);
  }
  EXPECT_EQ(r.invariant_violations, 0u);
}

TEST(Simulation, CheaterOutperformsRandom) {
  GameOptions opts;
  opts.max_turns = 120;
  int cheater = 0;
  int random = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    bool cheater_first = seed % 2 == 0;
    auto r = simulate_game(cheater_first ? std::vector<std::string>{"cheater", "random"}
                                         : std::vector<std::string>{"random", "cheater"},
                           seed, opts);
    if (r.winner < 0) continue;
    bool cheater_won = (r.winner == 0) == cheater_first;
    (cheater_won ? cheater : random)++;
  }
  EXPECT_GT(cheater, random);
}

TEST(Simulation, CheatArmiesAreLogged) {
  GameOptions opts;
  opts.max_turns = 5;
  auto r = simulate_game(std::vector<std::string>{"cheater", "random"}, 3, opts);
  std::size_t cheats = 0;
  for (const auto& e : r.log) {
    if (e.status == "cheat") {
      ++cheats;
      EXPECT_EQ(e.player, 0);
    }
  }
  EXPECT_GT(cheats, 0u);
}

TEST(Simulation, AgentVersionLogIsComplete) {
  AIAsset agent;
  auto opponent = make_bot("random", 4);
  GameOptions opts;
  opts.max_turns = 30;
  auto r = simulate_game(std::vector<Bot*>{&agent, opponent.get()}, 77, opts);
  EXPECT_GT(agent.decisions(), 0u);
  for (const auto& [name, ks] : agent.kb().knowledge_sources()) {
    EXPECT_EQ(history(agent.kb(), name).size(), ks.version - 1) << name;
  }
  KnowledgeBase replayed = replay_version_log(agent.setup_snapshot(), agent.kb());
  EXPECT_TRUE(diff_state(replayed, agent.kb()).empty());
}

TEST(Simulation, BotSpecsAndValidation) {
  EXPECT_EQ(make_bot("aiasset-strongest", 1)->kind(), "aiasset:risk-strongest");
  EXPECT_EQ(error_code([] { make_bot("oracle", 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(initial_armies(4), 30);
  EXPECT_EQ(error_code([] { simulate_game(std::vector<std::string>{"random"}, 1); }), ErrorCode::InvalidArgument);
}

TEST(Simulation, CsvHasHeaderTurnAndResultRows) {
  GameOptions opts;
  opts.max_turns = 3;
  auto r = simulate_game(std::vector<std::string>{"random", "random"}, 8, opts);
  std::ostringstream out;
  write_results_csv(out, {r});
  std::string text = out.str();
  EXPECT_EQ(text.rfind("record,game,seed,turn,winner,winner_kind,", 0), 0u);
  EXPECT_NE(text.find("\nturn,"), std::string::npos);
  EXPECT_NE(text.find("\nresult,"), std::string::npos);
}

}  // namespace
}  // namespace keraia::risk
