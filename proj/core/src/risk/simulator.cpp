#include <algorithm>
#include <random>
#include <sstream>

#include "keraia/error.hpp"
#include "keraia/risk/game.hpp"

namespace keraia::risk {

namespace {

Json territory_json(const GameState& s, int t) {
  return Json{{"name", s.board->name(t)}, {"owner", s.territories[t].owner}, {"armies", s.territories[t].armies}};
}

std::optional<GameCommand> parse_command(const Board& b, const Json& j) {
  auto kind = j.value("command", std::string());
  auto terr = [&](const char* key) { return j.contains(key) ? b.index(j.at(key).get<std::string>()) : -1; };
  int amount = j.value("amount", 0);
  if (kind == "EndPhase") return GameCommand::end_phase();
  if (kind == "Reinforce") return GameCommand::reinforce(terr("from"), amount);
  if (kind == "Attack") return GameCommand::attack(terr("from"), terr("to"), amount);
  if (kind == "Fortify") return GameCommand::fortify(terr("from"), terr("to"), amount);
  return std::nullopt;
}

class Simulator {
 public:
  Simulator(std::vector<Bot*> bots, std::uint64_t seed, const GameOptions& options)
      : bots_(std::move(bots)), options_(options), rng_(seed) {
    if (bots_.size() < 2 || bots_.size() > 6) {
      throw Error(ErrorCode::InvalidArgument, "a game needs 2 to 6 bots, got " + std::to_string(bots_.size()));
    }
    result_.seed = seed;
    s_.board = &classic_board();
    s_.seed = seed;
    s_.alive.assign(bots_.size(), true);
    commands_ = bus_.subscribe(kCommandTopic);
    for (std::size_t p = 0; p < bots_.size(); ++p) {
      bots_[p]->join(bus_, static_cast<int>(p));
      result_.players.push_back(bots_[p]->kind());
    }
  }

  GameResult run() {
    deal();
    for (int turn = 1; turn <= options_.max_turns && result_.winner < 0; ++turn) {
      s_.turn = turn;
      result_.turns = turn;
      for (int p = 0; p < static_cast<int>(bots_.size()) && result_.winner < 0; ++p) {
        if (!s_.alive[p]) continue;
        s_.current = p;
        play_turn(p);
      }
      std::vector<int> owners;
      for (std::size_t c = 0; c < s_.board->continents().size(); ++c) {
        owners.push_back(s_.continent_owner(static_cast<int>(c)));
      }
      result_.continent_owners.push_back(std::move(owners));
    }
    result_.final_state = s_;
    return std::move(result_);
  }

 private:
  int roll() { return std::uniform_int_distribution<int>(1, 6)(rng_); }

  void deal() {
    const Board& b = *s_.board;
    int n = static_cast<int>(bots_.size());
    std::vector<int> order(b.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::shuffle(order.begin(), order.end(), rng_);
    s_.territories.assign(b.size(), {});
    std::vector<std::vector<int>> owned(n);
    for (std::size_t i = 0; i < order.size(); ++i) {
      int p = static_cast<int>(i) % n;
      s_.territories[order[i]] = {p, 1};
      owned[p].push_back(order[i]);
    }
    for (int p = 0; p < n; ++p) {
      int extra = initial_armies(n) - static_cast<int>(owned[p].size());
      for (int k = 0; k < extra; ++k) {
        int pick = std::uniform_int_distribution<int>(0, static_cast<int>(owned[p].size()) - 1)(rng_);
        ++s_.territories[owned[p][pick]].armies;
      }
    }
    Json setup{{"event", "setup"}, {"players", n}, {"seed", s_.seed}, {"territories", Json::array()}};
    for (int t = 0; t < static_cast<int>(b.size()); ++t) setup["territories"].push_back(territory_json(s_, t));
    bus_.publish(kStateTopic, std::move(setup));
  }

  GameCommand ask(int p, Phase phase, int pool) {
    s_.phase = phase;
    bus_.publish(kStateTopic, Json{{"event", "prompt"}, {"player", p}, {"turn", s_.turn}, {"phase", to_string(phase)},
                                   {"pool", pool}});
    bots_[p]->act(bus_);
    auto replies = bus_.drain(commands_);
    if (replies.size() != 1) {
      reject(p, GameCommand::end_phase(), "expected one command, got " + std::to_string(replies.size()));
      return GameCommand::end_phase();
    }
    const Json& body = replies.front().body;
    auto cmd = parse_command(*s_.board, body);
    if (!cmd || body.value("player", -1) != p) {
      reject(p, GameCommand::end_phase(), "malformed command " + body.dump());
      return GameCommand::end_phase();
    }
    return *cmd;
  }

  void log(int p, const GameCommand& c, std::string status, std::string detail) {
    LoggedCommand e{s_.turn, p, s_.phase, c, std::move(status), std::move(detail)};
    if (!s_.valid()) ++result_.invariant_violations;
    if (options_.observer) options_.observer(s_, e);
    result_.log.push_back(std::move(e));
  }

  void reject(int p, const GameCommand& c, const std::string& why) { log(p, c, "illegal", why); }

  void publish_update(std::initializer_list<int> ts) {
    Json u{{"event", "update"}, {"territories", Json::array()}};
    for (int t : ts) u["territories"].push_back(territory_json(s_, t));
    bus_.publish(kStateTopic, std::move(u));
  }

  bool owns(int p, int t) const { return t >= 0 && t < static_cast<int>(s_.board->size()) && s_.territories[t].owner == p; }

  void play_turn(int p) {
    // Reinforce
    s_.phase = Phase::Reinforce;
    int pool = s_.reinforcements(p);
    if (bots_[p]->cheats()) {
      ++pool;
      log(p, GameCommand::reinforce(-1, 1), "cheat", "one extra reinforcement army");
    }
    while (pool > 0) {
      GameCommand c = ask(p, Phase::Reinforce, pool);
      if (c.kind == GameCommand::Kind::EndPhase) {
        log(p, c, "forfeit", std::to_string(pool) + " unplaced armies dropped");
        break;
      }
      if (c.kind != GameCommand::Kind::Reinforce || !owns(p, c.from) || c.amount < 1 || c.amount > pool) {
        reject(p, c, "reinforcement must place 1.." + std::to_string(pool) + " armies on an owned territory");
        break;
      }
      s_.territories[c.from].armies += c.amount;
      pool -= c.amount;
      publish_update({c.from});
      log(p, c, "ok", "");
    }

    // Attack
    for (int a = 0; a < options_.max_attacks; ++a) {
      GameCommand c = ask(p, Phase::Attack, 0);
      if (c.kind == GameCommand::Kind::EndPhase) break;
      if (c.kind != GameCommand::Kind::Attack || !owns(p, c.from) || c.to < 0 || owns(p, c.to) ||
          !s_.board->adjacent(c.from, c.to) || c.amount < 1 || c.amount > 3 ||
          c.amount > s_.territories[c.from].armies - 1) {
        reject(p, c, "attack needs an owned territory with more armies than dice, adjacent to an enemy");
        break;
      }
      battle(p, c);
      if (result_.winner >= 0) return;
    }

    // Fortify: at most one move
    GameCommand c = ask(p, Phase::Fortify, 0);
    if (c.kind == GameCommand::Kind::EndPhase) return;
    if (c.kind != GameCommand::Kind::Fortify || !owns(p, c.from) || !owns(p, c.to) || c.from == c.to ||
        c.amount < 1 || c.amount > s_.territories[c.from].armies - 1 || !s_.connected(c.from, c.to)) {
      reject(p, c, "fortify must move 1..armies-1 between connected owned territories");
      return;
    }
    s_.territories[c.from].armies -= c.amount;
    s_.territories[c.to].armies += c.amount;
    publish_update({c.from, c.to});
    log(p, c, "ok", "");
  }

  void battle(int p, const GameCommand& c) {
    int defender = s_.territories[c.to].owner;
    std::vector<int> att(c.amount), def(std::min(2, s_.territories[c.to].armies));
    for (int& d : att) d = roll();
    for (int& d : def) d = roll();
    BattleOutcome o = resolve_battle(att, def);
    s_.territories[c.from].armies -= o.attacker_losses;
    s_.territories[c.to].armies -= o.defender_losses;
    auto dice = [](const std::vector<int>& xs) {
      std::string s;
      for (int x : xs) s += (s.empty() ? "" : ",") + std::to_string(x);
      return s;
    };
    std::string detail = "dice " + dice(att) + " vs " + dice(def) + "; losses " + std::to_string(o.attacker_losses) +
                         "/" + std::to_string(o.defender_losses);
    if (s_.territories[c.to].armies == 0) {
      int move = s_.territories[c.from].armies - 1;
      s_.territories[c.to] = {p, move};
      s_.territories[c.from].armies = 1;
      detail += "; conquered, moved " + std::to_string(move);
    }
    publish_update({c.from, c.to});
    log(p, c, "ok", detail);
    if (s_.territory_count(defender) == 0 && s_.alive[defender]) {
      s_.alive[defender] = false;
      bus_.publish(kStateTopic, Json{{"event", "eliminated"}, {"player", defender}});
      if (std::count(s_.alive.begin(), s_.alive.end(), true) == 1) result_.winner = p;
    }
  }

  std::vector<Bot*> bots_;
  GameOptions options_;
  std::mt19937_64 rng_;
  TopicBus bus_;
  TopicBus::SubscriberId commands_ = 0;
  GameState s_;
  GameResult result_;
};

}  // namespace

int initial_armies(int players) {
  switch (players) {
    case 2: return 40;
    case 3: return 35;
    case 4: return 30;
    case 5: return 25;
    case 6: return 20;
  }
  throw Error(ErrorCode::InvalidArgument, "a game needs 2 to 6 players");
}

GameResult simulate_game(std::vector<Bot*> bots, std::uint64_t seed, const GameOptions& options) {
  return Simulator(std::move(bots), seed, options).run();
}

GameResult simulate_game(const std::vector<std::string>& bot_specs, std::uint64_t seed, const GameOptions& options) {
  std::vector<std::unique_ptr<Bot>> owned;
  std::vector<Bot*> bots;
  for (std::size_t i = 0; i < bot_specs.size(); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    owned.push_back(make_bot(bot_specs[i], (static_cast<std::uint64_t>(words[0]) << 32) | words[1]));
    bots.push_back(owned.back().get());
  }
  return simulate_game(bots, seed, options);
}

std::string format_log_entry(const Board& board, const LoggedCommand& e) {
  std::string s = "turn " + std::to_string(e.turn) + " P" + std::to_string(e.player) + " " +
                  std::string(to_string(e.phase)) + " ";
  s += e.status == "cheat" ? std::string("Cheat(+1)") : describe(board, e.command);
  s += " [" + e.status + "]";
  if (!e.detail.empty()) s += " " + e.detail;
  return s;
}

std::string format_log(const Board& board, const std::vector<LoggedCommand>& log) {
  std::string out;
  for (const auto& e : log) out += format_log_entry(board, e) + "\n";
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<GameResult>& results) {
  const Board& b = classic_board();
  out << "record,game,seed,turn,winner,winner_kind";
  for (const auto& c : b.continents()) out << "," << c.name;
  out << "\n";
  auto owner = [](int p) { return p < 0 ? std::string("-") : "P" + std::to_string(p); };
  for (std::size_t g = 0; g < results.size(); ++g) {
    const GameResult& r = results[g];
    for (std::size_t t = 0; t < r.continent_owners.size(); ++t) {
      out << "turn," << g << "," << r.seed << "," << t + 1 << ",,";
      for (int o : r.continent_owners[t]) out << "," << owner(o);
      out << "\n";
    }
    out << "result," << g << "," << r.seed << "," << r.turns << "," << owner(r.winner) << ","
        << (r.winner < 0 ? std::string("turn-limit") : r.players[r.winner]);
    for (std::size_t c = 0; c < b.continents().size(); ++c) out << ",";
    out << "\n";
  }
}

}  // namespace keraia::risk
