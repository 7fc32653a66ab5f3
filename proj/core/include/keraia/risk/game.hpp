#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "keraia/knowledge_base.hpp"
#include "keraia/operations.hpp"
#include "keraia/risk/board.hpp"
#include "keraia/risk/bus.hpp"

namespace keraia::risk {

// A player. The simulator publishes state events on the "datafusion-post"
// topic; when an event prompts this player, `act` publishes exactly one
// command on the "risk" topic.
class Bot {
 public:
  virtual ~Bot() = default;
  virtual const std::string& kind() const = 0;
  // Binds the bot to a seat and subscribes it to the state topic.
  virtual void join(TopicBus& bus, int player) = 0;
  // Consumes pending state events; answers a prompt addressed to this seat.
  virtual void act(TopicBus& bus) = 0;
  // Cheaters receive one extra reinforcement army per turn.
  virtual bool cheats() const { return false; }
};

// Keeps a local mirror of the game from state events and decides on prompts.
class MirrorBot : public Bot {
 public:
  void join(TopicBus& bus, int player) override;
  void act(TopicBus& bus) override;

 protected:
  // Called on a prompt; the mirror is current.
  virtual GameCommand decide(const GameState& state, Phase phase, int pool) = 0;
  virtual void on_setup(const GameState&) {}

  int self() const { return self_; }
  const GameState& mirror() const { return mirror_; }

 private:
  void apply(const Json& event, TopicBus& bus);

  int self_ = -1;
  std::optional<TopicBus::SubscriberId> sub_;
  GameState mirror_;
};

enum class BaselineKind { Random, Benevolent, Cheater };

// random: uniform over legal actions (ending a phase counts as one option);
// benevolent: never attacks; cheater: random play plus one extra army per turn.
std::unique_ptr<Bot> baseline_bot(BaselineKind kind, std::uint64_t seed);

// KB-driven agent. State events are fused into Territory, Continent and
// Player frames; a phase change updates KS-GamePhase, whose attractor
// selects the active rule set; the first command of a forward-chaining run
// is the move.
class AIAsset : public MirrorBot {
 public:
  // `pack` is a pack name or a .ksynth path (see pack_file).
  explicit AIAsset(const std::string& pack = "risk-weakest");

  const std::string& kind() const override { return kind_; }

  const KnowledgeBase& kb() const { return kb_; }
  // State right after the frames were created; every later mutation is in
  // the version log.
  const KnowledgeBase& setup_snapshot() const { return *setup_; }
  std::size_t decisions() const { return decisions_; }

 protected:
  GameCommand decide(const GameState& state, Phase phase, int pool) override;
  void on_setup(const GameState& state) override;

 private:
  void fuse(const GameState& state, int pool);
  void derive_helpers(const GameState& state, Phase phase);
  void put(const std::string& ks, const std::string& path, SlotValue value);

  std::string kind_;
  KnowledgeBase kb_;
  Runtime rt_;
  FunctionRegistry functions_;
  std::shared_ptr<const KnowledgeBase> setup_;
  std::size_t decisions_ = 0;
};

// Bot by spec name: aiasset | aiasset-weakest | aiasset-strongest | random |
// benevolent | cheater. Throws InvalidArgument.
std::unique_ptr<Bot> make_bot(const std::string& spec, std::uint64_t seed);

struct LoggedCommand {
  int turn = 0;
  int player = -1;
  Phase phase = Phase::Reinforce;
  GameCommand command;
  // "ok", "illegal" (forfeited), "cheat" (simulator-injected army) or
  // "forfeit" (unplaced reinforcements dropped)
  std::string status = "ok";
  std::string detail;

  friend bool operator==(const LoggedCommand&, const LoggedCommand&) = default;
};

struct GameOptions {
  int max_turns = 300;         // full rounds
  int max_attacks = 200;       // per player turn
  // Called after every applied command with the current state.
  std::function<void(const GameState&, const LoggedCommand&)> observer;
};

struct GameResult {
  std::uint64_t seed = 0;
  std::vector<std::string> players;  // bot kinds by seat
  int winner = -1;                   // -1: turn limit reached
  int turns = 0;
  // Per completed round, the owner of each continent (-1 when split).
  std::vector<std::vector<int>> continent_owners;
  std::vector<LoggedCommand> log;
  std::size_t invariant_violations = 0;
  GameState final_state;
};

// Initial armies per player by player count (2..6).
int initial_armies(int players);

// Plays one game. All state reaches the bots over a TopicBus; commands come
// back on the "risk" topic. Deterministic in (bots, seed, options).
GameResult simulate_game(std::vector<Bot*> bots, std::uint64_t seed, const GameOptions& options = {});

// Convenience: builds the bots from spec names, seeding each from `seed`.
GameResult simulate_game(const std::vector<std::string>& bot_specs, std::uint64_t seed,
                         const GameOptions& options = {});

std::string format_log_entry(const Board& board, const LoggedCommand& entry);
std::string format_log(const Board& board, const std::vector<LoggedCommand>& log);

// One row per completed round plus a result row per game.
void write_results_csv(std::ostream& out, const std::vector<GameResult>& results);

}  // namespace keraia::risk
