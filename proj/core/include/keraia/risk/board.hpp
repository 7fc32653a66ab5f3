#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace keraia::risk {

struct TerritoryInfo {
  std::string name;
  std::string continent;
};

struct ContinentInfo {
  std::string name;
  int bonus = 0;
};

// Static map: territories, continents and a symmetric adjacency relation.
class Board {
 public:
  Board(std::vector<TerritoryInfo> territories, std::vector<ContinentInfo> continents,
        std::vector<std::pair<std::string, std::string>> edges);

  std::size_t size() const { return territories_.size(); }
  const std::vector<TerritoryInfo>& territories() const { return territories_; }
  const std::vector<ContinentInfo>& continents() const { return continents_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int t) const { return adjacency_[t]; }
  bool adjacent(int a, int b) const;
  int index(std::string_view name) const;  // -1 when unknown
  const std::string& name(int t) const { return territories_[t].name; }
  int continent_of(int t) const { return continent_of_[t]; }
  const std::vector<int>& members(int continent) const { return members_[continent]; }

 private:
  std::vector<TerritoryInfo> territories_;
  std::vector<ContinentInfo> continents_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> continent_of_;
  std::vector<std::vector<int>> members_;
  std::map<std::string, int, std::less<>> index_;
};

// The classic 42-territory, 6-continent map.
const Board& classic_board();

enum class Phase { Reinforce, Attack, Fortify };
std::string_view to_string(Phase phase);

struct TerritoryState {
  int owner = -1;
  int armies = 0;
};

struct GameState {
  const Board* board = nullptr;
  std::vector<TerritoryState> territories;
  std::vector<bool> alive;
  Phase phase = Phase::Reinforce;
  int current = 0;
  int turn = 0;
  std::uint64_t seed = 0;

  int territory_count(int player) const;
  int army_count(int player) const;
  // Player owning the whole continent, or -1.
  int continent_owner(int continent) const;
  int reinforcements(int player) const;  // max(3, territories / 3) + bonuses
  bool connected(int from, int to) const;  // path through `from`'s owner's territories
  // Exactly `board->size()` territories, each owned by a valid player with >= 1 army.
  bool valid() const;
};

struct GameCommand {
  enum class Kind { Reinforce, Attack, Fortify, EndPhase };
  Kind kind = Kind::EndPhase;
  int from = -1;  // Reinforce: territory
  int to = -1;
  int amount = 0;  // armies, or dice for Attack

  static GameCommand reinforce(int territory, int armies) { return {Kind::Reinforce, territory, -1, armies}; }
  static GameCommand attack(int from, int to, int dice) { return {Kind::Attack, from, to, dice}; }
  static GameCommand fortify(int from, int to, int armies) { return {Kind::Fortify, from, to, armies}; }
  static GameCommand end_phase() { return {}; }

  friend bool operator==(const GameCommand&, const GameCommand&) = default;
};

std::string_view to_string(GameCommand::Kind kind);
std::string describe(const Board& board, const GameCommand& c);

// Rolls sorted descending are compared pairwise; ties go to the defender.
struct BattleOutcome {
  int attacker_losses = 0;
  int defender_losses = 0;
};
BattleOutcome resolve_battle(std::vector<int> attacker_dice, std::vector<int> defender_dice);

struct ThreatNeighbor {
  std::string territory;
  int owner = -1;
  int armies = 0;
  bool friendly = false;
};

struct ThreatRow {
  std::string territory;
  int armies = 0;
  std::vector<ThreatNeighbor> neighbors;
  bool is_continent_border = false;  // has a neighbour on another continent
};

// One row per territory owned by `player`, ordered by territory name.
// Throws UnknownPlayer.
std::vector<ThreatRow> build_threat_table(const GameState& state, int player);

}  // namespace keraia::risk
