#include "keraia/risk/board.hpp"

#include <algorithm>
#include <functional>

#include "keraia/error.hpp"

namespace keraia::risk {

Board::Board(std::vector<TerritoryInfo> territories, std::vector<ContinentInfo> continents,
             std::vector<std::pair<std::string, std::string>> edges)
    : territories_(std::move(territories)), continents_(std::move(continents)) {
  for (std::size_t i = 0; i < territories_.size(); ++i) {
    if (!index_.emplace(territories_[i].name, static_cast<int>(i)).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate territory " + territories_[i].name);
    }
  }
  members_.resize(continents_.size());
  for (std::size_t i = 0; i < territories_.size(); ++i) {
    auto it = std::find_if(continents_.begin(), continents_.end(),
                           [&](const ContinentInfo& c) { return c.name == territories_[i].continent; });
    if (it == continents_.end()) throw Error(ErrorCode::InvalidArgument, "unknown continent " + territories_[i].continent);
    int c = static_cast<int>(it - continents_.begin());
    continent_of_.push_back(c);
    members_[c].push_back(static_cast<int>(i));
  }
  adjacency_.resize(territories_.size());
  for (const auto& [a, b] : edges) {
    int x = index(a);
    int y = index(b);
    if (x < 0 || y < 0 || x == y) throw Error(ErrorCode::InvalidArgument, "bad edge " + a + " - " + b);
    if (adjacent(x, y)) throw Error(ErrorCode::InvalidArgument, "duplicate edge " + a + " - " + b);
    edges_.emplace_back(x, y);
    adjacency_[x].push_back(y);
    adjacency_[y].push_back(x);
  }
  for (auto& n : adjacency_) std::sort(n.begin(), n.end());
}

bool Board::adjacent(int a, int b) const {
  const auto& n = adjacency_[a];
  return std::find(n.begin(), n.end(), b) != n.end();
}

int Board::index(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

const Board& classic_board() {
  static const Board board = [] {
    std::vector<TerritoryInfo> t;
    auto add = [&](const char* continent, std::initializer_list<const char*> names) {
      for (const char* n : names) t.push_back({n, continent});
    };
    add("NorthAmerica", {"Alaska", "Alberta", "CentralAmerica", "EasternUnitedStates", "Greenland",
                         "NorthwestTerritory", "Ontario", "Quebec", "WesternUnitedStates"});
    add("SouthAmerica", {"Argentina", "Brazil", "Peru", "Venezuela"});
    add("Europe", {"GreatBritain", "Iceland", "NorthernEurope", "Scandinavia", "SouthernEurope", "Ukraine",
                   "WesternEurope"});
    add("Africa", {"Congo", "EastAfrica", "Egypt", "Madagascar", "NorthAfrica", "SouthAfrica"});
    add("Asia", {"Afghanistan", "China", "India", "Irkutsk", "Japan", "Kamchatka", "MiddleEast", "Mongolia", "Siam",
                 "Siberia", "Ural", "Yakutsk"});
    add("Australia", {"EasternAustralia", "Indonesia", "NewGuinea", "WesternAustralia"});
    std::vector<ContinentInfo> c{{"NorthAmerica", 5}, {"SouthAmerica", 2}, {"Europe", 5},
                                 {"Africa", 3},       {"Asia", 7},         {"Australia", 2}};
    std::vector<std::pair<std::string, std::string>> e{
        {"Alaska", "NorthwestTerritory"}, {"Alaska", "Alberta"}, {"Alaska", "Kamchatka"},
        {"NorthwestTerritory", "Alberta"}, {"NorthwestTerritory", "Ontario"}, {"NorthwestTerritory", "Greenland"},
        {"Alberta", "Ontario"}, {"Alberta", "WesternUnitedStates"}, {"Ontario", "WesternUnitedStates"},
        {"Ontario", "EasternUnitedStates"}, {"Ontario", "Quebec"}, {"Ontario", "Greenland"},
        {"Quebec", "EasternUnitedStates"}, {"Quebec", "Greenland"}, {"Greenland", "Iceland"},
        {"WesternUnitedStates", "EasternUnitedStates"}, {"WesternUnitedStates", "CentralAmerica"},
        {"EasternUnitedStates", "CentralAmerica"}, {"CentralAmerica", "Venezuela"},
        {"Venezuela", "Peru"}, {"Venezuela", "Brazil"}, {"Peru", "Brazil"}, {"Peru", "Argentina"},
        {"Brazil", "Argentina"}, {"Brazil", "NorthAfrica"},
        {"Iceland", "GreatBritain"}, {"Iceland", "Scandinavia"}, {"GreatBritain", "Scandinavia"},
        {"GreatBritain", "NorthernEurope"}, {"GreatBritain", "WesternEurope"}, {"Scandinavia", "NorthernEurope"},
        {"Scandinavia", "Ukraine"}, {"NorthernEurope", "WesternEurope"}, {"NorthernEurope", "SouthernEurope"},
        {"NorthernEurope", "Ukraine"}, {"WesternEurope", "SouthernEurope"}, {"WesternEurope", "NorthAfrica"},
        {"SouthernEurope", "Ukraine"}, {"SouthernEurope", "NorthAfrica"}, {"SouthernEurope", "Egypt"},
        {"SouthernEurope", "MiddleEast"}, {"Ukraine", "Ural"}, {"Ukraine", "Afghanistan"}, {"Ukraine", "MiddleEast"},
        {"NorthAfrica", "Egypt"}, {"NorthAfrica", "EastAfrica"}, {"NorthAfrica", "Congo"}, {"Egypt", "EastAfrica"},
        {"Egypt", "MiddleEast"}, {"EastAfrica", "Congo"}, {"EastAfrica", "SouthAfrica"}, {"EastAfrica", "Madagascar"},
        {"EastAfrica", "MiddleEast"}, {"Congo", "SouthAfrica"}, {"SouthAfrica", "Madagascar"},
        {"Ural", "Siberia"}, {"Ural", "China"}, {"Ural", "Afghanistan"}, {"Siberia", "Yakutsk"},
        {"Siberia", "Irkutsk"}, {"Siberia", "Mongolia"}, {"Siberia", "China"}, {"Yakutsk", "Kamchatka"},
        {"Yakutsk", "Irkutsk"}, {"Irkutsk", "Kamchatka"}, {"Irkutsk", "Mongolia"}, {"Kamchatka", "Mongolia"},
        {"Kamchatka", "Japan"}, {"Mongolia", "Japan"}, {"Mongolia", "China"}, {"China", "Afghanistan"},
        {"China", "India"}, {"China", "Siam"}, {"Afghanistan", "India"}, {"Afghanistan", "MiddleEast"},
        {"MiddleEast", "India"}, {"India", "Siam"}, {"Siam", "Indonesia"},
        {"Indonesia", "NewGuinea"}, {"Indonesia", "WesternAustralia"}, {"NewGuinea", "WesternAustralia"},
        {"NewGuinea", "EasternAustralia"}, {"WesternAustralia", "EasternAustralia"},
    };
    return Board(std::move(t), std::move(c), std::move(e));
  }();
  return board;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Reinforce: return "Reinforce";
    case Phase::Attack: return "Attack";
    case Phase::Fortify: return "Fortify";
  }
  return "?";
}

int GameState::territory_count(int player) const {
  return static_cast<int>(std::count_if(territories.begin(), territories.end(),
                                        [&](const TerritoryState& t) { return t.owner == player; }));
}

int GameState::army_count(int player) const {
  int n = 0;
  for (const auto& t : territories) {
    if (t.owner == player) n += t.armies;
  }
  return n;
}

int GameState::continent_owner(int continent) const {
  const auto& m = board->members(continent);
  int owner = territories[m.front()].owner;
  for (int t : m) {
    if (territories[t].owner != owner) return -1;
  }
  return owner;
}

int GameState::reinforcements(int player) const {
  int n = std::max(3, territory_count(player) / 3);
  for (std::size_t c = 0; c < board->continents().size(); ++c) {
    if (continent_owner(static_cast<int>(c)) == player) n += board->continents()[c].bonus;
  }
  return n;
}

bool GameState::connected(int from, int to) const {
  int owner = territories[from].owner;
  if (territories[to].owner != owner) return false;
  std::vector<bool> seen(territories.size(), false);
  std::vector<int> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    if (t == to) return true;
    for (int n : board->neighbors(t)) {
      if (!seen[n] && territories[n].owner == owner) {
        seen[n] = true;
        stack.push_back(n);
      }
    }
  }
  return false;
}

bool GameState::valid() const {
  if (!board || territories.size() != board->size()) return false;
  for (const auto& t : territories) {
    if (t.owner < 0 || t.owner >= static_cast<int>(alive.size()) || t.armies < 1) return false;
  }
  return true;
}

std::string_view to_string(GameCommand::Kind kind) {
  switch (kind) {
    case GameCommand::Kind::Reinforce: return "Reinforce";
    case GameCommand::Kind::Attack: return "Attack";
    case GameCommand::Kind::Fortify: return "Fortify";
    case GameCommand::Kind::EndPhase: return "EndPhase";
  }
  return "?";
}

std::string describe(const Board& board, const GameCommand& c) {
  auto n = [&](int t) { return t >= 0 && t < static_cast<int>(board.size()) ? board.name(t) : std::string("?"); };
  switch (c.kind) {
    case GameCommand::Kind::Reinforce: return "Reinforce(" + n(c.from) + ", " + std::to_string(c.amount) + ")";
    case GameCommand::Kind::Attack:
      return "Attack(" + n(c.from) + ", " + n(c.to) + ", " + std::to_string(c.amount) + ")";
    case GameCommand::Kind::Fortify:
      return "Fortify(" + n(c.from) + ", " + n(c.to) + ", " + std::to_string(c.amount) + ")";
    case GameCommand::Kind::EndPhase: return "EndPhase";
  }
  return "?";
}

BattleOutcome resolve_battle(std::vector<int> attacker, std::vector<int> defender) {
  std::sort(attacker.begin(), attacker.end(), std::greater<>());
  std::sort(defender.begin(), defender.end(), std::greater<>());
  BattleOutcome out;
  std::size_t n = std::min(attacker.size(), defender.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (attacker[i] > defender[i]) ++out.defender_losses;
    else ++out.attacker_losses;
  }
  return out;
}

std::vector<ThreatRow> build_threat_table(const GameState& state, int player) {
  if (player < 0 || player >= static_cast<int>(state.alive.size())) {
    throw Error(ErrorCode::UnknownPlayer, std::to_string(player));
  }
  const Board& b = *state.board;
  std::vector<ThreatRow> rows;
  for (std::size_t t = 0; t < b.size(); ++t) {
    if (state.territories[t].owner != player) continue;
    ThreatRow row{b.name(static_cast<int>(t)), state.territories[t].armies, {}, false};
    for (int n : b.neighbors(static_cast<int>(t))) {
      const auto& ns = state.territories[n];
      row.neighbors.push_back({b.name(n), ns.owner, ns.armies, ns.owner == player});
      if (b.continent_of(n) != b.continent_of(static_cast<int>(t))) row.is_continent_border = true;
    }
    std::sort(row.neighbors.begin(), row.neighbors.end(),
              [](const ThreatNeighbor& x, const ThreatNeighbor& y) { return x.territory < y.territory; });
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const ThreatRow& x, const ThreatRow& y) { return x.territory < y.territory; });
  return rows;
}

}  // namespace keraia::risk
