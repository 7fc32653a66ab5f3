#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "keraia/error.hpp"
#include "keraia/ksynth.hpp"
#include "keraia/packs.hpp"
#include "keraia/risk/game.hpp"

namespace keraia::risk {

namespace {

Phase parse_phase(const std::string& s) {
  for (Phase p : {Phase::Reinforce, Phase::Attack, Phase::Fortify}) {
    if (to_string(p) == s) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown phase '" + s + "'");
}

Json command_json(const Board& board, int player, const GameCommand& c) {
  Json j;
  j["player"] = player;
  j["command"] = std::string(to_string(c.kind));
  if (c.from >= 0) j["from"] = board.name(c.from);
  if (c.to >= 0) j["to"] = board.name(c.to);
  if (c.kind != GameCommand::Kind::EndPhase) j["amount"] = c.amount;
  return j;
}

std::string player_ks(int p) { return "P" + std::to_string(p); }

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

class RandomBot : public MirrorBot {
 public:
  RandomBot(BaselineKind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {
    static const std::string names[] = {"random", "benevolent", "cheater"};
    name_ = names[static_cast<int>(kind)];
  }

  const std::string& kind() const override { return name_; }
  bool cheats() const override { return kind_ == BaselineKind::Cheater; }

 protected:
  GameCommand decide(const GameState& s, Phase phase, int pool) override {
    const Board& b = *s.board;
    std::vector<int> owned;
    for (int t = 0; t < static_cast<int>(b.size()); ++t) {
      if (s.territories[t].owner == self()) owned.push_back(t);
    }
    switch (phase) {
      case Phase::Reinforce: {
        if (owned.empty() || pool <= 0) return GameCommand::end_phase();
        int t = owned[uniform(rng_, 0, static_cast<int>(owned.size()) - 1)];
        return GameCommand::reinforce(t, uniform(rng_, 1, pool));
      }
      case Phase::Attack: {
        if (kind_ == BaselineKind::Benevolent) return GameCommand::end_phase();
        std::vector<std::pair<int, int>> options;
        for (int t : owned) {
          if (s.territories[t].armies < 2) continue;
          for (int n : b.neighbors(t)) {
            if (s.territories[n].owner != self()) options.emplace_back(t, n);
          }
        }
        int pick = uniform(rng_, 0, static_cast<int>(options.size()));
        if (pick == static_cast<int>(options.size())) return GameCommand::end_phase();
        auto [from, to] = options[pick];
        return GameCommand::attack(from, to, uniform(rng_, 1, std::min(3, s.territories[from].armies - 1)));
      }
      case Phase::Fortify: {
        std::vector<std::pair<int, int>> options;
        for (int t : owned) {
          if (s.territories[t].armies < 2) continue;
          for (int n : b.neighbors(t)) {
            if (s.territories[n].owner == self()) options.emplace_back(t, n);
          }
        }
        int pick = uniform(rng_, 0, static_cast<int>(options.size()));
        if (pick == static_cast<int>(options.size())) return GameCommand::end_phase();
        auto [from, to] = options[pick];
        return GameCommand::fortify(from, to, uniform(rng_, 1, s.territories[from].armies - 1));
      }
    }
    return GameCommand::end_phase();
  }

 private:
  BaselineKind kind_;
  std::string name_;
  std::mt19937_64 rng_;
};

const ksynth::Document& cached_pack(const std::string& pack) {
  static std::map<std::string, ksynth::Document> cache;
  auto path = pack_file(pack).string();
  auto it = cache.find(path);
  if (it == cache.end()) it = cache.emplace(path, parse_pack(pack)).first;
  return it->second;
}

int as_int(const SlotValue& v, const std::string& what) {
  if (!v.is_number()) throw Error(ErrorCode::NonNumericValue, what + " = " + render(v));
  return static_cast<int>(std::lround(v.number()));
}

const SlotValue& arg(const Command& c, const std::string& name) {
  for (const auto& e : c.args) {
    if (e.name == name) return e.value;
  }
  throw Error(ErrorCode::InvalidArgument, c.name + " lacks argument '" + name + "'");
}

}  // namespace

// --- MirrorBot ---

void MirrorBot::join(TopicBus& bus, int player) {
  self_ = player;
  sub_ = bus.subscribe(kStateTopic);
}

void MirrorBot::act(TopicBus& bus) {
  if (!sub_) throw Error(ErrorCode::InvalidArgument, "bot has not joined a game");
  while (auto m = bus.poll(*sub_)) apply(m->body, bus);
}

void MirrorBot::apply(const Json& e, TopicBus& bus) {
  const std::string& event = e.at("event").get_ref<const std::string&>();
  if (event == "setup") {
    mirror_ = GameState{};
    mirror_.board = &classic_board();
    mirror_.seed = e.at("seed").get<std::uint64_t>();
    mirror_.alive.assign(e.at("players").get<std::size_t>(), true);
    mirror_.territories.resize(mirror_.board->size());
    for (const auto& t : e.at("territories")) {
      int i = mirror_.board->index(t.at("name").get<std::string>());
      mirror_.territories.at(i) = {t.at("owner").get<int>(), t.at("armies").get<int>()};
    }
    on_setup(mirror_);
  } else if (event == "update") {
    for (const auto& t : e.at("territories")) {
      int i = mirror_.board->index(t.at("name").get<std::string>());
      mirror_.territories.at(i) = {t.at("owner").get<int>(), t.at("armies").get<int>()};
    }
  } else if (event == "eliminated") {
    mirror_.alive.at(e.at("player").get<int>()) = false;
  } else if (event == "prompt") {
    mirror_.turn = e.at("turn").get<int>();
    mirror_.current = e.at("player").get<int>();
    mirror_.phase = parse_phase(e.at("phase").get<std::string>());
    if (mirror_.current != self_) return;
    GameCommand c = decide(mirror_, mirror_.phase, e.at("pool").get<int>());
    bus.publish(kCommandTopic, command_json(*mirror_.board, self_, c));
  }
}

std::unique_ptr<Bot> baseline_bot(BaselineKind kind, std::uint64_t seed) {
  return std::make_unique<RandomBot>(kind, seed);
}

// --- AIAsset ---

AIAsset::AIAsset(const std::string& pack) : kind_("aiasset:" + pack) {
  ksynth::load(kb_, cached_pack(pack));
  functions_.add("CalculateDice", [](const std::vector<SlotValue>& args, const EvalContext&) {
    if (args.size() != 1) throw Error(ErrorCode::InvalidArgument, "CalculateDice takes one argument");
    return SlotValue(static_cast<double>(std::min(3, as_int(args[0], "CalculateDice argument") - 1)));
  });
  functions_.add("CalculateNeeded", [](const std::vector<SlotValue>& args, const EvalContext& ctx) {
    if (args.size() != 1) throw Error(ErrorCode::InvalidArgument, "CalculateNeeded takes one argument");
    auto name = as_appellation(*ctx.kb, args[0]);
    if (!name) throw Error(ErrorCode::TypeMismatch, "CalculateNeeded needs a territory");
    auto armies = read_slot(ctx, *name, {"armyCount"});
    if (!armies) throw Error(ErrorCode::UnknownPath, *name + "/armyCount");
    return SlotValue(static_cast<double>(std::max(0, 5 - as_int(*armies, *name + "/armyCount"))));
  });
  rt_.functions = &functions_;
  rt_.track_reads = false;
}

void AIAsset::put(const std::string& ks, const std::string& path, SlotValue value) {
  const SlotValue* cur = kb_.slot(ks, split_path(path));
  if (cur && *cur == value) return;
  kb_.set_slot(ks, path, std::move(value));
}

void AIAsset::on_setup(const GameState& s) {
  if (setup_) throw Error(ErrorCode::InvalidArgument, "AIAsset plays one game per instance");
  const Board& b = *s.board;
  KnowledgeBase::ActorScope actor(kb_, "datafusion");
  for (std::size_t c = 0; c < b.continents().size(); ++c) {
    KnowledgeSource ks;
    ks.appellation = b.continents()[c].name;
    ks.slots.put("type", SlotValue("Continent"));
    ks.slots.put("bonus", SlotValue(b.continents()[c].bonus));
    ks.slots.put("currentOwner", SlotValue("none"));
    ks.explains = "Continent " + ks.appellation + ", owner {currentOwner}";
    kb_.put_ks(std::move(ks), "Cloud-Continents");
  }
  for (int t = 0; t < static_cast<int>(b.size()); ++t) {
    KnowledgeSource ks;
    ks.appellation = b.name(t);
    ks.slots.put("type", SlotValue("Territory"));
    ks.slots.put("continent", SlotValue::ref(b.continents()[b.continent_of(t)].name));
    ks.slots.put("owner", SlotValue::ref(player_ks(s.territories[t].owner)));
    ks.slots.put("armyCount", SlotValue(s.territories[t].armies));
    ks.explains = "Territory " + ks.appellation + " held by {owner} with {armyCount} armies";
    kb_.put_ks(std::move(ks), "Cloud-Territories");
  }
  for (std::size_t p = 0; p < s.alive.size(); ++p) {
    KnowledgeSource ks;
    ks.appellation = player_ks(static_cast<int>(p));
    ks.slots.put("type", SlotValue("Player"));
    ks.slots.put("pool", SlotValue(0));
    ks.slots.put("territories", SlotValue(s.territory_count(static_cast<int>(p))));
    kb_.put_ks(std::move(ks), "Cloud-Players");
  }
  for (const auto& [x, y] : b.edges()) {
    rt_.wm.assert_fact({"IsAdjacent", {SlotValue::ref(b.name(x)), SlotValue::ref(b.name(y))}, "datafusion"});
    rt_.wm.assert_fact({"IsAdjacent", {SlotValue::ref(b.name(y)), SlotValue::ref(b.name(x))}, "datafusion"});
  }
  kb_.take_pulses();
  setup_ = std::make_shared<const KnowledgeBase>(kb_);
}

void AIAsset::fuse(const GameState& s, int pool) {
  const Board& b = *s.board;
  KnowledgeBase::ActorScope actor(kb_, "datafusion");
  for (int t = 0; t < static_cast<int>(b.size()); ++t) {
    put(b.name(t), "owner", SlotValue::ref(player_ks(s.territories[t].owner)));
    put(b.name(t), "armyCount", SlotValue(s.territories[t].armies));
  }
  for (std::size_t c = 0; c < b.continents().size(); ++c) {
    int owner = s.continent_owner(static_cast<int>(c));
    put(b.continents()[c].name, "currentOwner", owner < 0 ? SlotValue("none") : SlotValue::ref(player_ks(owner)));
  }
  for (std::size_t p = 0; p < s.alive.size(); ++p) {
    put(player_ks(static_cast<int>(p)), "territories", SlotValue(s.territory_count(static_cast<int>(p))));
  }
  put(player_ks(self()), "pool", SlotValue(pool));
}

void AIAsset::derive_helpers(const GameState& s, Phase phase) {
  const Board& b = *s.board;
  WorkingMemory& wm = rt_.wm;
  wm.retract_relation("IsBorderTerritory");
  wm.retract_relation("IsConnected");
  std::vector<bool> border(b.size(), false);
  for (int t = 0; t < static_cast<int>(b.size()); ++t) {
    if (s.territories[t].owner != self()) continue;
    for (int n : b.neighbors(t)) {
      if (s.territories[n].owner != self()) border[t] = true;
    }
    if (border[t]) wm.assert_fact({"IsBorderTerritory", {SlotValue::ref(b.name(t))}, "datafusion"});
  }
  if (phase != Phase::Fortify) return;
  // Owned components; only pairs ending on a border territory are useful.
  std::vector<int> comp(b.size(), -1);
  int next = 0;
  for (int t = 0; t < static_cast<int>(b.size()); ++t) {
    if (s.territories[t].owner != self() || comp[t] >= 0) continue;
    std::vector<int> stack{t};
    comp[t] = next;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int n : b.neighbors(u)) {
        if (s.territories[n].owner == self() && comp[n] < 0) {
          comp[n] = next;
          stack.push_back(n);
        }
      }
    }
    ++next;
  }
  for (int a = 0; a < static_cast<int>(b.size()); ++a) {
    if (comp[a] < 0) continue;
    for (int c = 0; c < static_cast<int>(b.size()); ++c) {
      if (c != a && comp[c] == comp[a] && border[c]) {
        wm.assert_fact({"IsConnected", {SlotValue::ref(b.name(a)), SlotValue::ref(b.name(c))}, "datafusion"});
      }
    }
  }
}

GameCommand AIAsset::decide(const GameState& s, Phase phase, int pool) {
  ++decisions_;
  fuse(s, pool);
  {
    KnowledgeBase::ActorScope actor(kb_, "datafusion");
    put("KS-GamePhase", "phase", SlotValue(std::string(to_string(phase))));
  }
  dispatch(kb_, rt_, kb_.take_pulses());
  derive_helpers(s, phase);

  const SlotValue* active = kb_.slot("KS-GamePhase", {"active_ruleset"});
  std::string rule_set = active && active->symbol() ? std::string(*active->symbol()) : "";
  OpResult r;
  {
    KnowledgeBase::ActorScope actor(kb_, "agent:" + player_ks(self()));
    r = run_rule_set(kb_, rt_, rule_set, player_ks(self()));
  }
  kb_.take_pulses();
  if (r.commands.empty()) return GameCommand::end_phase();
  const Command& c = r.commands.front();
  const Board& b = *s.board;
  auto territory = [&](const std::string& key) {
    auto name = arg(c, key).symbol();
    int t = name ? b.index(*name) : -1;
    if (t < 0) throw Error(ErrorCode::InvalidArgument, c.str() + ": unknown territory");
    return t;
  };
  if (c.name == "Reinforce") return GameCommand::reinforce(territory("territory"), as_int(arg(c, "armies"), "armies"));
  if (c.name == "Attack") return GameCommand::attack(territory("from"), territory("to"), as_int(arg(c, "dice"), "dice"));
  if (c.name == "Fortify") {
    return GameCommand::fortify(territory("from"), territory("to"), as_int(arg(c, "armies"), "armies"));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown game command '" + c.name + "'");
}

std::unique_ptr<Bot> make_bot(const std::string& spec, std::uint64_t seed) {
  if (spec == "aiasset" || spec == "aiasset-weakest") return std::make_unique<AIAsset>("risk-weakest");
  if (spec == "aiasset-strongest") return std::make_unique<AIAsset>("risk-strongest");
  if (spec == "random") return baseline_bot(BaselineKind::Random, seed);
  if (spec == "benevolent") return baseline_bot(BaselineKind::Benevolent, seed);
  if (spec == "cheater") return baseline_bot(BaselineKind::Cheater, seed);
  throw Error(ErrorCode::InvalidArgument,
              "unknown bot '" + spec + "' (aiasset, aiasset-weakest, aiasset-strongest, random, benevolent, cheater)");
}

}  // namespace keraia::risk
