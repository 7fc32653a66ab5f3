#pragma once

#include <random>
#include <string>
#include <vector>

namespace keraia::test {

// Random well-formed KSYNTH source: nested clouds, knowledge sources with
// mixed slot values, responders and attractors, DRels, rules, lines of
// thought with forks, dimensions, junctures and anomaly specs. Every
// cross-reference resolves.
class RandomDocument {
 public:
  explicit RandomDocument(std::uint64_t seed) : rng_(seed) {}

  std::string generate() {
    out_.clear();
    ks_.clear();
    dim_names_.clear();
    int dims = pick(0, 2);
    for (int i = 0; i < dims; ++i) dim_names_.push_back("Dim-" + std::to_string(i));
    int clouds = pick(1, 3);
    for (int c = 0; c < clouds; ++c) cloud("Cloud-" + std::to_string(c), 0, "");
    if (ks_.size() >= 2 && coin()) drel();
    int rules = pick(0, 3);
    for (int r = 0; r < rules; ++r) rule(r);
    int lots = ks_.empty() ? 0 : pick(1, 3);
    for (int l = 0; l < lots; ++l) lot(l, lots);
    for (const auto& d : dim_names_) dimension(d);
    if (!dim_names_.empty() && lots > 0) {
      out_ += "juncture J-1 {\n  dimension " + dim_names_[0] + "\n  lot LoT-0\n}\n";
    }
    if (!ks_.empty() && coin()) {
      const auto& k = ks_[pick(0, static_cast<int>(ks_.size()) - 1)];
      out_ += "anomaly A-1 {\n  path " + k.cloud + "/" + k.name + "/n0\n  min " + number() + "\n  max 1000\n}\n";
    }
    return out_;
  }

 private:
  struct KsInfo {
    std::string name;
    std::string cloud;
  };

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }
  std::string pad(int depth) const { return std::string(depth * 2, ' '); }

  std::string number() {
    int v = pick(-400, 400);
    std::string s = std::to_string(v / 4);
    if (v % 4 != 0) s = (v < 0 && v / 4 == 0 ? "-" : "") + s + (std::abs(v % 4) == 2 ? ".5" : std::abs(v % 4) == 1 ? ".25" : ".75");
    return s;
  }

  std::string text() {
    static const std::string alphabet = "abcXYZ 019_-/.'\"\\{}#";
    std::string s = "\"";
    int n = pick(0, 8);
    for (int i = 0; i < n; ++i) {
      char c = alphabet[pick(0, static_cast<int>(alphabet.size()) - 1)];
      if (c == '"' || c == '\\') s += '\\';
      s += c;
    }
    return s + "\"";
  }

  std::string scalar() {
    switch (pick(0, 4)) {
      case 0: return number();
      case 1: return number() + " \"kg\"";
      case 2: return text();
      case 3: return coin() ? "true" : "false";
      default: return ks_.empty() ? number() : ks_[pick(0, static_cast<int>(ks_.size()) - 1)].name;
    }
  }

  std::string value(int depth) {
    int k = depth > 1 ? 0 : pick(0, 5);
    if (k == 4) {
      std::string s = "[";
      int n = pick(0, 3);
      for (int i = 0; i < n; ++i) s += (i ? ", " : "") + value(depth + 1);
      return s + "]";
    }
    if (k == 5) {
      std::string s = "{";
      int n = pick(0, 2);
      for (int i = 0; i < n; ++i) s += (i ? ", " : "") + std::string("m") + std::to_string(i) + " = " + value(depth + 1);
      return s + "}";
    }
    return scalar();
  }

  void slots(int depth, int nesting) {
    out_ += pad(depth) + "slot n0 = " + number() + "\n";
    int n = pick(0, 4);
    for (int i = 1; i <= n; ++i) {
      if (nesting < 2 && pick(0, 4) == 0) {
        out_ += pad(depth) + "slot g" + std::to_string(i) + " {\n";
        slots(depth + 1, nesting + 1);
        out_ += pad(depth) + "}\n";
      } else {
        out_ += pad(depth) + "slot s" + std::to_string(i) + " = " + value(0) + "\n";
      }
    }
  }

  void knowledge_source(const std::string& name, const std::string& cloud_name, int depth) {
    out_ += pad(depth) + "ks " + name + " {\n";
    slots(depth + 1, 0);
    if (coin()) out_ += pad(depth + 1) + "explains \"Value {n0} of " + name + "\"\n";
    out_ += pad(depth + 1) + "responder r0 = set(path = \"n0\", value = " + number() + ")\n";
    if (coin()) out_ += pad(depth + 1) + "responder r1 = noop()\n";
    if (coin()) out_ += pad(depth + 1) + "attractor \"?new != 0\" -> r0 watch n0\n";
    out_ += pad(depth) + "}\n";
    ks_.push_back({name, cloud_name});
  }

  void cloud(const std::string& name, int depth, const std::string& parent_path) {
    std::string path = parent_path.empty() ? name : parent_path + "/" + name;
    out_ += pad(depth) + "cloud " + name + " {\n";
    if (!dim_names_.empty() && coin()) out_ += pad(depth + 1) + "tag " + dim_names_[0] + "\n";
    int n = pick(1, 3);
    for (int i = 0; i < n; ++i) knowledge_source("KS-" + std::to_string(ks_.size()), path, depth + 1);
    if (depth < 2 && pick(0, 2) == 0) cloud(name + "-" + std::to_string(depth), depth + 1, path);
    out_ += pad(depth) + "}\n";
  }

  void drel() {
    out_ += "drel DRel-1 {\n  source " + ks_[0].name + "\n  target " + ks_[1].name + "\n  share n0, s9\n";
    if (coin()) out_ += "  when \"source.n0 >= target.n0 or true\"\n";
    if (coin()) out_ += "  priority " + std::to_string(pick(1, 5)) + "\n";
    out_ += "}\n";
  }

  void rule(int r) {
    out_ += "rule rule-" + std::to_string(r) + " {\n  ruleset RS-" + std::to_string(r % 2) + "\n";
    if (coin()) out_ += "  salience " + std::to_string(pick(-5, 20)) + "\n";
    out_ += "  find ?a where \"n0 > " + number() + "\"\n";
    if (coin()) out_ += "  fact Seen(?a, " + scalar() + ")\n";
    if (coin()) out_ += "  absent fact Done(?a)\n";
    if (coin()) out_ += "  test \"?a.n0 != 3\"\n";
    if (coin()) out_ += "  maximize ?a.n0 as Best\n";
    out_ += "  then {\n    assert Done(?a)\n";
    if (coin()) out_ += "    set ?a.flag = " + scalar() + "\n";
    if (coin()) out_ += "    command Note(item = ?a, score = expr \"?a.n0 + 1\", label = " + text() + ")\n";
    if (coin()) out_ += "    halt\n";
    out_ += "  }\n}\n";
  }

  void lot(int l, int lots) {
    out_ += "lot LoT-" + std::to_string(l) + " {\n";
    int steps = pick(1, 3);
    for (int s = 0; s < steps; ++s) {
      const auto& k = ks_[pick(0, static_cast<int>(ks_.size()) - 1)];
      std::string head = "  step " + k.name + (coin() ? " responder r0" : "");
      if (s == steps - 1 && coin()) {
        out_ += head + " {\n    fork {\n";
        out_ += "      branch first when \"n0 > 0\" -> step 1\n";
        if (lots > 1 && l + 1 < lots) out_ += "      branch other when \"n0 < -10\" -> lot LoT-" + std::to_string(l + 1) + "\n";
        out_ += "      branch rest -> halt\n    }\n  }\n";
      } else {
        out_ += head + "\n";
      }
    }
    out_ += "}\n";
  }

  void dimension(const std::string& name) {
    out_ += "dimension " + name + " {\n  description " + text() + "\n";
    if (!ks_.empty()) out_ += "  assume " + ks_[0].cloud + "/" + ks_[0].name + "/n0 = " + number() + "\n";
    out_ += "}\n";
  }

  std::mt19937_64 rng_;
  std::string out_;
  std::vector<KsInfo> ks_;
  std::vector<std::string> dim_names_;
};

}  // namespace keraia::test
