#include "keraia/value.hpp"

#include <charconv>
#include <cmath>

namespace keraia {

std::optional<std::string_view> SlotValue::symbol() const {
  if (is_text()) return std::string_view(text());
  if (is_ref()) return std::string_view(ref_name());
  return std::nullopt;
}

const SlotValue* SlotValue::find(std::string_view key) const {
  if (!is_map()) return nullptr;
  for (const auto& e : entries()) {
    if (e.name == key) return &e.value;
  }
  return nullptr;
}

SlotValue* SlotValue::find(std::string_view key) {
  return const_cast<SlotValue*>(std::as_const(*this).find(key));
}

SlotValue& SlotValue::put(std::string_view key, SlotValue value) {
  if (!is_map()) data_ = SlotMap{};
  if (auto* existing = find(key)) {
    *existing = std::move(value);
    return *existing;
  }
  entries().push_back(SlotEntry{std::string(key), std::move(value)});
  return entries().back().value;
}

bool SlotValue::erase(std::string_view key) {
  if (!is_map()) return false;
  auto& es = entries();
  for (auto it = es.begin(); it != es.end(); ++it) {
    if (it->name == key) {
      es.erase(it);
      return true;
    }
  }
  return false;
}

bool operator==(const SlotValue& a, const SlotValue& b) { return a.data_ == b.data_; }

std::string_view to_string(SlotValue::Kind kind) {
  switch (kind) {
    case SlotValue::Kind::Text: return "text";
    case SlotValue::Kind::Number: return "number";
    case SlotValue::Kind::Boolean: return "boolean";
    case SlotValue::Kind::Reference: return "reference";
    case SlotValue::Kind::List: return "list";
    case SlotValue::Kind::Map: return "map";
  }
  return "?";
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string render(const SlotValue& value) {
  switch (value.kind()) {
    case SlotValue::Kind::Text: return value.text();
    case SlotValue::Kind::Number: {
      auto out = format_number(value.number());
      if (!value.unit().empty()) out += " " + value.unit();
      return out;
    }
    case SlotValue::Kind::Boolean: return value.boolean() ? "true" : "false";
    case SlotValue::Kind::Reference: return value.ref_name();
    case SlotValue::Kind::List: {
      std::string out = "[";
      bool first = true;
      for (const auto& v : value.list()) {
        if (!first) out += ", ";
        first = false;
        out += render(v);
      }
      return out + "]";
    }
    case SlotValue::Kind::Map: {
      std::string out = "{";
      bool first = true;
      for (const auto& e : value.entries()) {
        if (!first) out += ", ";
        first = false;
        out += e.name + ": " + render(e.value);
      }
      return out + "}";
    }
  }
  return {};
}

namespace {

void append_quoted(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

}  // namespace

std::string canonical(const SlotValue& value) {
  std::string out;
  switch (value.kind()) {
    case SlotValue::Kind::Text: append_quoted(out, value.text()); break;
    case SlotValue::Kind::Number:
      out = "#" + format_number(value.number());
      if (!value.unit().empty()) append_quoted(out, value.unit());
      break;
    case SlotValue::Kind::Boolean: out = value.boolean() ? "true" : "false"; break;
    case SlotValue::Kind::Reference: out = "&" + value.ref_name(); break;
    case SlotValue::Kind::List:
      out = "[";
      for (const auto& v : value.list()) out += canonical(v) + ",";
      out += "]";
      break;
    case SlotValue::Kind::Map:
      out = "{";
      for (const auto& e : value.entries()) out += e.name + "=" + canonical(e.value) + ",";
      out += "}";
      break;
  }
  return out;
}

SlotPath split_path(std::string_view text, char sep) {
  SlotPath out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) pos = text.size();
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join_path(const SlotPath& path, char sep) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += sep;
    out += path[i];
  }
  return out;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto first = static_cast<unsigned char>(text.front());
  if (!(std::isalpha(first) || first == '_')) return false;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_' || c == '.' || c == '-')) return false;
  }
  return true;
}

const SlotValue* lookup(const SlotValue& root, const SlotPath& path) {
  const SlotValue* cur = &root;
  for (const auto& seg : path) {
    cur = cur->find(seg);
    if (!cur) return nullptr;
  }
  return cur;
}

void flatten(const SlotValue& root, const std::string& prefix,
             std::vector<std::pair<std::string, SlotValue>>& out) {
  if (!root.is_map()) {
    out.emplace_back(prefix, root);
    return;
  }
  if (!prefix.empty()) out.emplace_back(prefix, root);
  for (const auto& e : root.entries()) {
    flatten(e.value, prefix.empty() ? e.name : prefix + "/" + e.name, out);
  }
}

}  // namespace keraia
