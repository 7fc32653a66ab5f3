#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace keraia {

class SlotValue;
struct SlotEntry;

using SlotList = std::vector<SlotValue>;
// Insertion-ordered; serialization preserves declaration order.
using SlotMap = std::vector<SlotEntry>;

struct Number {
  double value = 0.0;
  std::string unit;  // annotation only, never checked

  friend bool operator==(const Number&, const Number&) = default;
};

struct Reference {
  std::string appellation;

  friend bool operator==(const Reference&, const Reference&) = default;
};

class SlotValue {
 public:
  enum class Kind { Text, Number, Boolean, Reference, List, Map };

  SlotValue();
  SlotValue(std::string text);
  SlotValue(const char* text);
  SlotValue(double number, std::string unit = {});
  SlotValue(int number);
  SlotValue(Number number);
  SlotValue(bool flag);
  SlotValue(Reference ref);
  SlotValue(SlotList list);
  SlotValue(SlotMap map);
  SlotValue(const SlotValue&);
  SlotValue(SlotValue&&) noexcept;
  SlotValue& operator=(const SlotValue&);
  SlotValue& operator=(SlotValue&&) noexcept;
  ~SlotValue();

  static SlotValue ref(std::string appellation);
  static SlotValue map();

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool is_text() const noexcept { return kind() == Kind::Text; }
  bool is_number() const noexcept { return kind() == Kind::Number; }
  bool is_bool() const noexcept { return kind() == Kind::Boolean; }
  bool is_ref() const noexcept { return kind() == Kind::Reference; }
  bool is_list() const noexcept { return kind() == Kind::List; }
  bool is_map() const noexcept { return kind() == Kind::Map; }
  bool is_scalar() const noexcept { return !is_list() && !is_map(); }

  const std::string& text() const { return std::get<std::string>(data_); }
  double number() const { return std::get<Number>(data_).value; }
  const std::string& unit() const { return std::get<Number>(data_).unit; }
  const Number& number_value() const { return std::get<Number>(data_); }
  bool boolean() const { return std::get<bool>(data_); }
  const std::string& ref_name() const { return std::get<Reference>(data_).appellation; }
  const SlotList& list() const { return std::get<SlotList>(data_); }
  SlotList& list() { return std::get<SlotList>(data_); }
  const SlotMap& entries() const { return std::get<SlotMap>(data_); }
  SlotMap& entries() { return std::get<SlotMap>(data_); }

  // Text and references both carry a symbolic name; comparisons treat them alike.
  std::optional<std::string_view> symbol() const;

  // Map helpers. `find` returns nullptr when absent or when this is not a map.
  const SlotValue* find(std::string_view key) const;
  SlotValue* find(std::string_view key);
  SlotValue& put(std::string_view key, SlotValue value);
  bool erase(std::string_view key);

  friend bool operator==(const SlotValue& a, const SlotValue& b);

 private:
  std::variant<std::string, Number, bool, Reference, SlotList, SlotMap> data_;
};

struct SlotEntry {
  std::string name;
  SlotValue value;

  friend bool operator==(const SlotEntry& a, const SlotEntry& b) {
    return a.name == b.name && a.value == b.value;
  }
};

inline SlotValue::SlotValue() : data_(SlotMap{}) {}
inline SlotValue::SlotValue(std::string text) : data_(std::move(text)) {}
inline SlotValue::SlotValue(const char* text) : data_(std::string(text)) {}
inline SlotValue::SlotValue(double number, std::string unit) : data_(Number{number, std::move(unit)}) {}
inline SlotValue::SlotValue(int number) : data_(Number{static_cast<double>(number), {}}) {}
inline SlotValue::SlotValue(Number number) : data_(std::move(number)) {}
inline SlotValue::SlotValue(bool flag) : data_(flag) {}
inline SlotValue::SlotValue(Reference ref) : data_(std::move(ref)) {}
inline SlotValue::SlotValue(SlotList list) : data_(std::move(list)) {}
inline SlotValue::SlotValue(SlotMap map) : data_(std::move(map)) {}
inline SlotValue::SlotValue(const SlotValue&) = default;
inline SlotValue::SlotValue(SlotValue&&) noexcept = default;
inline SlotValue& SlotValue::operator=(const SlotValue&) = default;
inline SlotValue& SlotValue::operator=(SlotValue&&) noexcept = default;
inline SlotValue::~SlotValue() = default;
inline SlotValue SlotValue::ref(std::string appellation) { return SlotValue(Reference{std::move(appellation)}); }
inline SlotValue SlotValue::map() { return SlotValue(SlotMap{}); }

std::string_view to_string(SlotValue::Kind kind);

// Human-facing rendering: text unquoted, numbers shortest round-trip, units
// appended after a space.
std::string render(const SlotValue& value);

// Canonical, unambiguous rendering used for digests and value identity.
std::string canonical(const SlotValue& value);

std::string format_number(double value);

// Slot paths are '/'-separated identifier segments.
using SlotPath = std::vector<std::string>;

SlotPath split_path(std::string_view text, char sep = '/');
std::string join_path(const SlotPath& path, char sep = '/');
bool is_identifier(std::string_view text);

const SlotValue* lookup(const SlotValue& root, const SlotPath& path);
void flatten(const SlotValue& root, const std::string& prefix,
             std::vector<std::pair<std::string, SlotValue>>& out);

}  // namespace keraia
