#include "keraia/json_io.hpp"

#include "keraia/error.hpp"

namespace keraia {

Json to_json(const SlotValue& value) {
  switch (value.kind()) {
    case SlotValue::Kind::Text: return value.text();
    case SlotValue::Kind::Number:
      if (value.unit().empty()) return value.number();
      return Json{{"value", value.number()}, {"unit", value.unit()}};
    case SlotValue::Kind::Boolean: return value.boolean();
    case SlotValue::Kind::Reference: return Json{{"ref", value.ref_name()}};
    case SlotValue::Kind::List: {
      Json arr = Json::array();
      for (const auto& v : value.list()) arr.push_back(to_json(v));
      return arr;
    }
    case SlotValue::Kind::Map: {
      Json obj = Json::object();
      for (const auto& e : value.entries()) obj[e.name] = to_json(e.value);
      return Json{{"slots", obj}};
    }
  }
  return nullptr;
}

Json to_json(const std::optional<SlotValue>& value) {
  if (!value) return Json{{"unset", true}};
  return to_json(*value);
}

SlotValue slot_from_json(const Json& json) {
  if (json.is_string()) return SlotValue(json.get<std::string>());
  if (json.is_boolean()) return SlotValue(json.get<bool>());
  if (json.is_number()) return SlotValue(json.get<double>());
  if (json.is_array()) {
    SlotList list;
    for (const auto& v : json) list.push_back(slot_from_json(v));
    return SlotValue(std::move(list));
  }
  if (json.is_object()) {
    if (json.contains("ref")) return SlotValue::ref(json.at("ref").get<std::string>());
    if (json.contains("unit")) return SlotValue(json.at("value").get<double>(), json.at("unit").get<std::string>());
    if (json.contains("slots")) {
      SlotValue map = SlotValue::map();
      for (const auto& [k, v] : json.at("slots").items()) map.put(k, slot_from_json(v));
      return map;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "cannot decode slot value from " + json.dump());
}

}  // namespace keraia
