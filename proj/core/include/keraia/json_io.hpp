#pragma once

#include <nlohmann/json.hpp>

#include "keraia/value.hpp"

namespace keraia {

using Json = nlohmann::ordered_json;

// Tagged encoding: plain JSON scalars for text/bool/unitless numbers,
// {"value","unit"} for annotated numbers, {"ref"} for references,
// {"slots"} for nested maps.
Json to_json(const SlotValue& value);
SlotValue slot_from_json(const Json& json);

Json to_json(const std::optional<SlotValue>& value);  // null = unset

}  // namespace keraia
