#pragma once

#include <optional>
#include <string>

#include "keraia/error.hpp"
#include "keraia/knowledge_base.hpp"
#include "keraia/ksynth.hpp"
#include "keraia/packs.hpp"

namespace keraia::test {

inline KnowledgeBase pack_kb(const std::string& name) {
  KnowledgeBase kb;
  load_pack(kb, name);
  return kb;
}

inline KnowledgeBase source_kb(const std::string& text) {
  KnowledgeBase kb;
  ksynth::load(kb, ksynth::parse_or_throw(text));
  return kb;
}

// Code of the keraia::Error thrown by `fn`, or nullopt when it returns.
template <typename Fn>
std::optional<ErrorCode> error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace keraia::test
