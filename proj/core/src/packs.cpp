#include "keraia/packs.hpp"

#include <cstdlib>

#include "keraia/error.hpp"

namespace keraia {

std::filesystem::path pack_dir() {
  if (const char* env = std::getenv("KERAIA_PACK_DIR"); env && *env) return env;
  return KERAIA_PACK_DIR_DEFAULT;
}

std::vector<std::string> pack_names() { return {"naval", "water", "risk-weakest", "risk-strongest"}; }

std::filesystem::path pack_file(std::string_view pack) {
  std::filesystem::path p(pack);
  if (p.extension() == ".ksynth") return p;
  if (pack == "naval") return pack_dir() / "naval.ksynth";
  if (pack == "water") return pack_dir() / "water.ksynth";
  if (pack == "risk" || pack == "risk-weakest") return pack_dir() / "risk_weakest.ksynth";
  if (pack == "risk-strongest") return pack_dir() / "risk_strongest.ksynth";
  throw Error(ErrorCode::InvalidArgument, "unknown pack '" + std::string(pack) + "'");
}

ksynth::Document parse_pack(std::string_view pack) { return ksynth::parse_file_or_throw(pack_file(pack)); }

void load_pack(KnowledgeBase& kb, std::string_view pack) { ksynth::load(kb, parse_pack(pack)); }

}  // namespace keraia
