#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "keraia/ksynth.hpp"

namespace keraia {

// Directory holding the shipped `.ksynth` packs: $KERAIA_PACK_DIR when set,
// otherwise the location fixed at build time.
std::filesystem::path pack_dir();

// Shipped pack names: naval, water, risk-weakest, risk-strongest.
std::vector<std::string> pack_names();

// Entry file of a pack; a path ending in ".ksynth" is returned unchanged.
// Throws InvalidArgument for unknown names.
std::filesystem::path pack_file(std::string_view pack);

ksynth::Document parse_pack(std::string_view pack);
void load_pack(KnowledgeBase& kb, std::string_view pack);

}  // namespace keraia
