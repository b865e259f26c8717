#include "minic/library.hpp"

namespace warnrank::minic {

namespace {

const std::vector<LibraryEffect>& table() {
  static const std::vector<LibraryEffect> kTable = {
      {"strcat", {0}, false},   {"strcpy", {0}, false}, {"sprintf", {0}, false},
      {"snprintf", {0}, false}, {"memcpy", {0}, false}, {"malloc", {}, true},
      {"free", {}, false},      {"strlen", {}, false},
  };
  return kTable;
}

}  // namespace

std::span<const LibraryEffect> library_effects() noexcept { return table(); }

const LibraryEffect* find_library_effect(std::string_view name) noexcept {
  for (const auto& e : table()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

bool is_library_function(std::string_view name) noexcept { return find_library_effect(name) != nullptr; }

}  // namespace warnrank::minic
