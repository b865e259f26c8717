#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace warnrank::minic {

// Declared side effects of standard-library calls whose bodies are not
// available. Arguments listed in def_args are written through.
struct LibraryEffect {
  std::string_view name;
  std::vector<int> def_args;
  bool allocates = false;
};

const LibraryEffect* find_library_effect(std::string_view name) noexcept;
std::span<const LibraryEffect> library_effects() noexcept;
bool is_library_function(std::string_view name) noexcept;

}  // namespace warnrank::minic
