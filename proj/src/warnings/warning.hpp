#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace warnrank::warnings {

enum class WarningKind { BO, NPD };
enum class Label { TP, FP };

const char* kind_name(WarningKind k) noexcept;
const char* label_name(Label l) noexcept;
std::optional<WarningKind> parse_kind(std::string_view s);
// Case-insensitive; "tp"/"fp" accepted.
std::optional<Label> parse_label(std::string_view s);

struct Warning {
  std::string id;
  std::string file;
  std::string function;
  int line = 0;
  WarningKind kind = WarningKind::BO;
  std::string detector;
  std::optional<Label> label;

  bool operator==(const Warning&) const = default;
};

struct Dataset {
  std::vector<Warning> warnings;
  std::map<std::string, std::string> project_of;  // file -> project

  std::string project(const Warning& w) const;
  bool fully_labeled() const;
  std::size_t count(Label l) const;
};

}  // namespace warnrank::warnings
