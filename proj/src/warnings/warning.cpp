#include "warnings/warning.hpp"

#include <algorithm>
#include <cctype>

namespace warnrank::warnings {

const char* kind_name(WarningKind k) noexcept { return k == WarningKind::BO ? "BO" : "NPD"; }

const char* label_name(Label l) noexcept { return l == Label::TP ? "TP" : "FP"; }

namespace {
std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}
}  // namespace

std::optional<WarningKind> parse_kind(std::string_view s) {
  const std::string u = upper(s);
  if (u == "BO") return WarningKind::BO;
  if (u == "NPD") return WarningKind::NPD;
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view s) {
  const std::string u = upper(s);
  if (u == "TP") return Label::TP;
  if (u == "FP") return Label::FP;
  return std::nullopt;
}

std::string Dataset::project(const Warning& w) const {
  auto it = project_of.find(w.file);
  return it == project_of.end() ? std::string() : it->second;
}

bool Dataset::fully_labeled() const {
  return std::all_of(warnings.begin(), warnings.end(), [](const Warning& w) { return w.label.has_value(); });
}

std::size_t Dataset::count(Label l) const {
  return static_cast<std::size_t>(
      std::count_if(warnings.begin(), warnings.end(), [l](const Warning& w) { return w.label == l; }));
}

}  // namespace warnrank::warnings
