#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "minic/lexer.hpp"

namespace warnrank::prep {

inline constexpr std::string_view kPad = "<pad>";
inline constexpr std::string_view kUnk = "<unk>";
inline constexpr std::string_view kNumberLit = "NUMBER_LIT";
inline constexpr std::string_view kStringLit = "STRING_LIT";
inline constexpr std::string_view kCharLit = "CHAR_LIT";

struct AbstractionTable {
  std::map<std::string, std::string> var_map;   // original -> VARi
  std::map<std::string, std::string> func_map;  // original -> FUNCi
  std::set<std::string> allowlist;

  bool operator==(const AbstractionTable&) const = default;
};

// Library names known to the frontend's effects table.
const std::set<std::string>& default_allowlist();

// VARi, FUNCi, NUMBER_LIT, STRING_LIT, CHAR_LIT. Such names are left as they
// are, which makes abstraction idempotent.
bool is_symbolic_name(std::string_view text);

struct AbstractedContext {
  std::vector<std::string> statements;  // abstracted statement texts, context order
  AbstractionTable table;
};

// Replaces user variables with VARi and user functions with FUNCi (numbered
// from 1 by first occurrence over the whole context), literals with
// NUMBER_LIT / STRING_LIT / CHAR_LIT, and keeps allowlisted library names,
// keywords, operators, and punctuation. Identifiers are classified
// syntactically: followed by "(" means a function.
AbstractedContext abstract_identifiers(const std::vector<std::vector<minic::LexToken>>& statements,
                                       const std::set<std::string>& allowlist = default_allowlist());

// Same, starting from statement texts (lexed first).
AbstractedContext abstract_texts(const std::vector<std::string>& statements,
                                 const std::set<std::string>& allowlist = default_allowlist());

}  // namespace warnrank::prep
