#include "preprocess/abstraction.hpp"

#include <regex>

#include "minic/ast.hpp"
#include "minic/library.hpp"

namespace warnrank::prep {

const std::set<std::string>& default_allowlist() {
  static const std::set<std::string> names = [] {
    std::set<std::string> s;
    for (const auto& e : minic::library_effects()) s.insert(std::string(e.name));
    return s;
  }();
  return names;
}

bool is_symbolic_name(std::string_view text) {
  static const std::regex pattern("(VAR|FUNC)[1-9][0-9]*|NUMBER_LIT|STRING_LIT|CHAR_LIT");
  return std::regex_match(text.begin(), text.end(), pattern);
}

namespace {

class Numbering {
 public:
  Numbering(std::string prefix, const std::set<std::string>& taken) : prefix_(std::move(prefix)), taken_(taken) {}

  std::string next() {
    std::string name;
    do {
      name = prefix_ + std::to_string(++count_);
    } while (taken_.count(name));
    return name;
  }

 private:
  std::string prefix_;
  const std::set<std::string>& taken_;
  int count_ = 0;
};

}  // namespace

AbstractedContext abstract_identifiers(const std::vector<std::vector<minic::LexToken>>& statements,
                                       const std::set<std::string>& allowlist) {
  AbstractedContext out;
  out.table.allowlist = allowlist;

  // Symbolic names already present keep their meaning; fresh numbering skips them.
  std::set<std::string> taken;
  for (const auto& st : statements) {
    for (const auto& t : st) {
      if (t.kind == minic::TokenKind::Identifier && is_symbolic_name(t.text)) taken.insert(t.text);
    }
  }
  Numbering vars("VAR", taken), funcs("FUNC", taken);

  for (const auto& st : statements) {
    const auto roles = minic::identifier_roles(st);
    std::vector<minic::LexToken> abstracted = st;
    for (std::size_t k = 0; k < st.size(); ++k) {
      auto& t = abstracted[k];
      switch (t.kind) {
        case minic::TokenKind::Number: t.text = kNumberLit; break;
        case minic::TokenKind::String: t.text = kStringLit; break;
        case minic::TokenKind::Char: t.text = kCharLit; break;
        case minic::TokenKind::Identifier: {
          if (is_symbolic_name(t.text) || allowlist.count(t.text)) break;
          if (roles[k] == minic::IdentRole::Variable) {
            auto [it, fresh] = out.table.var_map.emplace(t.text, std::string());
            if (fresh) it->second = vars.next();
            t.text = it->second;
          } else {
            auto [it, fresh] = out.table.func_map.emplace(t.text, std::string());
            if (fresh) it->second = funcs.next();
            t.text = it->second;
          }
          break;
        }
        default: break;
      }
    }
    out.statements.push_back(minic::join_tokens(abstracted));
  }
  return out;
}

AbstractedContext abstract_texts(const std::vector<std::string>& statements, const std::set<std::string>& allowlist) {
  std::vector<std::vector<minic::LexToken>> lexed;
  lexed.reserve(statements.size());
  for (const auto& s : statements) lexed.push_back(minic::lex(s));
  return abstract_identifiers(lexed, allowlist);
}

}  // namespace warnrank::prep
