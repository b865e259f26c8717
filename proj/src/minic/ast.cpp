#include "minic/ast.hpp"

#include "minic/library.hpp"

namespace warnrank::minic {

std::vector<IdentRole> identifier_roles(const std::vector<LexToken>& tokens) {
  std::vector<IdentRole> roles(tokens.size(), IdentRole::None);
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (tokens[k].kind != TokenKind::Identifier) continue;
    const bool called = k + 1 < tokens.size() && tokens[k + 1].is_punct("(");
    if (!called) {
      roles[k] = IdentRole::Variable;
    } else {
      roles[k] = is_library_function(tokens[k].text) ? IdentRole::Library : IdentRole::Function;
    }
  }
  return roles;
}

const char* stmt_kind_name(StmtKind kind) noexcept {
  switch (kind) {
    case StmtKind::Decl: return "decl";
    case StmtKind::Assign: return "assign";
    case StmtKind::Call: return "call";
    case StmtKind::IfCond: return "if-cond";
    case StmtKind::WhileCond: return "while-cond";
    case StmtKind::ForHeader: return "for-header";
    case StmtKind::Return: return "return";
    case StmtKind::BlockEnter: return "block-enter";
  }
  return "?";
}

const FunctionAst* TranslationUnit::find_function(std::string_view name) const {
  for (const auto& f : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

bool same_facts(const Stmt& a, const Stmt& b) {
  return a.id == b.id && a.kind == b.kind && a.defs == b.defs && a.uses == b.uses && a.callees == b.callees &&
         a.derefs == b.derefs;
}

}  // namespace

bool structurally_equal(const TranslationUnit& a, const TranslationUnit& b) {
  if (a.functions.size() != b.functions.size() || a.globals.size() != b.globals.size()) return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    if (!(a.globals[i].decl == b.globals[i].decl) || !same_facts(a.globals[i].stmt, b.globals[i].stmt)) return false;
  }
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& fa = a.functions[i];
    const auto& fb = b.functions[i];
    if (fa.name != fb.name || !(fa.return_type == fb.return_type) || !(fa.params == fb.params) ||
        !(fa.body == fb.body) || fa.stmts.size() != fb.stmts.size()) {
      return false;
    }
    for (std::size_t k = 0; k < fa.stmts.size(); ++k) {
      if (!same_facts(fa.stmts[k], fb.stmts[k])) return false;
    }
  }
  return true;
}

}  // namespace warnrank::minic
