#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "minic/ast.hpp"
#include "minic/lexer.hpp"

namespace warnrank::minic {

// Builds the statement tree and the flat per-function statement lists with
// def/use/callee facts, then validates every function's control-flow graph.
// Throws ParseError (expected/found + line:col) or CfgError (unreachable code).
TranslationUnit parse(const std::vector<LexToken>& tokens, std::string source_id = {});

// lex + parse.
TranslationUnit parse_source(std::string_view source, std::string source_id = {});

// Canonical source rendering: one statement per line, braces everywhere,
// minimal parentheses.
std::string pretty_print(const TranslationUnit& unit);
std::string print_expr(const Expr& e);

}  // namespace warnrank::minic
