#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace warnrank::minic {

enum class TokenKind { Identifier, Keyword, Number, String, Char, Operator, Punctuation };

const char* token_kind_name(TokenKind kind) noexcept;

struct LexToken {
  TokenKind kind = TokenKind::Identifier;
  std::string text;
  int line = 1;
  int col = 1;
  // Whether whitespace or a comment separated this token from the previous one.
  bool space_before = false;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return kind == TokenKind::Punctuation && text == t; }
  bool is_op(std::string_view t) const { return kind == TokenKind::Operator && text == t; }
  bool is_keyword(std::string_view t) const { return kind == TokenKind::Keyword && text == t; }
};

bool is_keyword(std::string_view word) noexcept;

// Tokens in source order; comments and whitespace are dropped.
// Throws LexError (with line:col) on a character outside the token grammar.
std::vector<LexToken> lex(std::string_view source);

// Joins token texts, inserting a single space wherever the source had any
// separation.
std::string join_tokens(const std::vector<LexToken>& tokens);

}  // namespace warnrank::minic
