#include "minic/lexer.hpp"

#include <array>
#include <cctype>

#include "util/error.hpp"

namespace warnrank::minic {

namespace {

constexpr std::array<std::string_view, 17> kKeywords = {
    "int",   "char",   "void",   "long",  "short", "unsigned", "signed", "const", "static",
    "if",    "else",   "while",  "for",   "return", "NULL",    "break",  "continue"};

// Longest match first.
constexpr std::array<std::string_view, 20> kMultiOps = {
    "<<=", ">>=", "++", "--", "+=", "-=", "*=", "/=", "%=", "==",
    "!=",  "<=",  ">=", "&&", "||", "->", "<<", ">>", "&=", "|="};

constexpr std::string_view kSingleOps = "+-*/%=<>!&|^~?:.";
constexpr std::string_view kPunct = "(){}[];,";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

const char* token_kind_name(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Number: return "number-literal";
    case TokenKind::String: return "string-literal";
    case TokenKind::Char: return "char-literal";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punctuation: return "punctuation";
  }
  return "?";
}

bool is_keyword(std::string_view word) noexcept {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<LexToken> lex(std::string_view src) {
  std::vector<LexToken> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  bool gap = false;

  auto fail = [&](const std::string& msg) {
    throw LexError(std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto emit = [&](TokenKind kind, std::size_t len) {
    out.push_back(LexToken{kind, std::string(src.substr(i, len)), line, col, gap});
    gap = false;
    advance(len);
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
      gap = true;
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      gap = true;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      const std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) fail("unterminated comment");
      advance(end + 2 - i);
      gap = true;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      const auto word = src.substr(i, j - i);
      emit(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      if (c == '0' && j < src.size() && (src[j] == 'x' || src[j] == 'X')) {
        ++j;
        while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
      } else {
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      while (j < src.size() && (src[j] == 'u' || src[j] == 'U' || src[j] == 'l' || src[j] == 'L')) ++j;
      if (j < src.size() && ident_char(src[j])) {
        advance(j - i);
        fail("malformed number literal");
      }
      emit(TokenKind::Number, j - i);
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c) {
        if (src[j] == '\n') fail("newline in literal");
        if (src[j] == '\\') ++j;
        ++j;
      }
      if (j >= src.size()) fail("unterminated literal");
      if (c == '\'' && j == i + 1) fail("empty char literal");
      emit(c == '"' ? TokenKind::String : TokenKind::Char, j + 1 - i);
      continue;
    }
    bool matched = false;
    for (auto op : kMultiOps) {
      if (src.substr(i, op.size()) == op) {
        emit(TokenKind::Operator, op.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSingleOps.find(c) != std::string_view::npos) {
      emit(TokenKind::Operator, 1);
      continue;
    }
    if (kPunct.find(c) != std::string_view::npos) {
      emit(TokenKind::Punctuation, 1);
      continue;
    }
    if (static_cast<unsigned char>(c) >= 0x80) fail("non-ASCII character outside a literal");
    fail(std::string("unexpected character '") + c + "'");
  }
  return out;
}

std::string join_tokens(const std::vector<LexToken>& tokens) {
  std::string s;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (k > 0 && tokens[k].space_before) s.push_back(' ');
    s += tokens[k].text;
  }
  return s;
}

}  // namespace warnrank::minic
