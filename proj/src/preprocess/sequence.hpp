#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace warnrank::prep {

// Half-open token index range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct TokenizedContext {
  std::vector<std::string> tokens;
  std::vector<Span> spans;  // one per statement, context order
};

// Lexes each statement and concatenates the tokens. Throws LexError.
TokenizedContext tokenize_context(const std::vector<std::string>& statements);

struct TokenSequence {
  std::vector<std::string> tokens;  // exactly `length` entries; "<pad>" where mask is false
  std::vector<std::uint8_t> mask;   // 1 = real token
  std::vector<Span> spans;          // statements kept, in their original relative order
  std::size_t reported = 0;         // index into spans of the reported statement
  std::vector<std::size_t> kept;    // original statement index of every kept span

  std::size_t length() const noexcept { return tokens.size(); }
  std::size_t real_tokens() const noexcept;
};

// Fits the statements into exactly L positions. If everything fits, the tail
// is padded. Otherwise the reported statement is kept and whole statements
// are added alternately on its left and right (left first); a side stops at
// the first statement that does not fit in the remaining capacity. Throws
// CapacityError when the reported statement alone is longer than L.
TokenSequence fit_length(const std::vector<std::string>& tokens, const std::vector<Span>& spans,
                         std::size_t reported, std::size_t L);

class Vocabulary {
 public:
  static constexpr std::int32_t kPadId = 0;
  static constexpr std::int32_t kUnkId = 1;

  Vocabulary();

  // <pad> = 0, <unk> = 1, then every other token by descending frequency,
  // ties in byte order. "<pad>" occurrences in the input are ignored.
  static Vocabulary build(const std::vector<std::vector<std::string>>& sequences);
  static Vocabulary from_tokens(std::vector<std::string> id_to_token);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::int32_t id(const std::string& token) const;  // <unk> when absent
  bool contains(const std::string& token) const { return index_.count(token) > 0; }
  const std::string& token(std::int32_t id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::vector<std::int32_t> encode(const std::vector<std::string>& tokens) const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

}  // namespace warnrank::prep
