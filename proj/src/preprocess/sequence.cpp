#include "preprocess/sequence.hpp"

#include <algorithm>
#include <map>

#include "minic/lexer.hpp"
#include "preprocess/abstraction.hpp"
#include "util/error.hpp"

namespace warnrank::prep {

TokenizedContext tokenize_context(const std::vector<std::string>& statements) {
  TokenizedContext out;
  for (const auto& s : statements) {
    const std::size_t begin = out.tokens.size();
    for (auto& t : minic::lex(s)) out.tokens.push_back(std::move(t.text));
    out.spans.push_back({begin, out.tokens.size()});
  }
  return out;
}

std::size_t TokenSequence::real_tokens() const noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

TokenSequence fit_length(const std::vector<std::string>& tokens, const std::vector<Span>& spans, std::size_t reported,
                         std::size_t L) {
  if (reported >= spans.size()) throw InternalError("fit_length: reported statement index out of range");
  if (spans[reported].size() > L) {
    throw CapacityError("reported statement has " + std::to_string(spans[reported].size()) +
                        " tokens, more than the capacity " + std::to_string(L));
  }
  std::size_t total = 0;
  for (const auto& s : spans) total += s.size();

  std::size_t lo = reported, hi = reported;  // kept statements: [lo, hi]
  if (total <= L) {
    lo = 0;
    hi = spans.size() - 1;
  } else {
    std::size_t used = spans[reported].size();
    bool left_open = lo > 0, right_open = hi + 1 < spans.size();
    while (left_open || right_open) {
      if (left_open) {
        if (used + spans[lo - 1].size() <= L) {
          used += spans[--lo].size();
          left_open = lo > 0;
        } else {
          left_open = false;
        }
      }
      if (right_open) {
        if (used + spans[hi + 1].size() <= L) {
          used += spans[++hi].size();
          right_open = hi + 1 < spans.size();
        } else {
          right_open = false;
        }
      }
    }
  }

  TokenSequence out;
  out.tokens.reserve(L);
  for (std::size_t s = lo; s <= hi; ++s) {
    const std::size_t begin = out.tokens.size();
    out.tokens.insert(out.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(spans[s].begin),
                      tokens.begin() + static_cast<std::ptrdiff_t>(spans[s].end));
    out.spans.push_back({begin, out.tokens.size()});
    out.kept.push_back(s);
  }
  out.reported = reported - lo;
  out.mask.assign(out.tokens.size(), 1);
  out.mask.resize(L, 0);
  out.tokens.resize(L, std::string(kPad));
  return out;
}

Vocabulary::Vocabulary() : tokens_{std::string(kPad), std::string(kUnk)}, index_{{tokens_[0], 0}, {tokens_[1], 1}} {}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> id_to_token) {
  if (id_to_token.size() < 2 || id_to_token[0] != kPad || id_to_token[1] != kUnk) {
    throw SchemaError("vocabulary must start with <pad>, <unk>");
  }
  Vocabulary v;
  v.tokens_ = std::move(id_to_token);
  v.index_.clear();
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw SchemaError("vocabulary lists '" + v.tokens_[i] + "' twice");
    }
  }
  return v;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& sequences) {
  std::map<std::string, std::size_t> freq;
  for (const auto& seq : sequences) {
    for (const auto& t : seq) {
      if (t != kPad && t != kUnk) ++freq[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens{std::string(kPad), std::string(kUnk)};
  for (auto& [t, _] : ranked) tokens.push_back(t);
  return from_tokens(std::move(tokens));
}

std::int32_t Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

std::vector<std::int32_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::int32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

}  // namespace warnrank::prep
