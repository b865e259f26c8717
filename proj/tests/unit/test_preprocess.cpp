#include <filesystem>
#include <set>

#include "dependence/sdg.hpp"
#include "doctest.h"
#include "preprocess/abstraction.hpp"
#include "preprocess/prepared.hpp"
#include "preprocess/sequence.hpp"
#include "util/error.hpp"
#include "util/rng.hpp"
#include "warnings/io.hpp"

using namespace warnrank;
using namespace warnrank::prep;

namespace {

// The documented policy written out directly: everything if it fits,
// otherwise the reported statement, then alternately one more statement on
// the left and on the right until each side meets a statement that does not
// fit.
std::vector<std::size_t> expected_kept(const std::vector<std::size_t>& sizes, std::size_t reported, std::size_t L) {
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < sizes.size(); ++i) all.push_back(i);
  if (total <= L) return all;
  std::size_t room = L - sizes[reported];
  std::set<std::size_t> kept{reported};
  long left = static_cast<long>(reported) - 1;
  std::size_t right = reported + 1;
  bool left_open = left >= 0, right_open = right < sizes.size();
  while (left_open || right_open) {
    if (left_open) {
      if (sizes[static_cast<std::size_t>(left)] <= room) {
        room -= sizes[static_cast<std::size_t>(left)];
        kept.insert(static_cast<std::size_t>(left));
        --left;
        left_open = left >= 0;
      } else {
        left_open = false;
      }
    }
    if (right_open) {
      if (sizes[right] <= room) {
        room -= sizes[right];
        kept.insert(right);
        ++right;
        right_open = right < sizes.size();
      } else {
        right_open = false;
      }
    }
  }
  return {kept.begin(), kept.end()};
}

}  // namespace

TEST_CASE("identifiers are numbered by first occurrence across the context") {
  const auto a = abstract_texts({"int count = 0;", "total = helper(count, 42);", "strcpy(buf, \"x\");",
                                 "flag = 'c';", "total = helper(buf, count);"});
  CHECK(a.statements[0] == "int VAR1 = NUMBER_LIT;");
  CHECK(a.statements[1] == "VAR2 = FUNC1(VAR1, NUMBER_LIT);");
  CHECK(a.statements[2] == "strcpy(VAR3, STRING_LIT);");
  CHECK(a.statements[3] == "VAR4 = CHAR_LIT;");
  CHECK(a.statements[4] == "VAR2 = FUNC1(VAR3, VAR1);");
  CHECK(a.table.var_map.at("count") == "VAR1");
  CHECK(a.table.func_map.at("helper") == "FUNC1");
  CHECK(a.table.var_map.count("strcpy") == 0);
  CHECK(a.table.func_map.count("strcpy") == 0);
}

TEST_CASE("abstraction is idempotent") {
  const std::vector<std::string> ctx{"char prefix[32];", "rate_str = lookup(type);", "strcat(prefix, rate_str);"};
  const auto once = abstract_texts(ctx);
  const auto twice = abstract_texts(once.statements);
  CHECK(twice.statements == once.statements);
}

TEST_CASE("symbolic names") {
  CHECK(is_symbolic_name("VAR1"));
  CHECK(is_symbolic_name("FUNC12"));
  CHECK(is_symbolic_name("NUMBER_LIT"));
  CHECK(is_symbolic_name("CHAR_LIT"));
  CHECK_FALSE(is_symbolic_name("VAR0"));
  CHECK_FALSE(is_symbolic_name("VAR"));
  CHECK_FALSE(is_symbolic_name("VARx"));
  CHECK_FALSE(is_symbolic_name("var1"));
}

TEST_CASE("library calls outside the allowlist are abstracted") {
  const auto a = abstract_texts({"strcat(a, b);"}, {});
  CHECK(a.statements[0] == "FUNC1(VAR1, VAR2);");
  CHECK(default_allowlist().count("strcat") == 1);
}

TEST_CASE("context tokenization records statement spans") {
  const auto t = tokenize_context({"a = 1;", "f(a);"});
  CHECK(t.tokens == std::vector<std::string>{"a", "=", "1", ";", "f", "(", "a", ")", ";"});
  REQUIRE(t.spans.size() == 2);
  CHECK(t.spans[0] == Span{0, 4});
  CHECK(t.spans[1] == Span{4, 9});
  CHECK_THROWS_AS(tokenize_context({"a = `b`;"}), LexError);
}

TEST_CASE("fit_length pads short contexts") {
  const auto t = tokenize_context({"a = 1;", "f(a);"});
  const auto s = fit_length(t.tokens, t.spans, 1, 12);
  CHECK(s.length() == 12);
  CHECK(s.real_tokens() == 9);
  CHECK(s.tokens[9] == "<pad>");
  CHECK(s.mask[8] == 1);
  CHECK(s.mask[9] == 0);
  CHECK(s.reported == 1);
  CHECK(s.kept == std::vector<std::size_t>{0, 1});
}

TEST_CASE("fit_length keeps whole statements around the reported one") {
  // sizes 3 4 2 5 1, reported = 2
  std::vector<std::string> tokens;
  std::vector<Span> spans;
  for (std::size_t n : {3, 4, 2, 5, 1}) {
    const std::size_t b = tokens.size();
    for (std::size_t i = 0; i < n; ++i) tokens.push_back("s" + std::to_string(spans.size()) + "_" + std::to_string(i));
    spans.push_back({b, tokens.size()});
  }
  // L = 8: reported (2), left 4 -> 6, right 5 does not fit (stops), left 3 does not fit.
  auto s = fit_length(tokens, spans, 2, 8);
  CHECK(s.kept == std::vector<std::size_t>{1, 2});
  CHECK(s.real_tokens() == 6);
  CHECK(s.reported == 1);
  // L = 12: 2, +4 (left) = 6, +5 (right) = 11, left 3 no, right 1 yes = 12.
  s = fit_length(tokens, spans, 2, 12);
  CHECK(s.kept == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(s.real_tokens() == 12);
  CHECK_THROWS_AS(fit_length(tokens, spans, 3, 4), CapacityError);
}

TEST_CASE("fit_length follows the documented policy on random layouts") {
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 10));
    std::vector<std::size_t> sizes;
    std::vector<std::string> tokens;
    std::vector<Span> spans;
    for (std::size_t i = 0; i < n; ++i) {
      sizes.push_back(static_cast<std::size_t>(rng.uniform_int(1, 7)));
      const std::size_t b = tokens.size();
      for (std::size_t k = 0; k < sizes.back(); ++k) tokens.push_back("t" + std::to_string(tokens.size()));
      spans.push_back({b, tokens.size()});
    }
    const std::size_t r = rng.uniform_index(n);
    const std::size_t L = static_cast<std::size_t>(rng.uniform_int(1, 30));
    if (sizes[r] > L) {
      CHECK_THROWS_AS(fit_length(tokens, spans, r, L), CapacityError);
      continue;
    }
    const auto s = fit_length(tokens, spans, r, L);
    REQUIRE(s.kept == expected_kept(sizes, r, L));
    REQUIRE(s.kept[s.reported] == r);
  }
}

TEST_CASE("vocabulary ordering") {
  const auto v = Vocabulary::build({{"b", "a", "b", "<pad>"}, {"c", "a", "b"}});
  CHECK(v.tokens() == std::vector<std::string>{"<pad>", "<unk>", "b", "a", "c"});
  CHECK(v.id("a") == 3);
  CHECK(v.id("zzz") == Vocabulary::kUnkId);
  CHECK(v.encode({"c", "q"}) == std::vector<std::int32_t>{4, 1});
  CHECK(Vocabulary::from_tokens(v.tokens()) == v);
}

TEST_CASE("preprocess config validation") {
  PreprocessConfig c;
  c.L_stmt = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.L_slice = 10;
  c.L_stmt = 20;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("prepared dataset for the strcat example") {
  const auto dir = std::filesystem::path(WARNRANK_SOURCE_DIR) / "corpus/fig1";
  const auto corpus = warnings::load_corpus(dir);
  auto data = warnings::load_warnings(dir / "warnings.jsonl");
  warnings::attach_projects(data, corpus);
  const auto sdg = dep::build_sdg(corpus.units);

  PreprocessConfig cfg;
  cfg.L_slice = 200;
  cfg.L_stmt = 10;
  const auto p = prepare_dataset(sdg, data, slicing::ContextMode::ControlAndData, cfg);
  REQUIRE(p.items.size() == 2);
  const auto& w = p.items[1];
  CHECK(w.project == "asterisk");
  CHECK(w.ctx.size() == 200);
  CHECK(w.stmt.size() == 10);
  const auto stmt = p.strings(std::vector<std::int32_t>(w.stmt.begin(), w.stmt.begin() + w.stmt_length()));
  REQUIRE(stmt.size() == 7);
  CHECK(stmt[0] == "strcat");
  CHECK(stmt[2].rfind("VAR", 0) == 0);
  // The statement branch is the reported span of the context.
  const auto& span = w.ctx_spans[w.ctx_reported];
  CHECK(std::vector<std::int32_t>(w.ctx.begin() + span.begin, w.ctx.begin() + span.end) ==
        std::vector<std::int32_t>(w.stmt.begin(), w.stmt.begin() + 7));

  CHECK(parse_prepared(format_prepared(p)) == p);
  const auto vocab = build_vocab(p, {0, 1});
  CHECK(vocab.contains("strcat"));
  CHECK_FALSE(vocab.contains("prefix"));

  cfg.abstraction_on = false;
  const auto raw = prepare_dataset(sdg, data, slicing::ContextMode::ControlAndData, cfg);
  CHECK(build_vocab(raw, {0, 1}).contains("prefix"));
  CHECK(build_vocab(raw, {0, 1}).size() > vocab.size());

  cfg.L_slice = 3;
  cfg.L_stmt = 3;
  try {
    prepare_dataset(sdg, data, slicing::ContextMode::ControlAndData, cfg);
    FAIL("expected a capacity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Capacity);
    CHECK(std::string(e.what()).find("asterisk/aoc.mc:23") != std::string::npos);
  }
}
