#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "warnrank/warnrank.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kFig1 = std::string(WARNRANK_SOURCE_DIR) + "/corpus/fig1";

// Takes ownership of a library-allocated string.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  wr_string_free(s);
  return out;
}

struct Config {
  wr_config* p = nullptr;
  Config() { REQUIRE(wr_config_new(&p) == WR_OK); }
  ~Config() { wr_config_free(p); }
};

}  // namespace

TEST_CASE("status names and classes") {
  CHECK(std::strcmp(wr_status_name(WR_OK), "ok") == 0);
  CHECK(std::strcmp(wr_status_name(WR_E_CONFIG), "ConfigError") == 0);
  CHECK(std::strcmp(wr_status_name(WR_E_UNLABELED), "UnlabeledError") == 0);
  CHECK(std::strcmp(wr_status_name(WR_E_INVALID_ARGUMENT), "invalid_argument") == 0);
  CHECK(wr_status_is_user_error(WR_E_SCHEMA) == 1);
  CHECK(wr_status_is_user_error(WR_E_INVALID_ARGUMENT) == 1);
  CHECK(wr_status_is_user_error(WR_E_INTERNAL) == 0);
  CHECK(wr_status_is_user_error(WR_E_ALL_MASKED) == 0);
  CHECK(wr_status_is_user_error(WR_OK) == 0);
  CHECK(std::strlen(wr_version()) > 0);
}

TEST_CASE("log levels") {
  CHECK(wr_set_log_level("warn") == WR_OK);
  CHECK(wr_set_log_level("off") == WR_OK);
  CHECK(wr_set_log_level("loud") == WR_E_CONFIG);
  CHECK(std::string(wr_last_error()).find("loud") != std::string::npos);
  CHECK(wr_set_log_level(nullptr) == WR_E_INVALID_ARGUMENT);
  wr_set_log_level("warn");
}

TEST_CASE("configuration through the C interface") {
  Config c;
  CHECK(wr_config_set(c.p, "model.hidden=7") == WR_OK);
  char* v = nullptr;
  REQUIRE(wr_config_get(c.p, "model.hidden", &v) == WR_OK);
  CHECK(take(v) == "7");
  CHECK(wr_config_set(c.p, "model.width=7") == WR_E_CONFIG);
  CHECK(std::string(wr_last_error()).find("model.width") != std::string::npos);
  CHECK(wr_config_get(c.p, "nope.key", &v) == WR_E_CONFIG);
  CHECK(wr_config_set(c.p, nullptr) == WR_E_INVALID_ARGUMENT);
  CHECK(wr_config_new(nullptr) == WR_E_INVALID_ARGUMENT);

  char* ini = nullptr;
  REQUIRE(wr_config_to_ini(c.p, &ini) == WR_OK);
  const std::string text = take(ini);
  CHECK(text.find("[model]\nhidden = 7\n") != std::string::npos);

  const fs::path file = fs::temp_directory_path() / ("warnrank-capi-" + std::to_string(::getpid()) + ".ini");
  {
    std::FILE* f = std::fopen(file.c_str(), "w");
    REQUIRE(f);
    std::fputs(text.c_str(), f);
    std::fclose(f);
  }
  Config d;
  REQUIRE(wr_config_load(d.p, file.c_str()) == WR_OK);
  REQUIRE(wr_config_get(d.p, "model.hidden", &v) == WR_OK);
  CHECK(take(v) == "7");
  fs::remove(file);
  CHECK(wr_config_load(d.p, "/nonexistent/warnrank.ini") == WR_E_IO);
}

TEST_CASE("corpus slicing through the C interface") {
  wr_corpus* corpus = nullptr;
  REQUIRE(wr_corpus_open(kFig1.c_str(), &corpus) == WR_OK);
  char* out = nullptr;
  REQUIRE(wr_corpus_slice(corpus, "asterisk/aoc.mc", 24, "control_and_data", &out) == WR_OK);
  const auto j = json::parse(take(out));
  CHECK(j.at("line") == 24);
  CHECK(j.at("text").get<std::string>().find("> asterisk/aoc.mc:24:") != std::string::npos);

  CHECK(wr_corpus_slice(corpus, "asterisk/aoc.mc", 24, "sideways", &out) == WR_E_CONFIG);
  CHECK(wr_corpus_slice(corpus, "asterisk/aoc.mc", 999, "control_and_data", &out) == WR_E_UNRESOLVED_WARNING);
  CHECK(wr_corpus_slice(corpus, nullptr, 24, "control_and_data", &out) == WR_E_INVALID_ARGUMENT);

  REQUIRE(wr_corpus_edges(corpus, &out) == WR_OK);
  CHECK_FALSE(take(out).empty());
  wr_corpus_free(corpus);

  CHECK(wr_corpus_open("/nonexistent/corpus", &corpus) == WR_E_IO);
  CHECK(std::strlen(wr_last_error()) > 0);
}

TEST_CASE("pipeline commands through the C interface") {
  const fs::path dir = fs::temp_directory_path() / ("warnrank-capi-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  Config c;
  REQUIRE(wr_config_set(c.p, ("run.output_dir=" + (dir / "corpus").string()).c_str()) == WR_OK);
  char* out = nullptr;
  REQUIRE(wr_synth(c.p, &out) == WR_OK);
  const auto s = json::parse(take(out));
  CHECK(s.at("warnings") == 400);
  CHECK(s.at("tps") == 120);

  Config p;
  REQUIRE(wr_config_set(p.p, ("corpus.dir=" + (dir / "corpus").string()).c_str()) == WR_OK);
  REQUIRE(wr_config_set(p.p, ("run.output_dir=" + (dir / "prep").string()).c_str()) == WR_OK);
  REQUIRE(wr_prepare(p.p, 0, &out) == WR_OK);
  CHECK(json::parse(take(out)).at("warnings") == 400);
  REQUIRE(wr_prepare(p.p, 0, &out) == WR_OK);
  CHECK(json::parse(take(out)).at("cache_hit") == true);

  CHECK(wr_rank(p.p, (dir / "no-model").c_str(), &out) == WR_E_IO);
  CHECK(wr_eval(nullptr, 0, &out) == WR_E_INVALID_ARGUMENT);
  fs::remove_all(dir);
}
