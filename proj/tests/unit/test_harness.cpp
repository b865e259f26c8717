#include <unistd.h>

#include <filesystem>

#include "doctest.h"
#include "harness/commands.hpp"
#include "harness/config.hpp"
#include "json.hpp"
#include "util/error.hpp"
#include "util/hash.hpp"

using namespace warnrank;
using namespace warnrank::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("warnrank-harness-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const fs::path kFig1 = fs::path(WARNRANK_SOURCE_DIR) / "corpus/fig1";

HarnessConfig tiny(const fs::path& out) {
  HarnessConfig c;
  c.corpus_dir = kFig1.string();
  c.output_dir = out.string();
  for (const char* a : {"embedding.dim=4", "embedding.epochs=1", "model.hidden=3", "model.dense=4,2",
                        "training.epochs=2", "preprocess.L_slice=60", "preprocess.L_stmt=10"}) {
    apply_override(c, a);
  }
  return c;
}

}  // namespace

TEST_CASE("config text round trips through every key") {
  HarnessConfig c;
  apply_override(c, "model.dense=16,8,2");
  apply_override(c, "context.mode=data_only");
  apply_override(c, "preprocess.abstraction=off");
  apply_override(c, "eval.ks=5,10");
  apply_override(c, "training.lr=0.01");
  const std::string text = format_config(c);
  const HarnessConfig back = parse_config(text);
  for (const auto& k : config_keys()) CHECK(get_value(back, k) == get_value(c, k));
  CHECK(format_config(back) == text);
  CHECK(get_value(back, "preprocess.abstraction") == "false");
  CHECK(get_value(back, "model.dense") == "16,8,2");

  const auto j = json::parse(config_json(c));
  CHECK(j.size() == config_keys().size());
  CHECK(j.at("context.mode") == "data_only");
}

TEST_CASE("absent keys keep their defaults") {
  const HarnessConfig c = parse_config("[training]\nepochs = 3\n");
  const HarnessConfig d;
  CHECK(c.experiment.training.epochs == 3);
  CHECK(get_value(c, "model.hidden") == get_value(d, "model.hidden"));
  CHECK(get_value(c, "run.seed") == get_value(d, "run.seed"));
}

TEST_CASE("bad configuration is rejected") {
  HarnessConfig c;
  CHECK_THROWS_AS(apply_override(c, "model.hidden"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "model.width=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "model.hidden=abc"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "model.hidden=-2"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "model.stmt_branch=maybe"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "context.mode=everything"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "eval.ks=5,,10"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nwidth = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model\n"), ConfigError);
  try {
    parse_config("[model]\nhidden = x\n", "my.ini");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("my.ini") != std::string::npos);
  }
  c = {};
  c.output_dir.clear();
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("warnings file and cache directory defaults") {
  HarnessConfig c;
  c.corpus_dir = "x";
  c.output_dir = "o";
  CHECK(c.warnings_file() == fs::path("x/warnings.jsonl"));
  c.cache_dir = "cc";
  CHECK(c.cache_path() == fs::path("cc"));
  c.warnings_path = "w.jsonl";
  CHECK(c.warnings_file() == fs::path("w.jsonl"));
}

TEST_CASE("prepared datasets are cached by content") {
  const auto dir = scratch("cache");
  HarnessConfig c = tiny(dir);
  c.cache_dir = (dir / "cache").string();
  const Inputs in = load_inputs(c);
  CHECK(in.dataset.warnings.size() == 2);
  const auto a = prepare_cached(c, in, c.experiment.mode, c.experiment.preprocess);
  CHECK_FALSE(a.cache_hit);
  const auto b = prepare_cached(c, in, c.experiment.mode, c.experiment.preprocess);
  CHECK(b.cache_hit);
  CHECK(b.cache_file == a.cache_file);
  CHECK(b.data == a.data);
  auto other = c.experiment.preprocess;
  other.abstraction_on = false;
  const auto d = prepare_cached(c, in, c.experiment.mode, other);
  CHECK_FALSE(d.cache_hit);
  CHECK(d.cache_file != a.cache_file);

  // A damaged entry is rebuilt rather than trusted.
  write_file(a.cache_file, "garbage");
  const auto e = prepare_cached(c, in, c.experiment.mode, c.experiment.preprocess);
  CHECK_FALSE(e.cache_hit);
  CHECK(e.data == a.data);
}

TEST_CASE("slice command reports the context") {
  const auto j = json::parse(cmd_slice(kFig1, "asterisk/aoc.mc", 24, slicing::ContextMode::ControlAndData));
  CHECK(j.at("mode") == "control_and_data");
  bool reported = false;
  for (const auto& s : j.at("statements")) {
    if (s.at("reported").get<bool>()) {
      reported = true;
      CHECK(s.at("line") == 24);
      CHECK(s.at("text").get<std::string>().rfind("strcat", 0) == 0);
    }
  }
  CHECK(reported);
  CHECK_THROWS_AS(cmd_slice(kFig1, "asterisk/aoc.mc", 2000, slicing::ContextMode::ControlAndData),
                  UnresolvedWarning);
}

TEST_CASE("prepare writes a manifest with artifact hashes") {
  const auto dir = scratch("prepare");
  const HarnessConfig c = tiny(dir);
  const auto j = json::parse(cmd_prepare(c, true));
  CHECK(j.at("warnings") == 2);
  CHECK(j.at("vocab_size_abstraction_off").get<int>() > j.at("vocab_size_abstraction_on").get<int>());
  const auto m = json::parse(read_file(dir / "manifest.json"));
  CHECK(m.at("command") == "prepare");
  REQUIRE(m.at("artifacts").size() == 1);
  CHECK(m.at("artifacts")[0].at("path") == "prepared.jsonl");
  CHECK(m.at("artifacts")[0].at("sha256") == sha256_file(dir / "prepared.jsonl"));
  CHECK(m.at("config").at("model.hidden") == "3");
}

TEST_CASE("train, resume and rank") {
  const auto dir = scratch("train");
  HarnessConfig c = tiny(dir);
  const auto first = json::parse(cmd_train(c, false));
  CHECK(first.at("epochs") == 2);
  CHECK_FALSE(first.at("resumed").get<bool>());
  CHECK(fs::exists(dir / "model.bin"));
  CHECK(fs::exists(dir / "embedding.bin"));

  // Resuming a finished run leaves it as it was.
  const auto resumed = json::parse(cmd_train(c, true));
  CHECK(resumed.at("resumed").get<bool>());
  CHECK(resumed.at("epochs") == 2);
  CHECK(resumed.at("sha256") == first.at("sha256"));

  // With the embedding reused, a rerun in another directory gives the same model.
  const auto dir2 = scratch("train-again");
  fs::copy_file(dir / "embedding.bin", dir2 / "embedding.bin");
  const auto again = json::parse(cmd_train(tiny(dir2), false));
  CHECK(again.at("sha256") == first.at("sha256"));
  CHECK(again.at("epoch_loss") == first.at("epoch_loss"));

  apply_override(c, "model.hidden=5");
  CHECK_THROWS_AS(cmd_train(c, true), ConfigError);

  const auto r = json::parse(cmd_rank(tiny(dir), ""));
  REQUIRE(r.at("ranking").size() == 2);
  CHECK(r.at("ranking")[0].at("score").get<double>() >= r.at("ranking")[1].at("score").get<double>());
  CHECK_THROWS_AS(cmd_rank(tiny(dir), dir / "nowhere"), IoError);
}

TEST_CASE("eval needs labels on every warning") {
  const auto dir = scratch("unlabeled");
  std::string text = read_file(kFig1 / "warnings.jsonl");
  const auto pos = text.find("\"label\":\"FP\"");
  text.replace(pos, 12, "\"label\":null");
  write_file(dir / "warnings.jsonl", text);
  HarnessConfig c = tiny(dir / "out");
  c.warnings_path = (dir / "warnings.jsonl").string();
  CHECK_THROWS_AS(cmd_eval(c), UnlabeledError);
  CHECK_THROWS_AS(cmd_ablate(c), UnlabeledError);

  c.warnings_path = (dir / "missing.jsonl").string();
  CHECK_THROWS_AS(load_inputs(c), IoError);
}
