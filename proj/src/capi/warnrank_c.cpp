#include "warnrank/warnrank.h"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "dependence/sdg.hpp"
#include "harness/commands.hpp"
#include "harness/config.hpp"
#include "slicer/slicer.hpp"
#include "util/error.hpp"
#include "warnings/io.hpp"

struct wr_config {
  warnrank::harness::HarnessConfig cfg;
};

struct wr_corpus {
  warnrank::warnings::Corpus corpus;
  warnrank::dep::SystemDependenceGraph sdg;
};

namespace {

thread_local std::string g_last_error;

// Progress logs go to stderr so command output on stdout stays parseable.
void ensure_logger() {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_mt("warnrank");
    logger->set_level(spdlog::get_level());
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
}

wr_status fail(wr_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs f, translating exceptions into status codes.
template <typename F>
wr_status guarded(F&& f) {
  try {
    ensure_logger();
    f();
    return WR_OK;
  } catch (const warnrank::Error& e) {
    return fail(static_cast<wr_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(WR_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WR_E_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

#define WR_REQUIRE(cond, what) \
  if (!(cond)) return fail(WR_E_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* wr_version(void) { return "0.3.0"; }

const char* wr_last_error(void) { return g_last_error.c_str(); }

const char* wr_status_name(wr_status status) {
  if (status == WR_OK) return "ok";
  if (status == WR_E_INVALID_ARGUMENT) return "invalid_argument";
  return warnrank::error_code_name(static_cast<warnrank::ErrorCode>(status));
}

int wr_status_is_user_error(wr_status status) {
  if (status == WR_OK) return 0;
  if (status == WR_E_INVALID_ARGUMENT) return 1;
  return warnrank::is_user_error(static_cast<warnrank::ErrorCode>(status)) ? 1 : 0;
}

wr_status wr_set_log_level(const char* level) {
  WR_REQUIRE(level, "level is null");
  const auto l = spdlog::level::from_str(level);
  if (l == spdlog::level::off && std::strcmp(level, "off") != 0) {
    return fail(WR_E_CONFIG, std::string("unknown log level '") + level + "'");
  }
  return guarded([&] { spdlog::set_level(l); });
}

void wr_string_free(char* s) { std::free(s); }

wr_status wr_config_new(wr_config** out) {
  WR_REQUIRE(out, "out is null");
  return guarded([&] { *out = new wr_config(); });
}

wr_status wr_config_load(wr_config* cfg, const char* path) {
  WR_REQUIRE(cfg && path, "null argument");
  return guarded([&] { cfg->cfg = warnrank::harness::load_config(path); });
}

wr_status wr_config_set(wr_config* cfg, const char* assignment) {
  WR_REQUIRE(cfg && assignment, "null argument");
  return guarded([&] { warnrank::harness::apply_override(cfg->cfg, assignment); });
}

wr_status wr_config_get(const wr_config* cfg, const char* key, char** out) {
  WR_REQUIRE(cfg && key && out, "null argument");
  return guarded([&] { *out = dup(warnrank::harness::get_value(cfg->cfg, key)); });
}

wr_status wr_config_to_ini(const wr_config* cfg, char** out) {
  WR_REQUIRE(cfg && out, "null argument");
  return guarded([&] { *out = dup(warnrank::harness::format_config(cfg->cfg)); });
}

void wr_config_free(wr_config* cfg) { delete cfg; }

wr_status wr_corpus_open(const char* dir, wr_corpus** out) {
  WR_REQUIRE(dir && out, "null argument");
  return guarded([&] {
    auto c = std::make_unique<wr_corpus>();
    c->corpus = warnrank::warnings::load_corpus(dir);
    c->sdg = warnrank::dep::build_sdg(c->corpus.units);
    *out = c.release();
  });
}

wr_status wr_corpus_slice(const wr_corpus* corpus, const char* file, int line, const char* mode, char** out_json) {
  WR_REQUIRE(corpus && file && mode && out_json, "null argument");
  return guarded([&] {
    const auto m = warnrank::slicing::parse_mode(mode);
    if (!m) throw warnrank::ConfigError(std::string("unknown context mode '") + mode + "'");
    *out_json = dup(warnrank::harness::slice_json(corpus->sdg, file, line, *m));
  });
}

wr_status wr_corpus_edges(const wr_corpus* corpus, char** out_text) {
  WR_REQUIRE(corpus && out_text, "null argument");
  return guarded([&] { *out_text = dup(corpus->sdg.edge_list_text()); });
}

void wr_corpus_free(wr_corpus* corpus) { delete corpus; }

wr_status wr_synth(const wr_config* cfg, char** out_json) {
  WR_REQUIRE(cfg && out_json, "null argument");
  return guarded([&] { *out_json = dup(warnrank::harness::cmd_synth(cfg->cfg)); });
}

wr_status wr_prepare(const wr_config* cfg, int compare_abstraction, char** out_json) {
  WR_REQUIRE(cfg && out_json, "null argument");
  return guarded([&] { *out_json = dup(warnrank::harness::cmd_prepare(cfg->cfg, compare_abstraction != 0)); });
}

wr_status wr_train_embed(const wr_config* cfg, char** out_json) {
  WR_REQUIRE(cfg && out_json, "null argument");
  return guarded([&] { *out_json = dup(warnrank::harness::cmd_train_embed(cfg->cfg)); });
}

wr_status wr_train(const wr_config* cfg, int resume, char** out_json) {
  WR_REQUIRE(cfg && out_json, "null argument");
  return guarded([&] { *out_json = dup(warnrank::harness::cmd_train(cfg->cfg, resume != 0)); });
}

wr_status wr_rank(const wr_config* cfg, const char* model_dir, char** out_json) {
  WR_REQUIRE(cfg && out_json, "null argument");
  return guarded([&] { *out_json = dup(warnrank::harness::cmd_rank(cfg->cfg, model_dir ? model_dir : "")); });
}

wr_status wr_eval(const wr_config* cfg, int save_checkpoints, char** out_json) {
  WR_REQUIRE(cfg && out_json, "null argument");
  return guarded([&] { *out_json = dup(warnrank::harness::cmd_eval(cfg->cfg, save_checkpoints != 0)); });
}

wr_status wr_ablate(const wr_config* cfg, int save_checkpoints, char** out_json) {
  WR_REQUIRE(cfg && out_json, "null argument");
  return guarded([&] { *out_json = dup(warnrank::harness::cmd_ablate(cfg->cfg, save_checkpoints != 0)); });
}

}  // extern "C"
