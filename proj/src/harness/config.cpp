#include "harness/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "util/error.hpp"
#include "util/hash.hpp"

namespace warnrank::harness {

std::filesystem::path HarnessConfig::warnings_file() const {
  if (!warnings_path.empty()) return warnings_path;
  return std::filesystem::path(corpus_dir) / "warnings.jsonl";
}

std::filesystem::path HarnessConfig::cache_path() const {
  if (!cache_dir.empty()) return cache_dir;
  if (const char* env = std::getenv("WARNRANK_CACHE_DIR"); env && *env) return env;
  return std::filesystem::path(output_dir) / "cache";
}

namespace {

struct Field {
  const char* key;
  std::function<void(HarnessConfig&, const std::string&)> set;
  std::function<std::string(const HarnessConfig&)> get;
};

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw ConfigError(fmt::format("{}: '{}' is not a valid number", key, v));
  if constexpr (std::is_unsigned_v<T>) {
    if (!v.empty() && v[0] == '-') throw ConfigError(fmt::format("{}: '{}' must not be negative", key, v));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::string fmt_double(double d) { return fmt::format("{}", d); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(key + ": empty list element");
    out.push_back(parse_number<T>(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  return fmt::format("{}", fmt::join(v, ","));
}

#define NUM(KEY, FIELD, TYPE)                                                                          \
  Field {                                                                                               \
    KEY, [](HarnessConfig& c, const std::string& v) { c.FIELD = parse_number<TYPE>(KEY, v); },          \
        [](const HarnessConfig& c) { return fmt::format("{}", c.FIELD); }                               \
  }
#define DBL(KEY, FIELD)                                                                                \
  Field {                                                                                               \
    KEY, [](HarnessConfig& c, const std::string& v) { c.FIELD = parse_number<double>(KEY, v); },        \
        [](const HarnessConfig& c) { return fmt_double(c.FIELD); }                                      \
  }
#define BOOL(KEY, FIELD)                                                                               \
  Field {                                                                                               \
    KEY, [](HarnessConfig& c, const std::string& v) { c.FIELD = parse_bool(KEY, v); },                  \
        [](const HarnessConfig& c) { return fmt_bool(c.FIELD); }                                        \
  }
#define STR(KEY, FIELD)                                                                                \
  Field {                                                                                               \
    KEY, [](HarnessConfig& c, const std::string& v) { c.FIELD = v; },                                   \
        [](const HarnessConfig& c) { return c.FIELD; }                                                  \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      STR("corpus.dir", corpus_dir),
      STR("corpus.warnings", warnings_path),
      NUM("run.seed", experiment.seed, std::uint64_t),
      STR("run.output_dir", output_dir),
      STR("run.cache_dir", cache_dir),
      Field{"context.mode",
            [](HarnessConfig& c, const std::string& v) {
              auto m = slicing::parse_mode(v);
              if (!m) {
                throw ConfigError("context.mode: unknown mode '" + v +
                                  "' (raw_function, control_only, data_only, control_and_data)");
              }
              c.experiment.mode = *m;
            },
            [](const HarnessConfig& c) { return std::string(slicing::mode_name(c.experiment.mode)); }},
      NUM("preprocess.L_slice", experiment.preprocess.L_slice, std::size_t),
      NUM("preprocess.L_stmt", experiment.preprocess.L_stmt, std::size_t),
      BOOL("preprocess.abstraction", experiment.preprocess.abstraction_on),
      NUM("embedding.dim", experiment.embedding.dim, std::size_t),
      NUM("embedding.window", experiment.embedding.window, std::size_t),
      NUM("embedding.negatives", experiment.embedding.negatives, std::size_t),
      NUM("embedding.epochs", experiment.embedding.epochs, std::size_t),
      DBL("embedding.lr", experiment.embedding.lr),
      DBL("embedding.unk_rate", experiment.embedding.unk_rate),
      NUM("model.hidden", experiment.model.hidden, std::size_t),
      Field{"model.dense",
            [](HarnessConfig& c, const std::string& v) {
              c.experiment.model.dense_sizes = parse_list<std::size_t>("model.dense", v);
            },
            [](const HarnessConfig& c) { return join(c.experiment.model.dense_sizes); }},
      DBL("model.dropout", experiment.model.dropout),
      BOOL("model.stmt_branch", experiment.model.use_stmt_branch),
      NUM("training.epochs", experiment.training.epochs, std::size_t),
      NUM("training.batch", experiment.training.batch_size, std::size_t),
      DBL("training.lr", experiment.training.lr),
      DBL("training.beta1", experiment.training.beta1),
      DBL("training.beta2", experiment.training.beta2),
      DBL("training.epsilon", experiment.training.epsilon),
      DBL("training.clip_norm", experiment.training.clip_norm),
      NUM("split.folds", experiment.folds, int),
      Field{"split.setting",
            [](HarnessConfig& c, const std::string& v) { c.experiment.grouping = eval::parse_grouping(v); },
            [](const HarnessConfig& c) { return std::string(eval::grouping_name(c.experiment.grouping)); }},
      Field{"eval.ks", [](HarnessConfig& c, const std::string& v) { c.experiment.ks = parse_list<int>("eval.ks", v); },
            [](const HarnessConfig& c) { return join(c.experiment.ks); }},
      NUM("synth.seed", synth.seed, std::uint64_t),
      NUM("synth.projects", synth.n_projects, int),
      DBL("synth.tp_rate", synth.tp_rate),
      NUM("synth.warnings", synth.n_warnings, int),
      NUM("synth.scenarios_per_file", synth.scenarios_per_file, int),
      DBL("synth.npd_share", synth.npd_share),
      DBL("synth.name_bias", synth.name_bias),
  };
  return table;
}

#undef NUM
#undef DBL
#undef BOOL
#undef STR

const Field& field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.key) return f;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

void set_value(HarnessConfig& cfg, const std::string& key, const std::string& value) { field(key).set(cfg, value); }

std::string get_value(const HarnessConfig& cfg, const std::string& key) { return field(key).get(cfg); }

void apply_override(HarnessConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  }
  set_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

HarnessConfig parse_config(const std::string& ini_text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", origin, e.line(), e.message()));
  }
  HarnessConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(origin + ": key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) {
      try {
        set_value(cfg, section + "." + key, value.get_value<std::string>());
      } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
      }
    }
  }
  return cfg;
}

HarnessConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path), path.string()); }

std::string format_config(const HarnessConfig& cfg) {
  std::string out, section;
  for (const auto& f : fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      section = key.substr(0, dot);
      out += (out.empty() ? "" : "\n") + fmt::format("[{}]\n", section);
    }
    out += fmt::format("{} = {}\n", key.substr(dot + 1), f.get(cfg));
  }
  return out;
}

std::string config_json(const HarnessConfig& cfg) {
  nlohmann::ordered_json j;
  for (const auto& f : fields()) j[f.key] = f.get(cfg);
  return j.dump();
}

void validate(const HarnessConfig& cfg) {
  cfg.experiment.validate();
  if (cfg.output_dir.empty()) throw ConfigError("run.output_dir must not be empty");
}

}  // namespace warnrank::harness
