#include "warnings/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "json.hpp"
#include "minic/library.hpp"
#include "minic/parser.hpp"
#include "util/error.hpp"
#include "util/hash.hpp"
#include "util/rng.hpp"
#include "warnings/detectors.hpp"

namespace warnrank::warnings {

namespace {

const std::vector<std::string> kNouns = {
    "buf",  "name", "path", "msg",  "line",  "key",  "val",   "tag",  "label", "field", "token", "entry",
    "item", "data", "text", "head", "tail",  "node", "rec",   "chunk", "cell", "slot",  "unit",  "port",
    "user", "host", "code", "mode", "flag",  "kind", "title", "info", "desc",  "note",  "word",  "frame"};

const std::vector<std::string> kVerbs = {"get",   "fetch", "read",  "load",  "make", "pick",  "build",
                                         "find",  "lookup", "format", "fill", "scan", "parse", "conv",
                                         "map",   "emit",  "render", "select", "resolve", "query"};

const std::vector<std::string> kCheckVerbs = {"check", "test", "verify", "probe", "ensure", "validate", "confirm"};

const std::vector<std::string> kWords = {
    "Duration", "Flat",    "Volume",  "Unknown", "Free",    "Busy",     "Idle",    "Ready",   "Closed",
    "Open",     "Pending", "Done",    "Error",   "Retry",   "Local",    "Remote",  "Audio",   "Video",
    "Text",     "Binary",  "Low",     "High",    "Normal",  "Urgent",   "Start",   "Stop",    "Pause",
    "Resume",   "Alpha",   "Beta",    "Gamma",   "Delta",   "North",    "South",   "East",    "West",
    "Red",      "Green",   "Blue",    "Amber",   "Primary", "Backup",   "Ok",      "Fail",    "None"};

const std::vector<std::string> kProjectNames = {"netio", "imgtool", "dbcore", "audiofx", "shellkit"};

const std::vector<std::string> kFormats = {"%d", "R%d", "id=%d", "#%d", "n%d:", "[%d]"};

enum class Style { Snake, Camel, Prefixed, Short, Hungarian };

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct Project {
  std::string name;
  Style style = Style::Snake;
  std::string prefix;
  std::vector<std::string> tp_nouns, fp_nouns;
  std::vector<std::string> sources, sinks, logs;  // external (undefined) functions
  std::vector<std::string> words;                 // string literal pool

  std::string compose(const std::vector<std::string>& parts, char hungarian = 0) const {
    std::string out;
    switch (style) {
      case Style::Snake:
        for (const auto& p : parts) out += (out.empty() ? "" : "_") + p;
        break;
      case Style::Camel:
        for (const auto& p : parts) out += out.empty() ? p : capitalize(p);
        break;
      case Style::Prefixed:
        out = prefix;
        for (const auto& p : parts) out += "_" + p;
        break;
      case Style::Short:
        for (const auto& p : parts) out += p.substr(0, std::min<std::size_t>(3, p.size()));
        break;
      case Style::Hungarian:
        if (hungarian) out += hungarian;
        for (const auto& p : parts) out += out.empty() ? p : capitalize(p);
        break;
    }
    return out;
  }
};

// Names already used anywhere in the corpus for functions (defined or
// external); variables must avoid them as well.
class NameRegistry {
 public:
  std::string function(const Project& p, const std::vector<std::string>& parts) {
    std::string base = p.compose(parts);
    if (p.style != Style::Prefixed && p.style != Style::Short) base = p.compose({p.prefix}) + "_" + base;
    std::string name = base;
    for (int k = 2; taken(name); ++k) name = base + std::to_string(k);
    functions_.insert(name);
    return name;
  }
  bool taken(const std::string& n) const {
    return functions_.count(n) || minic::is_library_function(n) || reserved().count(n);
  }
  static const std::set<std::string>& reserved() {
    static const std::set<std::string> r = {"int",   "char",  "void",   "long", "short",    "unsigned", "signed",
                                            "const", "static", "if",    "else", "while",    "for",      "return",
                                            "NULL",  "break", "continue"};
    return r;
  }

 private:
  std::set<std::string> functions_;
};

// Variable names within one function.
class Scope {
 public:
  Scope(const Project& p, const NameRegistry& reg, Rng& rng, bool tp_names, double bias)
      : p_(p), reg_(reg), rng_(rng), tp_names_(tp_names), bias_(bias) {}

  std::string var(char hungarian = 0) {
    const bool own = rng_.bernoulli(bias_);
    const auto& pool = (own == tp_names_) ? p_.tp_nouns : p_.fp_nouns;
    std::vector<std::string> parts{rng_.pick(pool)};
    if (rng_.bernoulli(0.35)) parts.push_back(rng_.pick(kNouns));
    std::string base = p_.compose(parts, hungarian);
    if (p_.style == Style::Prefixed) base = "v" + base.substr(p_.prefix.size());
    std::string name = base;
    for (int k = 2; used_.count(name) || reg_.taken(name); ++k) name = base + std::to_string(k);
    used_.insert(name);
    return name;
  }

 private:
  const Project& p_;
  const NameRegistry& reg_;
  Rng& rng_;
  bool tp_names_;
  double bias_;
  std::set<std::string> used_;
};

class Emitter {
 public:
  int emit(int indent, const std::string& text) {
    lines_.push_back(std::string(static_cast<std::size_t>(indent) * 2, ' ') + text);
    return static_cast<int>(lines_.size());
  }
  int next_line() const { return static_cast<int>(lines_.size()) + 1; }
  std::string text() const {
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
  }

 private:
  std::vector<std::string> lines_;
};

std::string quote(const std::string& s) { return "\"" + s + "\""; }

struct Scenario {
  WarningKind kind = WarningKind::BO;
  Label label = Label::FP;
  int project = 0;
  // Filled during emission.
  std::string file;
  int reported_line = 0;
  int planted_line = 0;
  std::string pattern;
};

class Generator {
 public:
  Generator(const SynthConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng) {}

  Project make_project(int index) {
    Project p;
    p.name = index < static_cast<int>(kProjectNames.size()) ? kProjectNames[static_cast<std::size_t>(index)]
                                                           : "proj" + std::to_string(index);
    p.style = static_cast<Style>(index % 5);
    p.prefix = p.name.substr(0, 2) + static_cast<char>('a' + index % 26);
    std::vector<std::string> nouns = kNouns;
    rng_.shuffle(nouns);
    p.tp_nouns.assign(nouns.begin(), nouns.begin() + static_cast<long>(nouns.size() / 2));
    p.fp_nouns.assign(nouns.begin() + static_cast<long>(nouns.size() / 2), nouns.end());
    for (int k = 0; k < 4; ++k) {
      p.sources.push_back(registry_.function(p, {rng_.pick(kVerbs), rng_.pick(kNouns)}));
      p.sinks.push_back(registry_.function(p, {"send", rng_.pick(kNouns)}));
      p.logs.push_back(registry_.function(p, {"log", rng_.pick(kNouns)}));
    }
    std::vector<std::string> words = kWords;
    rng_.shuffle(words);
    p.words.assign(words.begin(), words.begin() + 12);
    return p;
  }

  std::string fresh_function(const Project& p, const std::vector<std::string>& verbs) {
    return registry_.function(p, {rng_.pick(verbs), rng_.pick(kNouns)});
  }

  // if (T == c1) { return "w"; } ... return "w"; -- returns the first literal line.
  int literal_chain(Emitter& e, const Project& p, const std::string& t) {
    const int branches = rng_.uniform_int(0, 3);
    int first = 0;
    std::vector<std::string> words = p.words;
    rng_.shuffle(words);
    for (int b = 0; b < branches; ++b) {
      e.emit(1, "if (" + t + (rng_.bernoulli(0.7) ? " == " : " > ") + std::to_string(rng_.uniform_int(0, 9)) + ") {");
      const int l = e.emit(2, "return " + quote(words[static_cast<std::size_t>(b)]) + ";");
      if (!first) first = l;
      e.emit(1, "}");
    }
    const int l = e.emit(1, "return " + quote(words[static_cast<std::size_t>(branches)]) + ";");
    return first ? first : l;
  }

  void maybe_log(Emitter& e, const Project& p, int indent, const std::string& arg, double prob) {
    if (rng_.bernoulli(prob)) e.emit(indent, rng_.pick(p.logs) + "(" + arg + ");");
  }

  // Defines the string-producing helper(s); returns the helper name.
  std::string bo_helpers(Emitter& e, const Project& p, Scenario& sc, bool tp_names) {
    Scope scope(p, registry_, rng_, tp_names, cfg_.name_bias);
    const std::string helper = fresh_function(p, kVerbs);
    const bool nested = rng_.bernoulli(0.4);
    if (nested) {
      const std::string pick = fresh_function(p, kVerbs);
      Scope ps(p, registry_, rng_, tp_names, cfg_.name_bias);
      const std::string t = ps.var('n');
      e.emit(0, "char *" + pick + "(int " + t + ")");
      e.emit(0, "{");
      maybe_log(e, p, 1, t, 0.3);
      if (sc.label == Label::FP) {
        sc.planted_line = literal_chain(e, p, t);
        sc.pattern = "bo.fp.nested_literal";
      } else {
        if (rng_.bernoulli(0.4)) {
          e.emit(1, "if (" + t + " > " + std::to_string(rng_.uniform_int(0, 9)) + ") {");
          e.emit(2, "return " + rng_.pick(p.sources) + "(" + t + ");");
          e.emit(1, "}");
        }
        sc.planted_line = e.emit(1, "return " + rng_.pick(p.sources) + "(" + t + ");");
        sc.pattern = "bo.tp.nested_external";
      }
      e.emit(0, "}");
      e.emit(0, "");
      const std::string t2 = scope.var('n');
      const std::string r = scope.var('p');
      e.emit(0, "char *" + helper + "(int " + t2 + ")");
      e.emit(0, "{");
      e.emit(1, "char *" + r + ";");
      maybe_log(e, p, 1, t2, 0.3);
      e.emit(1, r + " = " + pick + "(" + t2 + ");");
      e.emit(1, "return " + r + ";");
      e.emit(0, "}");
      e.emit(0, "");
      return helper;
    }
    const std::string t = scope.var('n');
    e.emit(0, "char *" + helper + "(int " + t + ")");
    e.emit(0, "{");
    if (sc.label == Label::FP) {
      maybe_log(e, p, 1, t, 0.3);
      sc.planted_line = literal_chain(e, p, t);
      sc.pattern = "bo.fp.literal";
    } else {
      const std::string r = scope.var('p');
      e.emit(1, "char *" + r + ";");
      maybe_log(e, p, 1, t, 0.3);
      if (rng_.bernoulli(0.4)) {
        e.emit(1, "if (" + t + " == " + std::to_string(rng_.uniform_int(0, 9)) + ") {");
        sc.planted_line = e.emit(2, r + " = " + rng_.pick(p.sources) + "(" + t + ");");
        e.emit(1, "} else {");
        e.emit(2, r + " = " + rng_.pick(p.sources) + "(" + t + " + " + std::to_string(rng_.uniform_int(1, 9)) + ");");
        e.emit(1, "}");
      } else {
        sc.planted_line = e.emit(1, r + " = " + rng_.pick(p.sources) + "(" + t + ");");
      }
      e.emit(1, "return " + r + ";");
      sc.pattern = "bo.tp.external";
    }
    e.emit(0, "}");
    e.emit(0, "");
    return helper;
  }

  // Statements unrelated to the warning, placed before the pattern.
  void pre_noise(Emitter& e, const Project& p, int indent, const std::string& a, const std::string& b,
                 const std::string& x) {
    if (rng_.bernoulli(0.5)) e.emit(indent, rng_.pick(p.logs) + "(" + a + ");");
    if (!x.empty()) e.emit(indent, x + " = " + a + " * " + std::to_string(rng_.uniform_int(2, 9)) + " + " + b + ";");
    if (rng_.bernoulli(0.3)) {
      e.emit(indent, "if (" + a + " > " + std::to_string(rng_.uniform_int(1, 99)) + ") {");
      e.emit(indent + 1, rng_.pick(p.logs) + "(" + (x.empty() ? b : x) + ");");
      e.emit(indent, "}");
    }
  }

  void emit_bo(Emitter& e, const Project& p, Scenario& sc) {
    const bool tp_names = sc.label == Label::TP;
    const std::string helper = bo_helpers(e, p, sc, tp_names);
    Scope s(p, registry_, rng_, tp_names, cfg_.name_bias);
    const std::string fn = fresh_function(p, {"handle", "process", "emit", "update", "report", "dispatch", "apply"});
    const std::string a = s.var('n'), b = s.var('n'), out = s.var('p');
    const std::string buf = s.var('s'), str = s.var('p');
    const bool loop = rng_.bernoulli(0.4);
    const bool arith = rng_.bernoulli(0.4);
    const std::string i = loop ? s.var('n') : "";
    const std::string x = arith ? s.var('n') : "";
    const int size = 16 << rng_.uniform_int(0, 3);

    e.emit(0, "int " + fn + "(int " + a + ", int " + b + ", char *" + out + ")");
    e.emit(0, "{");
    e.emit(1, "char " + buf + "[" + std::to_string(size) + "];");
    e.emit(1, "char *" + str + ";");
    if (loop) e.emit(1, "int " + i + ";");
    if (arith) e.emit(1, "int " + x + ";");
    pre_noise(e, p, 1, a, b, x);
    int ind = 1;
    if (loop) {
      e.emit(1, "for (" + i + " = 0; " + i + " < " + a + "; " + i + "++) {");
      ind = 2;
    }
    const double u = rng_.uniform01();
    if (u < 0.6) {
      e.emit(ind, "snprintf(" + buf + ", " + std::to_string(size) + ", " + quote(rng_.pick(kFormats)) + ", " +
                      (loop ? i : a) + ");");
    } else if (u < 0.8) {
      e.emit(ind, buf + "[0] = 0;");
    }
    e.emit(ind, str + " = " + helper + "(" + b + ");");
    const bool guard = rng_.bernoulli(0.25);
    if (guard) e.emit(ind++, "if (" + b + " > " + std::to_string(rng_.uniform_int(0, 9)) + ") {");
    static const std::vector<std::string> kRisky = {"strcat", "strcpy", "sprintf", "memcpy"};
    const std::string callee = rng_.pick(kRisky);
    std::string call;
    if (callee == "sprintf") {
      call = "sprintf(" + buf + ", \"%s\", " + str + ");";
    } else if (callee == "memcpy") {
      call = "memcpy(" + buf + ", " + str + ", " + b + ");";
    } else {
      call = callee + "(" + buf + ", " + str + ");";
    }
    sc.reported_line = e.emit(ind, call);
    if (guard) e.emit(--ind, "}");
    e.emit(ind, rng_.pick(p.sinks) + "(" + out + ", " + buf + ");");
    maybe_log(e, p, ind, loop ? i : a, 0.5);
    if (loop) e.emit(1, "}");
    e.emit(1, "return 0;");
    e.emit(0, "}");
    e.emit(0, "");
  }

  std::string npd_helper(Emitter& e, const Project& p, Scenario& sc, bool tp_names) {
    Scope s(p, registry_, rng_, tp_names, cfg_.name_bias);
    const std::string name = fresh_function(p, kCheckVerbs);
    const std::string q = s.var('p'), m = s.var('n');
    e.emit(0, "int " + name + "(char *" + q + ", int " + m + ")");
    e.emit(0, "{");
    maybe_log(e, p, 1, m, 0.3);
    const int variant = rng_.uniform_int(0, 2);
    if (sc.label == Label::FP) {
      sc.pattern = "npd.fp.null_check";
      if (variant == 0) {
        sc.planted_line = e.emit(1, "if (" + q + " == NULL) {");
        e.emit(2, "return 0;");
        e.emit(1, "}");
        e.emit(1, "return 1;");
      } else if (variant == 1) {
        sc.planted_line = e.emit(1, "if (" + q + " != NULL) {");
        e.emit(2, "return 1;");
        e.emit(1, "}");
        e.emit(1, "return 0;");
      } else {
        sc.planted_line = e.emit(1, "if (" + m + " < 1 || " + q + " == NULL) {");
        e.emit(2, "return 0;");
        e.emit(1, "}");
        e.emit(1, "return 1;");
      }
    } else {
      sc.pattern = "npd.tp.no_null_check";
      if (variant == 0) {
        e.emit(1, "if (" + m + " > " + std::to_string(16 << rng_.uniform_int(0, 4)) + ") {");
        e.emit(2, "return 0;");
        e.emit(1, "}");
      } else if (variant == 1) {
        e.emit(1, "if (" + m + " == 0) {");
        e.emit(2, "return 0;");
        e.emit(1, "}");
      } else {
        e.emit(1, rng_.pick(p.logs) + "(" + m + ");");
      }
      sc.planted_line = e.emit(1, "return 1;");
    }
    e.emit(0, "}");
    e.emit(0, "");
    return name;
  }

  void emit_npd(Emitter& e, const Project& p, Scenario& sc) {
    const bool tp_names = sc.label == Label::TP;
    const std::string check = npd_helper(e, p, sc, tp_names);
    Scope s(p, registry_, rng_, tp_names, cfg_.name_bias);
    const std::string fn = fresh_function(p, {"alloc", "prepare", "init", "setup", "create", "reserve", "open"});
    const std::string n = s.var('n'), k = s.var('n'), out = s.var('p');
    const std::string ptr = s.var('p'), ok = s.var('n');
    const bool arith = rng_.bernoulli(0.4);
    const std::string x = arith ? s.var('n') : "";

    e.emit(0, "int " + fn + "(int " + n + ", int " + k + ", char *" + out + ")");
    e.emit(0, "{");
    e.emit(1, "char *" + ptr + (rng_.bernoulli(0.3) ? " = NULL;" : ";"));
    e.emit(1, "int " + ok + ";");
    if (arith) e.emit(1, "int " + x + ";");
    pre_noise(e, p, 1, n, k, x);
    e.emit(1, ptr + " = malloc(" + (rng_.bernoulli(0.5) ? n : n + " + " + std::to_string(rng_.uniform_int(1, 8))) +
                  ");");
    e.emit(1, ok + " = " + check + "(" + ptr + ", " + n + ");");
    e.emit(1, "if (" + ok + " == 0) {");
    e.emit(2, "return -1;");
    e.emit(1, "}");
    const int form = rng_.uniform_int(0, 2);
    if (form == 0) {
      sc.reported_line = e.emit(1, "*" + ptr + " = 0;");
    } else if (form == 1) {
      sc.reported_line = e.emit(1, ptr + "[0] = 'a';");
    } else {
      sc.reported_line = e.emit(1, ptr + "[" + k + "] = 0;");
    }
    e.emit(1, rng_.pick(p.sinks) + "(" + out + ", " + ptr + ");");
    maybe_log(e, p, 1, k, 0.5);
    e.emit(1, "return 0;");
    e.emit(0, "}");
    e.emit(0, "");
  }

  std::string file_stem(const Project& p) { return p.compose({rng_.pick(kNouns)}); }

 private:
  const SynthConfig& cfg_;
  Rng& rng_;
  NameRegistry registry_;
};

}  // namespace

SyntheticCorpus synthesize_corpus(const SynthConfig& cfg) {
  if (!(cfg.tp_rate > 0.0 && cfg.tp_rate < 1.0)) throw ConfigError("tp_rate must lie strictly between 0 and 1");
  if (cfg.n_projects < 1) throw ConfigError("n_projects must be at least 1");
  if (cfg.n_warnings < 1) throw ConfigError("n_warnings must be at least 1");
  if (cfg.scenarios_per_file < 1) throw ConfigError("scenarios_per_file must be at least 1");
  if (cfg.npd_share < 0.0 || cfg.npd_share > 1.0) throw ConfigError("npd_share must lie in [0, 1]");

  Rng rng(derive_seed(cfg.seed, "synth"));
  const int n = cfg.n_warnings;
  const int n_tp = static_cast<int>(std::lround(cfg.tp_rate * n));
  const int n_npd = static_cast<int>(std::lround(cfg.npd_share * n));

  std::vector<Scenario> scenarios(static_cast<std::size_t>(n));
  std::vector<Label> labels(static_cast<std::size_t>(n), Label::FP);
  std::fill(labels.begin(), labels.begin() + n_tp, Label::TP);
  rng.shuffle(labels);
  std::vector<WarningKind> kinds(static_cast<std::size_t>(n), WarningKind::BO);
  std::fill(kinds.begin(), kinds.begin() + n_npd, WarningKind::NPD);
  rng.shuffle(kinds);
  std::vector<int> projects(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) projects[static_cast<std::size_t>(i)] = i % cfg.n_projects;
  rng.shuffle(projects);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    scenarios[i].label = labels[i];
    scenarios[i].kind = kinds[i];
    scenarios[i].project = projects[i];
  }

  Generator gen(cfg, rng);
  std::vector<Project> proj;
  for (int p = 0; p < cfg.n_projects; ++p) proj.push_back(gen.make_project(p));

  SyntheticCorpus out;
  std::map<std::string, std::size_t> by_reported;  // "file:line" -> scenario
  for (int p = 0; p < cfg.n_projects; ++p) {
    std::vector<std::size_t> mine;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      if (scenarios[i].project == p) mine.push_back(i);
    }
    int file_no = 0;
    for (std::size_t start = 0; start < mine.size(); start += static_cast<std::size_t>(cfg.scenarios_per_file)) {
      char num[16];
      std::snprintf(num, sizeof num, "%03d", file_no++);
      const std::string path = proj[static_cast<std::size_t>(p)].name + "/" +
                               gen.file_stem(proj[static_cast<std::size_t>(p)]) + "_" + num + ".mc";
      Emitter e;
      const std::size_t end = std::min(mine.size(), start + static_cast<std::size_t>(cfg.scenarios_per_file));
      for (std::size_t j = start; j < end; ++j) {
        Scenario& sc = scenarios[mine[j]];
        sc.file = path;
        if (sc.kind == WarningKind::BO) {
          gen.emit_bo(e, proj[static_cast<std::size_t>(p)], sc);
        } else {
          gen.emit_npd(e, proj[static_cast<std::size_t>(p)], sc);
        }
        by_reported[path + ":" + std::to_string(sc.reported_line)] = mine[j];
      }
      out.files.emplace_back(path, e.text());
      out.manifest.push_back({path, proj[static_cast<std::size_t>(p)].name});
    }
  }

  // The detectors must report exactly the planted statements.
  for (const auto& [path, text] : out.files) {
    const auto unit = minic::parse_source(text, path);
    for (auto w : detect_all(unit)) {
      auto it = by_reported.find(w.file + ":" + std::to_string(w.line));
      if (it == by_reported.end()) throw InternalError("synthetic corpus: unplanted warning " + w.id);
      Scenario& sc = scenarios[it->second];
      if (w.kind != sc.kind) throw InternalError("synthetic corpus: wrong warning kind at " + w.id);
      w.label = sc.label;
      out.planted.push_back({w.id, sc.file, sc.planted_line, sc.pattern});
      out.dataset.warnings.push_back(std::move(w));
      by_reported.erase(it);
    }
  }
  if (!by_reported.empty()) throw InternalError("synthetic corpus: undetected planted warning at " + by_reported.begin()->first);
  out.dataset.project_of.clear();
  for (const auto& m : out.manifest) out.dataset.project_of[m.path] = m.project;
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  for (const auto& [path, text] : corpus.files) write_file(dir / path, text);
  write_file(dir / "manifest.json", format_manifest(corpus.manifest));
  save_warnings(corpus.dataset, dir / "warnings.jsonl");
  nlohmann::json planted = nlohmann::json::array();
  for (const auto& p : corpus.planted) {
    planted.push_back({{"warning", p.warning_id}, {"file", p.file}, {"line", p.line}, {"pattern", p.pattern}});
  }
  write_file(dir / "planted.json", planted.dump(2) + "\n");
}

std::vector<PlantedSite> load_planted(const std::filesystem::path& path) {
  std::vector<PlantedSite> out;
  try {
    for (const auto& p : nlohmann::json::parse(read_file(path))) {
      out.push_back({p.at("warning").get<std::string>(), p.at("file").get<std::string>(), p.at("line").get<int>(),
                     p.at("pattern").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace warnrank::warnings
