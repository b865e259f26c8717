#include "preprocess/prepared.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "preprocess/abstraction.hpp"
#include "util/error.hpp"

namespace warnrank::prep {

using nlohmann::json;

void PreprocessConfig::validate() const {
  if (L_stmt < 1 || L_slice < L_stmt) throw ConfigError("lengths must satisfy L_slice >= L_stmt >= 1");
}

std::size_t PreparedWarning::ctx_length() const {
  return static_cast<std::size_t>(std::count(ctx_mask.begin(), ctx_mask.end(), std::uint8_t{1}));
}

std::size_t PreparedWarning::stmt_length() const {
  return static_cast<std::size_t>(std::count(stmt_mask.begin(), stmt_mask.end(), std::uint8_t{1}));
}

std::vector<std::string> PreparedDataset::strings(const std::vector<std::int32_t>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(token_table.at(static_cast<std::size_t>(id)));
  return out;
}

namespace {

class Interner {
 public:
  explicit Interner(std::vector<std::string>& table) : table_(table) {
    table_.assign(1, std::string(kPad));
    index_.emplace(table_[0], 0);
  }
  std::vector<std::int32_t> intern(const std::vector<std::string>& tokens) {
    std::vector<std::int32_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
      auto [it, fresh] = index_.emplace(t, static_cast<std::int32_t>(table_.size()));
      if (fresh) table_.push_back(t);
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::vector<std::string>& table_;
  std::unordered_map<std::string, std::int32_t> index_;
};

}  // namespace

PreparedDataset prepare_dataset(const dep::SystemDependenceGraph& sdg, const warnings::Dataset& data,
                                slicing::ContextMode mode, const PreprocessConfig& cfg) {
  cfg.validate();
  PreparedDataset out;
  out.config = cfg;
  out.mode = mode;
  Interner interner(out.token_table);

  for (const auto& w : data.warnings) {
    try {
      const auto ctx = slicing::extract_context(sdg, w, mode);
      std::vector<std::vector<minic::LexToken>> stmts;
      for (auto id : ctx.statements) stmts.push_back(sdg.stmt_of(id)->tokens);
      std::vector<std::string> texts;
      if (cfg.abstraction_on) {
        texts = abstract_identifiers(stmts).statements;
      } else {
        for (const auto& s : stmts) texts.push_back(minic::join_tokens(s));
      }
      const std::size_t reported = ctx.reported_index();
      const auto tokenized = tokenize_context(texts);
      const auto ctx_seq = fit_length(tokenized.tokens, tokenized.spans, reported, cfg.L_slice);
      const Span rs = tokenized.spans[reported];
      const std::vector<std::string> stmt_tokens(tokenized.tokens.begin() + static_cast<std::ptrdiff_t>(rs.begin),
                                                 tokenized.tokens.begin() + static_cast<std::ptrdiff_t>(rs.end));
      const auto stmt_seq = fit_length(stmt_tokens, {Span{0, stmt_tokens.size()}}, 0, cfg.L_stmt);

      PreparedWarning p;
      p.id = w.id;
      p.label = w.label;
      p.project = data.project(w);
      p.ctx = interner.intern(ctx_seq.tokens);
      p.ctx_mask = ctx_seq.mask;
      p.ctx_spans = ctx_seq.spans;
      p.ctx_reported = ctx_seq.reported;
      p.stmt = interner.intern(stmt_seq.tokens);
      p.stmt_mask = stmt_seq.mask;
      out.items.push_back(std::move(p));
    } catch (const Error& e) {
      throw Error(e.code(), "warning " + w.id + ": " + e.what());
    }
  }
  return out;
}

Vocabulary build_vocab(const PreparedDataset& data, const std::vector<std::size_t>& items) {
  std::vector<std::vector<std::string>> seqs;
  seqs.reserve(items.size() * 2);
  for (auto i : items) {
    const auto& it = data.items.at(i);
    seqs.push_back(data.strings(it.ctx));
    seqs.push_back(data.strings(it.stmt));
  }
  return Vocabulary::build(seqs);
}

namespace {

std::string mask_string(const std::vector<std::uint8_t>& m) {
  std::string s(m.size(), '0');
  for (std::size_t i = 0; i < m.size(); ++i) s[i] = m[i] ? '1' : '0';
  return s;
}

std::vector<std::uint8_t> parse_mask(const std::string& s) {
  std::vector<std::uint8_t> m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw SchemaError("mask strings hold only 0 and 1");
    m[i] = s[i] == '1';
  }
  return m;
}

}  // namespace

std::string format_prepared(const PreparedDataset& data) {
  std::string out = json{{"format", "warnrank-prepared"},
                         {"version", 1},
                         {"mode", slicing::mode_name(data.mode)},
                         {"L_slice", data.config.L_slice},
                         {"L_stmt", data.config.L_stmt},
                         {"abstraction", data.config.abstraction_on},
                         {"tokens", data.token_table}}
                        .dump();
  out += '\n';
  for (const auto& p : data.items) {
    json spans = json::array();
    for (const auto& s : p.ctx_spans) spans.push_back({s.begin, s.end});
    json rec{{"id", p.id},
             {"label", p.label ? json(warnings::label_name(*p.label)) : json(nullptr)},
             {"project", p.project},
             {"ctx", p.ctx},
             {"ctx_mask", mask_string(p.ctx_mask)},
             {"ctx_spans", spans},
             {"ctx_reported", p.ctx_reported},
             {"stmt", p.stmt},
             {"stmt_mask", mask_string(p.stmt_mask)}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

PreparedDataset parse_prepared(std::string_view text) {
  PreparedDataset out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  try {
    if (!std::getline(in, line)) throw SchemaError("empty prepared-dataset file");
    ++line_no;
    const json head = json::parse(line);
    if (head.at("format") != "warnrank-prepared" || head.at("version") != 1) {
      throw SchemaError("unsupported prepared-dataset format");
    }
    const auto mode = slicing::parse_mode(head.at("mode").get<std::string>());
    if (!mode) throw SchemaError("unknown context mode");
    out.mode = *mode;
    out.config.L_slice = head.at("L_slice").get<std::size_t>();
    out.config.L_stmt = head.at("L_stmt").get<std::size_t>();
    out.config.abstraction_on = head.at("abstraction").get<bool>();
    out.token_table = head.at("tokens").get<std::vector<std::string>>();
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json rec = json::parse(line);
      PreparedWarning p;
      p.id = rec.at("id").get<std::string>();
      if (!rec.at("label").is_null()) p.label = warnings::parse_label(rec.at("label").get<std::string>());
      p.project = rec.at("project").get<std::string>();
      p.ctx = rec.at("ctx").get<std::vector<std::int32_t>>();
      p.ctx_mask = parse_mask(rec.at("ctx_mask").get<std::string>());
      for (const auto& s : rec.at("ctx_spans")) p.ctx_spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
      p.ctx_reported = rec.at("ctx_reported").get<std::size_t>();
      p.stmt = rec.at("stmt").get<std::vector<std::int32_t>>();
      p.stmt_mask = parse_mask(rec.at("stmt_mask").get<std::string>());
      for (auto id : p.ctx) {
        if (id < 0 || static_cast<std::size_t>(id) >= out.token_table.size()) throw SchemaError("token id out of range");
      }
      for (auto id : p.stmt) {
        if (id < 0 || static_cast<std::size_t>(id) >= out.token_table.size()) throw SchemaError("token id out of range");
      }
      out.items.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw SchemaError("prepared dataset line " + std::to_string(line_no) + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError("prepared dataset line " + std::to_string(line_no) + ": " + e.what());
  }
  return out;
}

}  // namespace warnrank::prep
