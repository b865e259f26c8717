#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dependence/sdg.hpp"
#include "preprocess/sequence.hpp"
#include "slicer/slicer.hpp"
#include "warnings/warning.hpp"

namespace warnrank::prep {

struct PreprocessConfig {
  std::size_t L_slice = 600;
  std::size_t L_stmt = 40;
  bool abstraction_on = true;

  void validate() const;  // ConfigError unless L_slice >= L_stmt >= 1
  bool operator==(const PreprocessConfig&) const = default;
};

// Token ids below index the dataset's token table (not a vocabulary: those are
// built per training split).
struct PreparedWarning {
  std::string id;
  std::optional<warnings::Label> label;
  std::string project;
  std::vector<std::int32_t> ctx;        // L_slice entries
  std::vector<std::uint8_t> ctx_mask;
  std::vector<Span> ctx_spans;
  std::size_t ctx_reported = 0;
  std::vector<std::int32_t> stmt;       // L_stmt entries
  std::vector<std::uint8_t> stmt_mask;

  std::size_t ctx_length() const;   // real tokens (they always form a prefix)
  std::size_t stmt_length() const;
  bool operator==(const PreparedWarning&) const = default;
};

struct PreparedDataset {
  PreprocessConfig config;
  slicing::ContextMode mode = slicing::ContextMode::ControlAndData;
  std::vector<std::string> token_table;  // token_table[0] = "<pad>"
  std::vector<PreparedWarning> items;

  std::vector<std::string> strings(const std::vector<std::int32_t>& ids) const;
  bool operator==(const PreparedDataset&) const = default;
};

// Context extraction, abstraction (when enabled), tokenization, and length
// fitting for every warning. Errors carry the warning id.
PreparedDataset prepare_dataset(const dep::SystemDependenceGraph& sdg, const warnings::Dataset& data,
                                slicing::ContextMode mode, const PreprocessConfig& cfg);

// Vocabulary over the context and statement tokens of the selected items.
Vocabulary build_vocab(const PreparedDataset& data, const std::vector<std::size_t>& items);

// Line-delimited JSON. Line 1 is a header
//   {"format":"warnrank-prepared","version":1,"mode":..,"L_slice":..,"L_stmt":..,
//    "abstraction":true|false,"tokens":[...]}
// followed by one record per warning
//   {"id":..,"label":"TP"|"FP"|null,"project":..,"ctx":[ids],"ctx_mask":"1110..",
//    "ctx_spans":[[b,e],..],"ctx_reported":k,"stmt":[ids],"stmt_mask":"10.."}
std::string format_prepared(const PreparedDataset& data);
PreparedDataset parse_prepared(std::string_view text);

}  // namespace warnrank::prep
