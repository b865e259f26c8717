#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "warnings/warning.hpp"

namespace warnrank::eval {

// num/den kept as the raw counts; equality is by value.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  friend bool operator==(const Fraction& a, const Fraction& b) noexcept { return a.num * b.den == b.num * a.den; }
};

struct RankedEntry {
  std::string id;
  double score = 0;
  bool operator==(const RankedEntry&) const = default;
};
using RankedList = std::vector<RankedEntry>;
using LabelMap = std::unordered_map<std::string, warnings::Label>;

inline const std::vector<int> kDefaultKGrid{1, 5, 10, 20, 30, 40, 50, 60};

// Descending score, ties by ascending id. Scores must be finite and in [0, 1].
RankedList rank(std::vector<RankedEntry> scores);

// ceil(k_percent * n / 100); k_percent in (0, 100].
std::size_t head_size(std::size_t n, int k_percent);

Fraction precision_at_k(const RankedList& ranked, const LabelMap& labels, int k_percent);
Fraction recall_at_k(const RankedList& ranked, const LabelMap& labels, int k_percent);

struct KMetrics {
  int k = 0;
  Fraction precision;
  Fraction recall;
};

struct ListMetrics {
  std::size_t total = 0;
  std::size_t actual_tps = 0;
  std::vector<KMetrics> per_k;
};

const KMetrics* find_k(const ListMetrics& m, int k);

ListMetrics evaluate_ranking(const RankedList& ranked, const LabelMap& labels, const std::vector<int>& ks);

// Unweighted mean over lists (folds) of P@K and R@K.
struct MetricReport {
  std::vector<int> ks;
  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t actual_tps = 0;  // summed over the lists
  std::size_t total = 0;
  std::vector<ListMetrics> folds;

  double precision_at(int k) const;
  double recall_at(int k) const;
};

MetricReport aggregate(const std::vector<ListMetrics>& lists);

// {"ks":[..],"precision":[..],"recall":[..],"totals":{"actual_tps":..,"warnings":..},
//  "folds":[{"total":..,"actual_tps":..,"precision":["a/b",..],"recall":[..]}]}
std::string report_json(const MetricReport& report, int indent = 2);
MetricReport parse_report_json(const std::string& text);

// Aligned columns: k%, P@K, R@K.
std::string report_table(const MetricReport& report);

}  // namespace warnrank::eval
