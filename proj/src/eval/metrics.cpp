#include "eval/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "util/error.hpp"

namespace warnrank::eval {

using nlohmann::json;

RankedList rank(std::vector<RankedEntry> scores) {
  for (const auto& e : scores) {
    if (!std::isfinite(e.score) || e.score < 0 || e.score > 1) {
      throw InternalError(fmt::format("score {} of {} is outside [0, 1]", e.score, e.id));
    }
  }
  std::sort(scores.begin(), scores.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return scores;
}

std::size_t head_size(std::size_t n, int k_percent) {
  if (k_percent <= 0 || k_percent > 100) throw ConfigError(fmt::format("k must lie in (0, 100], got {}", k_percent));
  return (static_cast<std::size_t>(k_percent) * n + 99) / 100;
}

namespace {

warnings::Label label_of(const LabelMap& labels, const std::string& id) {
  auto it = labels.find(id);
  if (it == labels.end()) throw UnlabeledError("ranked warning " + id + " has no label");
  return it->second;
}

std::int64_t tps_in_head(const RankedList& ranked, const LabelMap& labels, std::size_t head) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < head; ++i) n += label_of(labels, ranked[i].id) == warnings::Label::TP;
  return n;
}

std::int64_t actual_tps(const RankedList& ranked, const LabelMap& labels) {
  return tps_in_head(ranked, labels, ranked.size());
}

}  // namespace

Fraction precision_at_k(const RankedList& ranked, const LabelMap& labels, int k_percent) {
  if (ranked.empty()) throw EmptyList("precision of an empty ranking");
  const std::size_t head = head_size(ranked.size(), k_percent);
  return {tps_in_head(ranked, labels, head), static_cast<std::int64_t>(head)};
}

Fraction recall_at_k(const RankedList& ranked, const LabelMap& labels, int k_percent) {
  if (ranked.empty()) throw EmptyList("recall of an empty ranking");
  const std::size_t head = head_size(ranked.size(), k_percent);
  const std::int64_t all = actual_tps(ranked, labels);
  if (all == 0) throw NoActualTPs("recall is undefined: the ranking contains no actual TP");
  return {tps_in_head(ranked, labels, head), all};
}

const KMetrics* find_k(const ListMetrics& m, int k) {
  for (const auto& km : m.per_k) {
    if (km.k == k) return &km;
  }
  return nullptr;
}

ListMetrics evaluate_ranking(const RankedList& ranked, const LabelMap& labels, const std::vector<int>& ks) {
  ListMetrics m;
  m.total = ranked.size();
  if (!ranked.empty()) m.actual_tps = static_cast<std::size_t>(actual_tps(ranked, labels));
  for (int k : ks) m.per_k.push_back({k, precision_at_k(ranked, labels, k), recall_at_k(ranked, labels, k)});
  return m;
}

double MetricReport::precision_at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return precision[i];
  }
  throw ConfigError(fmt::format("report has no k = {}", k));
}

double MetricReport::recall_at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return recall[i];
  }
  throw ConfigError(fmt::format("report has no k = {}", k));
}

MetricReport aggregate(const std::vector<ListMetrics>& lists) {
  if (lists.empty()) throw EmptyList("no rankings to aggregate");
  MetricReport r;
  for (const auto& km : lists.front().per_k) r.ks.push_back(km.k);
  r.precision.assign(r.ks.size(), 0.0);
  r.recall.assign(r.ks.size(), 0.0);
  for (const auto& l : lists) {
    if (l.per_k.size() != r.ks.size()) throw InternalError("rankings were evaluated on different k grids");
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
      r.precision[i] += l.per_k[i].precision.value();
      r.recall[i] += l.per_k[i].recall.value();
    }
    r.actual_tps += l.actual_tps;
    r.total += l.total;
  }
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    r.precision[i] /= static_cast<double>(lists.size());
    r.recall[i] /= static_cast<double>(lists.size());
  }
  r.folds = lists;
  return r;
}

std::string report_json(const MetricReport& report, int indent) {
  json j;
  j["ks"] = report.ks;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["totals"] = {{"actual_tps", report.actual_tps}, {"warnings", report.total}};
  json folds = json::array();
  for (const auto& f : report.folds) {
    json p = json::array(), r = json::array();
    for (const auto& km : f.per_k) {
      p.push_back(km.precision.str());
      r.push_back(km.recall.str());
    }
    folds.push_back({{"total", f.total}, {"actual_tps", f.actual_tps}, {"precision", p}, {"recall", r}});
  }
  j["folds"] = folds;
  return j.dump(indent);
}

namespace {

Fraction parse_fraction(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) throw SchemaError("malformed fraction " + s);
  try {
    return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
  } catch (const std::exception&) {
    throw SchemaError("malformed fraction " + s);
  }
}

}  // namespace

MetricReport parse_report_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    MetricReport r;
    r.ks = j.at("ks").get<std::vector<int>>();
    r.precision = j.at("precision").get<std::vector<double>>();
    r.recall = j.at("recall").get<std::vector<double>>();
    r.actual_tps = j.at("totals").at("actual_tps").get<std::size_t>();
    r.total = j.at("totals").at("warnings").get<std::size_t>();
    for (const auto& f : j.at("folds")) {
      ListMetrics l;
      l.total = f.at("total").get<std::size_t>();
      l.actual_tps = f.at("actual_tps").get<std::size_t>();
      const auto& p = f.at("precision");
      const auto& rc = f.at("recall");
      if (p.size() != r.ks.size() || rc.size() != r.ks.size()) throw SchemaError("fold metrics do not match the k grid");
      for (std::size_t i = 0; i < r.ks.size(); ++i) {
        l.per_k.push_back({r.ks[i], parse_fraction(p[i].get<std::string>()), parse_fraction(rc[i].get<std::string>())});
      }
      r.folds.push_back(std::move(l));
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("metric report: ") + e.what());
  }
}

std::string report_table(const MetricReport& report) {
  std::string out = fmt::format("{:>6}  {:>8}  {:>8}\n", "top-k%", "P@K", "R@K");
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    out += fmt::format("{:>6}  {:>8.4f}  {:>8.4f}\n", report.ks[i], report.precision[i], report.recall[i]);
  }
  out += fmt::format("actual TPs {} of {} warnings over {} fold(s)\n", report.actual_tps, report.total,
                     report.folds.size());
  return out;
}

}  // namespace warnrank::eval
