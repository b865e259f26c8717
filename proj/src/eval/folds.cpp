#include "eval/folds.hpp"

#include <algorithm>
#include <map>

#include "util/error.hpp"
#include "util/rng.hpp"

namespace warnrank::eval {

const char* grouping_name(Grouping g) noexcept {
  switch (g) {
    case Grouping::Combined: return "combined";
    case Grouping::PerProject: return "per_project";
    case Grouping::CrossProject: return "cross_project";
  }
  return "?";
}

Grouping parse_grouping(const std::string& name) {
  for (auto g : {Grouping::Combined, Grouping::PerProject, Grouping::CrossProject}) {
    if (name == grouping_name(g)) return g;
  }
  throw ConfigError("unknown split setting '" + name + "' (expected combined, per_project or cross_project)");
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

int FoldPlan::fold(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return fold_of[i];
  }
  throw UnresolvedWarning("warning " + id + " is not in the fold plan");
}

FoldPlan stratified_kfold(const warnings::Dataset& data, int k, std::uint64_t seed, Grouping grouping) {
  if (k < 2) throw ConfigError("k must be at least 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.grouping = grouping;
  const auto& ws = data.warnings;
  plan.fold_of.assign(ws.size(), -1);
  for (const auto& w : ws) {
    if (!w.label) throw UnlabeledError("warning " + w.id + " has no label; folds need labels");
    plan.ids.push_back(w.id);
  }

  if (grouping == Grouping::CrossProject) {
    std::map<std::string, std::vector<std::size_t>> by_project;
    for (std::size_t i = 0; i < ws.size(); ++i) by_project[data.project(ws[i])].push_back(i);
    if (static_cast<int>(by_project.size()) < k) {
      throw TooFewSamples("cross-project folds need at least " + std::to_string(k) + " projects, found " +
                          std::to_string(by_project.size()));
    }
    std::vector<std::string> projects;
    for (const auto& [p, _] : by_project) projects.push_back(p);
    Rng(derive_seed(seed, "split")).shuffle(projects);
    for (std::size_t j = 0; j < projects.size(); ++j) {
      for (auto i : by_project[projects[j]]) plan.fold_of[i] = static_cast<int>(j % static_cast<std::size_t>(k));
    }
    return plan;
  }

  // Strata in a fixed order: (project, label) or label alone.
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const std::string project = grouping == Grouping::PerProject ? data.project(ws[i]) : std::string();
    strata[{project, static_cast<int>(*ws[i].label)}].push_back(i);
  }
  std::size_t next = 0;
  std::uint64_t s = 0;
  for (auto& [key, members] : strata) {
    if (static_cast<int>(members.size()) < k) {
      throw TooFewSamples("stratum " + (key.first.empty() ? std::string() : key.first + "/") +
                          warnings::label_name(static_cast<warnings::Label>(key.second)) + " has " +
                          std::to_string(members.size()) + " warnings, fewer than k = " + std::to_string(k));
    }
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return ws[a].id < ws[b].id; });
    Rng(derive_seed(seed, "split", s++)).shuffle(members);
    for (auto i : members) plan.fold_of[i] = static_cast<int>(next++ % static_cast<std::size_t>(k));
  }
  return plan;
}

}  // namespace warnrank::eval
