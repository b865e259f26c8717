#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "warnings/warning.hpp"

namespace warnrank::eval {

// combined:      label-stratified folds over all warnings pooled together
// per_project:   stratified by (project, label); experiments train and test
//                inside each project separately
// cross_project: whole projects are dealt to folds, so no project appears in
//                both the training and the test side of a fold
enum class Grouping { Combined, PerProject, CrossProject };

const char* grouping_name(Grouping g) noexcept;
Grouping parse_grouping(const std::string& name);  // ConfigError on unknown names

struct FoldPlan {
  int k = 5;
  std::uint64_t seed = 0;
  Grouping grouping = Grouping::Combined;
  std::vector<std::string> ids;  // dataset order
  std::vector<int> fold_of;      // parallel to ids

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
  int fold(const std::string& id) const;
};

// Within each stratum the members are shuffled (seeded per stratum) and dealt
// round-robin; the dealing position carries over between strata so fold sizes
// stay balanced. Throws TooFewSamples if a stratum (or, for cross_project, the
// set of projects) has fewer than k members, UnlabeledError on unlabeled input.
FoldPlan stratified_kfold(const warnings::Dataset& data, int k, std::uint64_t seed, Grouping grouping);

}  // namespace warnrank::eval
