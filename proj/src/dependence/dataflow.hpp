#pragma once

#include <boost/dynamic_bitset.hpp>
#include <vector>

#include "minic/cfg.hpp"

namespace warnrank::dep {

using minic::Cfg;
using NodeSet = boost::dynamic_bitset<>;

// pdom[n] = nodes that post-dominate n (reflexive; EXIT is in every set).
std::vector<NodeSet> post_dominators(const Cfg& g);

// Immediate post-dominator per node; -1 for EXIT.
std::vector<int> immediate_post_dominators(const Cfg& g, const std::vector<NodeSet>& pdom);

struct LocalEdge {
  int src = 0;
  int dst = 0;
  int var = -1;  // index into Cfg::vars for data edges

  auto operator<=>(const LocalEdge&) const = default;
};

// m -> n iff n post-dominates some but not all successors of m. Includes the
// self-dependence of loop headers. Sorted.
std::vector<LocalEdge> control_dependence(const Cfg& g);
std::vector<LocalEdge> control_dependence(const Cfg& g, const std::vector<NodeSet>& pdom);

struct Definition {
  int node = 0;
  int var = 0;
};

struct ReachingDefinitions {
  std::vector<Definition> defs;        // bit i of in/out refers to defs[i]
  std::vector<NodeSet> in;
  std::vector<NodeSet> out;

  bool reaches(int def_node, int var, int at_node) const;
};

// Forward may-analysis: out(n) = gen(n) U (in(n) \ kill(n)); in(n) = U out(p).
ReachingDefinitions reaching_definitions(const Cfg& g);

// d -> u on v iff d defines v, u uses v, and d's definition reaches u. Sorted.
std::vector<LocalEdge> data_dependence(const Cfg& g);
std::vector<LocalEdge> data_dependence(const Cfg& g, const ReachingDefinitions& rd);

}  // namespace warnrank::dep
