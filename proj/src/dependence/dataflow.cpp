#include "dependence/dataflow.hpp"

#include <algorithm>
#include <deque>

namespace warnrank::dep {

namespace {
inline std::size_t u(int x) { return static_cast<std::size_t>(x); }
}  // namespace

std::vector<NodeSet> post_dominators(const Cfg& g) {
  const std::size_t n = u(g.size());
  std::vector<NodeSet> pdom(n, NodeSet(n).set());
  pdom[u(g.exit())].reset();
  pdom[u(g.exit())].set(u(g.exit()));

  bool changed = true;
  while (changed) {
    changed = false;
    // Reverse node order converges quickly for structured graphs.
    for (int v = g.size() - 1; v >= 0; --v) {
      if (v == g.exit()) continue;
      NodeSet next(n);
      const auto& succ = g.succ[u(v)];
      if (!succ.empty()) {
        next.set();
        for (int s : succ) next &= pdom[u(s)];
      }
      next.set(u(v));
      if (next != pdom[u(v)]) {
        pdom[u(v)] = std::move(next);
        changed = true;
      }
    }
  }
  return pdom;
}

std::vector<int> immediate_post_dominators(const Cfg& g, const std::vector<NodeSet>& pdom) {
  std::vector<int> ipdom(u(g.size()), -1);
  for (int v = 0; v < g.size(); ++v) {
    if (v == g.exit()) continue;
    // The strict post-dominator whose own post-dominator set is largest is
    // the closest one.
    std::size_t best_count = 0;
    for (auto w = pdom[u(v)].find_first(); w != NodeSet::npos; w = pdom[u(v)].find_next(w)) {
      if (static_cast<int>(w) == v) continue;
      const std::size_t c = pdom[w].count();
      if (ipdom[u(v)] < 0 || c > best_count) {
        best_count = c;
        ipdom[u(v)] = static_cast<int>(w);
      }
    }
  }
  return ipdom;
}

std::vector<LocalEdge> control_dependence(const Cfg& g) { return control_dependence(g, post_dominators(g)); }

std::vector<LocalEdge> control_dependence(const Cfg& g, const std::vector<NodeSet>& pdom) {
  std::vector<LocalEdge> out;
  const std::size_t n = u(g.size());
  for (int m = 0; m < g.size(); ++m) {
    const auto& succ = g.succ[u(m)];
    if (succ.size() < 2) continue;
    NodeSet some(n), all(n);
    all.set();
    for (int s : succ) {
      some |= pdom[u(s)];
      all &= pdom[u(s)];
    }
    const NodeSet dep = some - all;
    for (auto v = dep.find_first(); v != NodeSet::npos; v = dep.find_next(v)) {
      out.push_back({m, static_cast<int>(v), -1});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool ReachingDefinitions::reaches(int def_node, int var, int at_node) const {
  for (std::size_t i = 0; i < defs.size(); ++i) {
    if (defs[i].node == def_node && defs[i].var == var) return in[u(at_node)].test(i);
  }
  return false;
}

ReachingDefinitions reaching_definitions(const Cfg& g) {
  ReachingDefinitions rd;
  const std::size_t n = u(g.size());
  for (int v = 0; v < g.size(); ++v) {
    for (int var : g.defs[u(v)]) rd.defs.push_back({v, var});
  }
  const std::size_t nd = rd.defs.size();
  std::vector<NodeSet> gen(n, NodeSet(nd)), kill(n, NodeSet(nd));
  std::vector<NodeSet> defs_of_var(g.vars.size(), NodeSet(nd));
  for (std::size_t i = 0; i < nd; ++i) {
    gen[u(rd.defs[i].node)].set(i);
    defs_of_var[u(rd.defs[i].var)].set(i);
  }
  for (int v = 0; v < g.size(); ++v) {
    for (int var : g.defs[u(v)]) kill[u(v)] |= defs_of_var[u(var)];
    kill[u(v)] -= gen[u(v)];
  }

  rd.in.assign(n, NodeSet(nd));
  rd.out.assign(n, NodeSet(nd));
  std::deque<int> work;
  std::vector<bool> queued(n, true);
  for (int v = 0; v < g.size(); ++v) work.push_back(v);
  while (!work.empty()) {
    const int v = work.front();
    work.pop_front();
    queued[u(v)] = false;
    NodeSet in(nd);
    for (int p : g.pred[u(v)]) in |= rd.out[u(p)];
    NodeSet out = gen[u(v)] | (in - kill[u(v)]);
    rd.in[u(v)] = std::move(in);
    if (out != rd.out[u(v)]) {
      rd.out[u(v)] = std::move(out);
      for (int s : g.succ[u(v)]) {
        if (!queued[u(s)]) {
          queued[u(s)] = true;
          work.push_back(s);
        }
      }
    }
  }
  return rd;
}

std::vector<LocalEdge> data_dependence(const Cfg& g) { return data_dependence(g, reaching_definitions(g)); }

std::vector<LocalEdge> data_dependence(const Cfg& g, const ReachingDefinitions& rd) {
  std::vector<LocalEdge> out;
  for (int v = 0; v < g.size(); ++v) {
    const auto& uses = g.uses[u(v)];
    if (uses.empty()) continue;
    const NodeSet& in = rd.in[u(v)];
    for (auto i = in.find_first(); i != NodeSet::npos; i = in.find_next(i)) {
      const Definition& d = rd.defs[i];
      if (std::find(uses.begin(), uses.end(), d.var) != uses.end()) out.push_back({d.node, v, d.var});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace warnrank::dep
