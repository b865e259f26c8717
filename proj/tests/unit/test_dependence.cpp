#include <filesystem>
#include <set>

#include "dependence/dataflow.hpp"
#include "dependence/sdg.hpp"
#include "doctest.h"
#include "minic/parser.hpp"
#include "oracles.hpp"
#include "util/error.hpp"
#include "warnings/io.hpp"

using namespace warnrank;
using namespace warnrank::dep;

namespace {

std::set<std::pair<int, int>> cd_pairs(const Cfg& g) {
  std::set<std::pair<int, int>> out;
  for (const auto& e : control_dependence(g)) out.insert({e.src, e.dst});
  return out;
}

std::set<std::tuple<int, int, int>> dd_triples(const Cfg& g) {
  std::set<std::tuple<int, int, int>> out;
  for (const auto& e : data_dependence(g)) out.insert({e.src, e.dst, e.var});
  return out;
}

// 0: if (c)  1: x = 1  2: y = x  3: return y
Cfg diamond() {
  Cfg g("diamond", 4);
  g.add_edge(g.entry(), 0);
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(3, g.exit());
  const int x = g.intern("x"), y = g.intern("y"), c = g.intern("c");
  g.defs[static_cast<std::size_t>(g.entry())] = {c, x};
  g.uses[0] = {c};
  g.defs[1] = {x};
  g.uses[2] = {x};
  g.defs[2] = {y};
  g.uses[3] = {y};
  return g;
}

}  // namespace

TEST_CASE("post-dominators of a diamond") {
  const auto g = diamond();
  const auto pdom = post_dominators(g);
  CHECK(pdom[0].test(2));
  CHECK(pdom[0].test(3));
  CHECK_FALSE(pdom[0].test(1));
  CHECK(pdom[1].test(2));
  const auto ipdom = immediate_post_dominators(g, pdom);
  CHECK(ipdom[0] == 2);
  CHECK(ipdom[1] == 2);
  CHECK(ipdom[3] == g.exit());
  CHECK(ipdom[static_cast<std::size_t>(g.exit())] == -1);
}

TEST_CASE("control and data dependence of a diamond") {
  const auto g = diamond();
  CHECK(cd_pairs(g) == std::set<std::pair<int, int>>{{0, 1}});
  const int x = 0, y = 1;
  // Both the entry definition of x and the one on line 1 reach line 2.
  CHECK(dd_triples(g) == std::set<std::tuple<int, int, int>>{
                             {g.entry(), 0, 2}, {g.entry(), 2, x}, {1, 2, x}, {2, 3, y}});
}

TEST_CASE("loop headers depend on themselves") {
  // 0: while (i < n)  1: i++  then exit
  Cfg g("loop", 2);
  g.add_edge(g.entry(), 0);
  g.add_edge(0, 1);
  g.add_edge(1, 0);
  g.add_edge(0, g.exit());
  const auto cd = cd_pairs(g);
  CHECK(cd.count({0, 0}) == 1);
  CHECK(cd.count({0, 1}) == 1);
}

TEST_CASE("random CFGs agree with the brute-force definitions") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = oracle::random_cfg(rng, 8);
    REQUIRE_NOTHROW(g.validate());
    const auto pdom = post_dominators(g);
    for (int n = 0; n < g.size(); ++n) {
      for (int w = 0; w < g.size(); ++w) {
        REQUIRE(pdom[static_cast<std::size_t>(n)].test(static_cast<std::size_t>(w)) == oracle::postdominates(g, w, n));
      }
    }
    REQUIRE(cd_pairs(g) == oracle::control_dependence(g));
    REQUIRE(dd_triples(g) == oracle::data_dependence(g));
  }
}

TEST_CASE("corpus function CFGs agree with the brute-force definitions") {
  const auto corpus = warnings::load_corpus(std::filesystem::path(WARNRANK_SOURCE_DIR) / "corpus/synthetic");
  int checked = 0;
  for (std::size_t u = 0; u < corpus.units.size() && checked < 60; u += 7) {
    for (const auto& fn : corpus.units[u].functions) {
      const auto g = minic::build_cfg(fn);
      CHECK(cd_pairs(g) == oracle::control_dependence(g));
      CHECK(dd_triples(g) == oracle::data_dependence(g));
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("sdg links call sites to callees") {
  const char* src = R"(int g;

int id(int v)
{
  return v;
}

int main(int a)
{
  int r;
  r = id(a);
  g = r;
  return g;
}
)";
  std::vector<minic::TranslationUnit> units{minic::parse_source(src, "m.mc")};
  const auto sdg = build_sdg(units);
  const auto id_fn = sdg.find_function("id");
  const auto main_fn = sdg.find_function("main");
  REQUIRE(id_fn.has_value());
  REQUIRE(main_fn.has_value());
  const NodeId call = sdg.stmt_node(*main_fn, 1);
  CHECK(sdg.line_of(call) == 11);
  const NodeId ret = sdg.stmt_node(*id_fn, 0);

  std::set<EdgeKind> kinds_out;
  std::set<EdgeKind> kinds_in;
  for (auto e : sdg.out_edges(call)) kinds_out.insert(sdg.edges()[e].kind);
  for (auto e : sdg.in_edges(call)) kinds_in.insert(sdg.edges()[e].kind);
  CHECK(kinds_out.count(EdgeKind::Call) == 1);
  CHECK(kinds_out.count(EdgeKind::ParamIn) == 1);
  CHECK(kinds_in.count(EdgeKind::ParamOut) == 1);

  bool ret_to_call = false;
  for (const auto& e : sdg.edges()) {
    if (e.src == ret && e.dst == call && e.kind == EdgeKind::ParamOut) ret_to_call = true;
  }
  CHECK(ret_to_call);
  CHECK(sdg.call_graph().at("main").count("id") == 1);
  CHECK(sdg.nodes_at("m.mc", 11) == std::vector<NodeId>{call});
  CHECK(sdg.stmt_of(call) != nullptr);
}

TEST_CASE("sdg edge list is stable and sorted") {
  const auto corpus = warnings::load_corpus(std::filesystem::path(WARNRANK_SOURCE_DIR) / "corpus/fig1");
  const auto a = build_sdg(corpus.units);
  const auto b = build_sdg(corpus.units);
  CHECK(a.edge_list_text() == b.edge_list_text());
  CHECK(std::is_sorted(a.edges().begin(), a.edges().end()));
}

TEST_CASE("a function defined twice is rejected") {
  std::vector<minic::TranslationUnit> units{minic::parse_source("int f()\n{\n  return 0;\n}\n", "a.mc"),
                                            minic::parse_source("int f()\n{\n  return 1;\n}\n", "b.mc")};
  CHECK_THROWS_AS(build_sdg(units), SdgError);
}

TEST_CASE("bare graphs reject out-of-range endpoints") {
  std::vector<DependenceEdge> edges{{NodeId{0}, NodeId{3}, EdgeKind::Data, "v"}};
  CHECK_THROWS_AS(SystemDependenceGraph::from_edges(2, edges), SdgError);
}
