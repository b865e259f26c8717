#include "dependence/sdg.hpp"

#include <algorithm>
#include <sstream>

#include "dependence/dataflow.hpp"
#include "util/error.hpp"

namespace warnrank::dep {

const char* edge_kind_name(EdgeKind kind) noexcept {
  switch (kind) {
    case EdgeKind::Control: return "control";
    case EdgeKind::Data: return "data";
    case EdgeKind::Call: return "call";
    case EdgeKind::ParamIn: return "param-in";
    case EdgeKind::ParamOut: return "param-out";
  }
  return "?";
}

const minic::FunctionAst& SystemDependenceGraph::function_ast(int function) const {
  const auto& ref = functions_.at(static_cast<std::size_t>(function));
  return units_[static_cast<std::size_t>(ref.unit)].functions[static_cast<std::size_t>(ref.index)];
}

std::optional<int> SystemDependenceGraph::find_function(std::string_view name) const {
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::span<const std::uint32_t> SystemDependenceGraph::out_edges(NodeId id) const {
  if (!contains(id)) throw UnknownNode("node " + std::to_string(id.value) + " is not in the graph");
  const auto b = out_offsets_[id.index()], e = out_offsets_[id.index() + 1];
  return {out_index_.data() + b, e - b};
}

std::span<const std::uint32_t> SystemDependenceGraph::in_edges(NodeId id) const {
  if (!contains(id)) throw UnknownNode("node " + std::to_string(id.value) + " is not in the graph");
  const auto b = in_offsets_[id.index()], e = in_offsets_[id.index() + 1];
  return {in_index_.data() + b, e - b};
}

NodeId SystemDependenceGraph::stmt_node(int function, minic::StmtId stmt) const {
  const auto& nodes = stmt_nodes_.at(static_cast<std::size_t>(function));
  if (stmt < 0 || static_cast<std::size_t>(stmt) >= nodes.size()) {
    throw UnknownNode("function " + functions_[static_cast<std::size_t>(function)].name + " has no statement " +
                      std::to_string(stmt));
  }
  return nodes[static_cast<std::size_t>(stmt)];
}

NodeId SystemDependenceGraph::entry_node(int function) const { return entry_of_.at(static_cast<std::size_t>(function)); }

const minic::Stmt* SystemDependenceGraph::stmt_of(NodeId id) const {
  const SdgNode& n = node(id);
  if (n.unit < 0) return nullptr;
  if (n.kind == NodeKind::Stmt) return &function_ast(n.function).stmts[static_cast<std::size_t>(n.index)];
  if (n.kind == NodeKind::GlobalDecl) {
    return &units_[static_cast<std::size_t>(n.unit)].globals[static_cast<std::size_t>(n.index)].stmt;
  }
  return nullptr;
}

const std::string& SystemDependenceGraph::file_of(NodeId id) const {
  static const std::string none;
  if (node(id).unit < 0) return none;
  return units_[static_cast<std::size_t>(node(id).unit)].source_id;
}

int SystemDependenceGraph::line_of(NodeId id) const {
  if (const minic::Stmt* s = stmt_of(id)) return s->line;
  const SdgNode& n = node(id);
  if (n.kind == NodeKind::Entry && n.unit >= 0) return function_ast(n.function).line;
  return 0;
}

std::string SystemDependenceGraph::label(NodeId id) const {
  const SdgNode& n = node(id);
  if (n.unit < 0) return "n" + std::to_string(id.value);
  const std::string fn = n.function >= 0 ? functions_[static_cast<std::size_t>(n.function)].name : std::string();
  switch (n.kind) {
    case NodeKind::Stmt: return fn + ":s" + std::to_string(n.index);
    case NodeKind::Entry: return fn + ":entry";
    case NodeKind::FormalIn: return fn + ":in:" + n.var;
    case NodeKind::GlobalIn: return fn + ":global:" + n.var;
    case NodeKind::GlobalDecl: return file_of(id) + ":decl:" + std::to_string(n.index);
  }
  return "?";
}

std::vector<NodeId> SystemDependenceGraph::nodes_at(std::string_view file, int line) const {
  auto it = by_line_.find({std::string(file), line});
  if (it == by_line_.end()) return {};
  return it->second;
}

std::string SystemDependenceGraph::edge_list_text() const {
  std::ostringstream out;
  for (const auto& e : edges_) {
    out << label(e.src) << '\t' << label(e.dst) << '\t' << edge_kind_name(e.kind) << '\t' << e.variable << '\n';
  }
  return out.str();
}

SystemDependenceGraph SystemDependenceGraph::from_edges(std::size_t node_count, std::vector<DependenceEdge> edges) {
  SystemDependenceGraph g;
  g.nodes_.assign(node_count, SdgNode{NodeKind::Stmt, -1, -1, 0, {}});
  for (std::size_t i = 0; i < node_count; ++i) g.nodes_[i].index = static_cast<int>(i);
  for (const auto& e : edges) {
    if (!g.contains(e.src) || !g.contains(e.dst)) throw SdgError("edge endpoint outside the graph");
  }
  g.edges_ = std::move(edges);
  g.finalize();
  return g;
}

NodeId SystemDependenceGraph::add_node(SdgNode n) {
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<std::int32_t>(nodes_.size() - 1)};
}

void SystemDependenceGraph::finalize() {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  const std::size_t n = nodes_.size();
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++out_offsets_[e.src.index() + 1];
    ++in_offsets_[e.dst.index() + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_index_.resize(edges_.size());
  in_index_.resize(edges_.size());
  auto out_fill = out_offsets_, in_fill = in_offsets_;
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    out_index_[out_fill[edges_[i].src.index()]++] = i;
    in_index_[in_fill[edges_[i].dst.index()]++] = i;
  }
}

SystemDependenceGraph build_sdg(std::vector<minic::TranslationUnit> units) {
  SystemDependenceGraph g;
  g.units_ = std::move(units);

  std::map<std::string, int> fn_index;
  for (std::size_t u = 0; u < g.units_.size(); ++u) {
    const auto& unit = g.units_[u];
    for (std::size_t f = 0; f < unit.functions.size(); ++f) {
      const std::string& name = unit.functions[f].name;
      auto [it, fresh] = fn_index.emplace(name, static_cast<int>(g.functions_.size()));
      if (!fresh) {
        const auto& prev = g.units_[static_cast<std::size_t>(g.functions_[static_cast<std::size_t>(it->second)].unit)];
        throw SdgError("function '" + name + "' is defined in both " + prev.source_id + " and " + unit.source_id);
      }
      g.functions_.push_back({static_cast<int>(u), static_cast<int>(f), name});
    }
  }

  // Global declaration nodes, per unit.
  std::vector<std::map<std::string, NodeId>> global_decl(g.units_.size());
  g.global_nodes_.resize(g.units_.size());
  for (std::size_t u = 0; u < g.units_.size(); ++u) {
    const auto& unit = g.units_[u];
    for (std::size_t k = 0; k < unit.globals.size(); ++k) {
      const NodeId id = g.add_node({NodeKind::GlobalDecl, static_cast<int>(u), -1, static_cast<int>(k), {}});
      g.global_nodes_[u].push_back(id);
      for (const auto& d : unit.globals[k].decl.decls) global_decl[u][d.name] = id;
      g.by_line_[{unit.source_id, unit.globals[k].stmt.line}].push_back(id);
    }
  }

  const std::size_t nf = g.functions_.size();
  g.entry_of_.resize(nf);
  g.stmt_nodes_.resize(nf);

  for (std::size_t fi = 0; fi < nf; ++fi) {
    const auto& ref = g.functions_[fi];
    const auto& unit = g.units_[static_cast<std::size_t>(ref.unit)];
    const auto& fn = unit.functions[static_cast<std::size_t>(ref.index)];
    const int f = static_cast<int>(fi);

    std::vector<std::string> global_names;
    for (const auto& [name, _] : global_decl[static_cast<std::size_t>(ref.unit)]) global_names.push_back(name);
    const minic::Cfg cfg = minic::build_cfg(fn, global_names);

    const NodeId entry = g.add_node({NodeKind::Entry, ref.unit, f, 0, {}});
    g.entry_of_[fi] = entry;
    std::map<std::string, NodeId> entry_value;  // variable defined at ENTRY -> node carrying it
    for (std::size_t p = 0; p < fn.params.size(); ++p) {
      entry_value[fn.params[p].name] =
          g.add_node({NodeKind::FormalIn, ref.unit, f, static_cast<int>(p), fn.params[p].name});
    }
    for (int v : cfg.defs[static_cast<std::size_t>(cfg.entry())]) {
      const std::string& var = cfg.vars[static_cast<std::size_t>(v)];
      if (entry_value.count(var)) continue;
      const NodeId gi = g.add_node({NodeKind::GlobalIn, ref.unit, f, 0, var});
      entry_value[var] = gi;
      auto decl = global_decl[static_cast<std::size_t>(ref.unit)].find(var);
      if (decl != global_decl[static_cast<std::size_t>(ref.unit)].end()) {
        g.edges_.push_back({decl->second, gi, EdgeKind::ParamIn, var});
      }
    }
    auto& stmt_nodes = g.stmt_nodes_[fi];
    for (const auto& s : fn.stmts) {
      const NodeId id = g.add_node({NodeKind::Stmt, ref.unit, f, s.id, {}});
      stmt_nodes.push_back(id);
      g.by_line_[{unit.source_id, s.line}].push_back(id);
    }

    auto map_node = [&](int local) { return local == cfg.entry() ? entry : stmt_nodes[static_cast<std::size_t>(local)]; };

    std::vector<bool> has_cd_parent(fn.stmts.size(), false);
    for (const auto& e : control_dependence(cfg)) {
      if (e.dst >= cfg.num_stmts || e.src >= cfg.num_stmts) continue;
      has_cd_parent[static_cast<std::size_t>(e.dst)] = true;
      g.edges_.push_back({map_node(e.src), map_node(e.dst), EdgeKind::Control, {}});
    }
    for (std::size_t s = 0; s < fn.stmts.size(); ++s) {
      if (!has_cd_parent[s]) g.edges_.push_back({entry, stmt_nodes[s], EdgeKind::Control, {}});
    }
    for (const auto& e : data_dependence(cfg)) {
      const std::string& var = cfg.vars[static_cast<std::size_t>(e.var)];
      const NodeId src = e.src == cfg.entry() ? entry_value.at(var) : map_node(e.src);
      g.edges_.push_back({src, map_node(e.dst), EdgeKind::Data, var});
    }
  }

  // Inter-procedural edges.
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const auto& fn = g.function_ast(static_cast<int>(fi));
    auto& callees = g.call_graph_[fn.name];
    for (const auto& s : fn.stmts) {
      const NodeId site = g.stmt_nodes_[fi][static_cast<std::size_t>(s.id)];
      for (std::size_t c = 0; c < s.callees.size(); ++c) {
        auto it = fn_index.find(s.callees[c]);
        if (it == fn_index.end()) continue;  // library or external: opaque
        const int callee = it->second;
        const auto& cfn = g.function_ast(callee);
        callees.insert(cfn.name);
        g.edges_.push_back({site, g.entry_of_[static_cast<std::size_t>(callee)], EdgeKind::Call, {}});
        const std::size_t arity = std::min(static_cast<std::size_t>(s.call_arity[c]), cfn.params.size());
        for (std::size_t p = 0; p < arity; ++p) {
          // FormalIn nodes directly follow the callee's entry node.
          const NodeId formal{g.entry_of_[static_cast<std::size_t>(callee)].value + 1 + static_cast<std::int32_t>(p)};
          g.edges_.push_back({site, formal, EdgeKind::ParamIn, cfn.params[p].name});
        }
        for (const auto& r : cfn.stmts) {
          if (r.kind == minic::StmtKind::Return && r.tokens.size() > 2) {
            g.edges_.push_back({g.stmt_nodes_[static_cast<std::size_t>(callee)][static_cast<std::size_t>(r.id)], site,
                                EdgeKind::ParamOut, cfn.name});
          }
        }
      }
    }
  }

  g.finalize();
  return g;
}

}  // namespace warnrank::dep
