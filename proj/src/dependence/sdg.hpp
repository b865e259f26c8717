#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "minic/ast.hpp"
#include "minic/cfg.hpp"

namespace warnrank::dep {

struct NodeId {
  std::int32_t value = -1;

  auto operator<=>(const NodeId&) const = default;
  std::size_t index() const noexcept { return static_cast<std::size_t>(value); }
};

enum class EdgeKind : std::uint8_t { Control, Data, Call, ParamIn, ParamOut };
const char* edge_kind_name(EdgeKind kind) noexcept;

enum class NodeKind : std::uint8_t {
  Stmt,        // a function statement
  Entry,       // function entry
  FormalIn,    // formal parameter value at entry
  GlobalIn,    // global variable value at entry
  GlobalDecl,  // file-scope declaration
};

struct SdgNode {
  NodeKind kind = NodeKind::Stmt;
  int unit = 0;
  int function = -1;   // index into SystemDependenceGraph::functions(); -1 for GlobalDecl
  int index = 0;       // StmtId, parameter index, or global index
  std::string var;     // FormalIn / GlobalIn
};

struct DependenceEdge {
  NodeId src;
  NodeId dst;
  EdgeKind kind = EdgeKind::Data;
  std::string variable;  // data / param edges

  auto operator<=>(const DependenceEdge&) const = default;
};

struct FunctionRef {
  int unit = 0;
  int index = 0;  // within the unit
  std::string name;
};

class SystemDependenceGraph {
 public:
  const std::vector<minic::TranslationUnit>& units() const noexcept { return units_; }
  const std::vector<FunctionRef>& functions() const noexcept { return functions_; }
  const minic::FunctionAst& function_ast(int function) const;
  std::optional<int> find_function(std::string_view name) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  const SdgNode& node(NodeId id) const { return nodes_.at(id.index()); }
  bool contains(NodeId id) const noexcept { return id.value >= 0 && id.index() < nodes_.size(); }

  const std::vector<DependenceEdge>& edges() const noexcept { return edges_; }
  // Edge indices leaving / entering a node.
  std::span<const std::uint32_t> out_edges(NodeId id) const;
  std::span<const std::uint32_t> in_edges(NodeId id) const;

  const std::map<std::string, std::set<std::string>>& call_graph() const noexcept { return call_graph_; }

  NodeId stmt_node(int function, minic::StmtId stmt) const;
  NodeId entry_node(int function) const;

  // The source statement behind a Stmt or GlobalDecl node; nullptr otherwise.
  const minic::Stmt* stmt_of(NodeId id) const;
  const std::string& file_of(NodeId id) const;
  int line_of(NodeId id) const;  // 0 for nodes without a source line
  std::string label(NodeId id) const;

  // Statement nodes at (file, line) in StmtId order.
  std::vector<NodeId> nodes_at(std::string_view file, int line) const;

  // One edge per line: src, dst, kind, variable (tab separated).
  std::string edge_list_text() const;

  // A bare graph with no source program behind it (nodes are unattributed
  // statements). Used to exercise graph algorithms on arbitrary shapes.
  static SystemDependenceGraph from_edges(std::size_t node_count, std::vector<DependenceEdge> edges);

 private:
  friend SystemDependenceGraph build_sdg(std::vector<minic::TranslationUnit> units);

  NodeId add_node(SdgNode n);
  void finalize();

  std::vector<minic::TranslationUnit> units_;
  std::vector<FunctionRef> functions_;
  std::vector<SdgNode> nodes_;
  std::vector<DependenceEdge> edges_;
  std::vector<std::uint32_t> out_offsets_, out_index_, in_offsets_, in_index_;
  std::vector<NodeId> entry_of_;                       // per function
  std::vector<std::vector<NodeId>> stmt_nodes_;        // per function, by StmtId
  std::vector<std::vector<NodeId>> global_nodes_;      // per unit, by global index
  std::map<std::string, std::set<std::string>> call_graph_;
  std::map<std::pair<std::string, int>, std::vector<NodeId>> by_line_;
};

// Per-function PDGs (control + data) joined by call, param-in, and param-out
// edges. Throws SdgError on a function defined in more than one unit.
SystemDependenceGraph build_sdg(std::vector<minic::TranslationUnit> units);

}  // namespace warnrank::dep
