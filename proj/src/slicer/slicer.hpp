#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dependence/sdg.hpp"
#include "warnings/warning.hpp"

namespace warnrank::slicing {

using dep::NodeId;
using dep::SystemDependenceGraph;

enum class ContextMode { RawFunction, ControlOnly, DataOnly, ControlAndData };

inline constexpr ContextMode kAllModes[] = {ContextMode::RawFunction, ContextMode::ControlOnly, ContextMode::DataOnly,
                                            ContextMode::ControlAndData};

const char* mode_name(ContextMode m) noexcept;  // raw_function, control_only, ...
std::optional<ContextMode> parse_mode(std::string_view s);

// Whether an edge kind may be traversed in `mode`. Call and parameter edges
// are enabled in every slicing mode.
bool edge_enabled(dep::EdgeKind kind, ContextMode mode) noexcept;

// Nodes from which `criterion` is reachable plus nodes reachable from it,
// over the edges enabled by `mode`. Sorted by node id. Throws UnknownNode,
// or ConfigError for RawFunction.
std::vector<NodeId> slice(const SystemDependenceGraph& sdg, NodeId criterion, ContextMode mode);

// One direction of the closure.
std::vector<NodeId> backward_slice(const SystemDependenceGraph& sdg, NodeId criterion, ContextMode mode);
std::vector<NodeId> forward_slice(const SystemDependenceGraph& sdg, NodeId criterion, ContextMode mode);

struct Resolution {
  NodeId node;
  int function = -1;
  bool ambiguous = false;  // several statements share the line
};

// First function statement on (file, line). Throws UnresolvedWarning.
Resolution resolve(const SystemDependenceGraph& sdg, std::string_view file, int line);

struct WarningContext {
  std::string warning_id;
  ContextMode mode = ContextMode::ControlAndData;
  std::vector<NodeId> statements;  // source statements, by (file, line, node id)
  NodeId reported;
  int function = -1;  // containing function of the reported statement

  std::size_t reported_index() const;
};

WarningContext extract_context(const SystemDependenceGraph& sdg, const warnings::Warning& warning, ContextMode mode);

// Context rendered as "file:line: statement" lines; the reported statement is
// marked with '>'.
std::string render_context(const SystemDependenceGraph& sdg, const WarningContext& ctx);

}  // namespace warnrank::slicing
