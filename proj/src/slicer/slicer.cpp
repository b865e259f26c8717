#include "slicer/slicer.hpp"

#include <algorithm>
#include <spdlog/spdlog.h>

#include "minic/lexer.hpp"
#include "util/error.hpp"

namespace warnrank::slicing {

const char* mode_name(ContextMode m) noexcept {
  switch (m) {
    case ContextMode::RawFunction: return "raw_function";
    case ContextMode::ControlOnly: return "control_only";
    case ContextMode::DataOnly: return "data_only";
    case ContextMode::ControlAndData: return "control_and_data";
  }
  return "?";
}

std::optional<ContextMode> parse_mode(std::string_view s) {
  for (ContextMode m : kAllModes) {
    if (s == mode_name(m)) return m;
  }
  return std::nullopt;
}

bool edge_enabled(dep::EdgeKind kind, ContextMode mode) noexcept {
  switch (kind) {
    case dep::EdgeKind::Control: return mode == ContextMode::ControlOnly || mode == ContextMode::ControlAndData;
    case dep::EdgeKind::Data: return mode == ContextMode::DataOnly || mode == ContextMode::ControlAndData;
    default: return mode != ContextMode::RawFunction;
  }
}

namespace {

std::vector<bool> closure(const SystemDependenceGraph& sdg, NodeId criterion, ContextMode mode, bool forward) {
  if (mode == ContextMode::RawFunction) throw ConfigError("raw_function is not a slicing mode");
  if (!sdg.contains(criterion)) {
    throw UnknownNode("slicing criterion " + std::to_string(criterion.value) + " is not a graph node");
  }
  std::vector<bool> seen(sdg.node_count(), false);
  std::vector<NodeId> stack{criterion};
  seen[criterion.index()] = true;
  const auto& edges = sdg.edges();
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    for (std::uint32_t ei : forward ? sdg.out_edges(n) : sdg.in_edges(n)) {
      const auto& e = edges[ei];
      if (!edge_enabled(e.kind, mode)) continue;
      const NodeId next = forward ? e.dst : e.src;
      if (!seen[next.index()]) {
        seen[next.index()] = true;
        stack.push_back(next);
      }
    }
  }
  return seen;
}

std::vector<NodeId> members(const std::vector<bool>& seen) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) out.push_back(NodeId{static_cast<std::int32_t>(i)});
  }
  return out;
}

}  // namespace

std::vector<NodeId> backward_slice(const SystemDependenceGraph& sdg, NodeId criterion, ContextMode mode) {
  return members(closure(sdg, criterion, mode, false));
}

std::vector<NodeId> forward_slice(const SystemDependenceGraph& sdg, NodeId criterion, ContextMode mode) {
  return members(closure(sdg, criterion, mode, true));
}

std::vector<NodeId> slice(const SystemDependenceGraph& sdg, NodeId criterion, ContextMode mode) {
  auto back = closure(sdg, criterion, mode, false);
  const auto fwd = closure(sdg, criterion, mode, true);
  for (std::size_t i = 0; i < back.size(); ++i) back[i] = back[i] || fwd[i];
  return members(back);
}

Resolution resolve(const SystemDependenceGraph& sdg, std::string_view file, int line) {
  Resolution r;
  int candidates = 0;
  for (NodeId id : sdg.nodes_at(file, line)) {
    const auto& n = sdg.node(id);
    if (n.kind != dep::NodeKind::Stmt) continue;
    if (candidates++ == 0) {
      r.node = id;
      r.function = n.function;
    }
  }
  if (candidates == 0) {
    throw UnresolvedWarning(std::string(file) + ":" + std::to_string(line) + " does not hold a function statement");
  }
  r.ambiguous = candidates > 1;
  return r;
}

std::size_t WarningContext::reported_index() const {
  auto it = std::find(statements.begin(), statements.end(), reported);
  return static_cast<std::size_t>(it - statements.begin());
}

WarningContext extract_context(const SystemDependenceGraph& sdg, const warnings::Warning& warning, ContextMode mode) {
  const Resolution where = resolve(sdg, warning.file, warning.line);
  if (where.ambiguous) {
    spdlog::warn("{}:{}: several statements on the line; using the first", warning.file, warning.line);
  }
  WarningContext ctx;
  ctx.warning_id = warning.id;
  ctx.mode = mode;
  ctx.reported = where.node;
  ctx.function = where.function;

  if (mode == ContextMode::RawFunction) {
    const auto& fn = sdg.function_ast(where.function);
    for (const auto& s : fn.stmts) ctx.statements.push_back(sdg.stmt_node(where.function, s.id));
  } else {
    for (NodeId id : slice(sdg, where.node, mode)) {
      if (sdg.stmt_of(id) != nullptr) ctx.statements.push_back(id);
    }
  }
  std::stable_sort(ctx.statements.begin(), ctx.statements.end(), [&](NodeId a, NodeId b) {
    const auto& fa = sdg.file_of(a);
    const auto& fb = sdg.file_of(b);
    if (fa != fb) return fa < fb;
    const int la = sdg.line_of(a), lb = sdg.line_of(b);
    if (la != lb) return la < lb;
    return a < b;
  });
  return ctx;
}

std::string render_context(const SystemDependenceGraph& sdg, const WarningContext& ctx) {
  std::string out;
  for (NodeId id : ctx.statements) {
    const auto* s = sdg.stmt_of(id);
    out += id == ctx.reported ? "> " : "  ";
    out += sdg.file_of(id) + ":" + std::to_string(s->line) + ": " + minic::join_tokens(s->tokens) + "\n";
  }
  return out;
}

}  // namespace warnrank::slicing
