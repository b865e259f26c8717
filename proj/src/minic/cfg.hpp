#pragma once

#include <string>
#include <vector>

#include "minic/ast.hpp"

namespace warnrank::minic {

// Per-function control-flow graph. Statement nodes are 0..num_stmts-1 (equal
// to their StmtId), followed by the synthetic ENTRY and EXIT nodes. Def/use
// facts are interned into `vars`; ENTRY defines the parameters and the
// globals the function touches.
struct Cfg {
  std::string function;
  int num_stmts = 0;
  std::vector<std::vector<int>> succ;
  std::vector<std::vector<int>> pred;
  std::vector<std::string> vars;
  std::vector<std::vector<int>> defs;
  std::vector<std::vector<int>> uses;

  Cfg() = default;
  Cfg(std::string function_name, int statements);

  int entry() const noexcept { return num_stmts; }
  int exit() const noexcept { return num_stmts + 1; }
  int size() const noexcept { return num_stmts + 2; }

  void add_edge(int from, int to);
  int intern(const std::string& var);
  std::vector<std::pair<int, int>> edges() const;

  // Throws CfgError unless every node lies on some ENTRY->EXIT path, ENTRY
  // has no predecessors, and EXIT has no successors.
  void validate() const;
};

Cfg build_cfg(const FunctionAst& fn, const std::vector<std::string>& global_names = {});

}  // namespace warnrank::minic
