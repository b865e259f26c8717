#include "minic/cfg.hpp"

#include <algorithm>
#include <set>

#include "util/error.hpp"

namespace warnrank::minic {

Cfg::Cfg(std::string function_name, int statements)
    : function(std::move(function_name)),
      num_stmts(statements),
      succ(static_cast<std::size_t>(statements + 2)),
      pred(static_cast<std::size_t>(statements + 2)),
      defs(static_cast<std::size_t>(statements + 2)),
      uses(static_cast<std::size_t>(statements + 2)) {}

void Cfg::add_edge(int from, int to) {
  auto& s = succ[static_cast<std::size_t>(from)];
  if (std::find(s.begin(), s.end(), to) != s.end()) return;
  s.push_back(to);
  pred[static_cast<std::size_t>(to)].push_back(from);
}

int Cfg::intern(const std::string& var) {
  auto it = std::find(vars.begin(), vars.end(), var);
  if (it != vars.end()) return static_cast<int>(it - vars.begin());
  vars.push_back(var);
  return static_cast<int>(vars.size()) - 1;
}

std::vector<std::pair<int, int>> Cfg::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int n = 0; n < size(); ++n) {
    for (int s : succ[static_cast<std::size_t>(n)]) out.emplace_back(n, s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<bool> reach(const Cfg& g, int start, bool forward) {
  std::vector<bool> seen(static_cast<std::size_t>(g.size()), false);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    const auto& next = forward ? g.succ[static_cast<std::size_t>(n)] : g.pred[static_cast<std::size_t>(n)];
    for (int m : next) {
      if (!seen[static_cast<std::size_t>(m)]) {
        seen[static_cast<std::size_t>(m)] = true;
        stack.push_back(m);
      }
    }
  }
  return seen;
}

}  // namespace

void Cfg::validate() const {
  if (!pred[static_cast<std::size_t>(entry())].empty()) throw CfgError(function + ": ENTRY has predecessors");
  if (!succ[static_cast<std::size_t>(exit())].empty()) throw CfgError(function + ": EXIT has successors");
  const auto from_entry = reach(*this, entry(), true);
  const auto to_exit = reach(*this, exit(), false);
  for (int n = 0; n < size(); ++n) {
    if (!from_entry[static_cast<std::size_t>(n)]) {
      throw CfgError(function + ": statement " + std::to_string(n) + " is unreachable");
    }
    if (!to_exit[static_cast<std::size_t>(n)]) {
      throw CfgError(function + ": statement " + std::to_string(n) + " cannot reach the function exit");
    }
  }
}

namespace {

class CfgBuilder {
 public:
  explicit CfgBuilder(Cfg& g) : g_(g) {}

  int build_list(const std::vector<AstStmt>& list, int follow) {
    int next = follow;
    for (auto it = list.rbegin(); it != list.rend(); ++it) next = build(*it, next);
    return next;
  }

 private:
  int build(const AstStmt& s, int follow) {
    switch (s.kind) {
      case AstStmt::Kind::Decl:
      case AstStmt::Kind::Expr:
        g_.add_edge(s.id, follow);
        return s.id;
      case AstStmt::Kind::Return:
        g_.add_edge(s.id, g_.exit());
        return s.id;
      case AstStmt::Kind::If: {
        const int then_entry = build_list(s.body, follow);
        const int else_entry = s.else_body.empty() ? follow : build_list(s.else_body, follow);
        g_.add_edge(s.id, then_entry);
        g_.add_edge(s.id, else_entry);
        return s.id;
      }
      case AstStmt::Kind::While:
      case AstStmt::Kind::For: {
        const int body_entry = build_list(s.body, s.id);
        g_.add_edge(s.id, body_entry);
        g_.add_edge(s.id, follow);
        return s.id;
      }
      case AstStmt::Kind::Block: {
        const int inner = build_list(s.body, follow);
        if (s.id < 0) return inner;
        g_.add_edge(s.id, inner);
        return s.id;
      }
    }
    return follow;
  }

  Cfg& g_;
};

}  // namespace

Cfg build_cfg(const FunctionAst& fn, const std::vector<std::string>& global_names) {
  Cfg g(fn.name, static_cast<int>(fn.stmts.size()));
  CfgBuilder b(g);
  const int first = b.build_list(fn.body, g.exit());
  g.add_edge(g.entry(), first);

  std::set<std::string> touched;
  for (const auto& s : fn.stmts) {
    auto& d = g.defs[static_cast<std::size_t>(s.id)];
    auto& u = g.uses[static_cast<std::size_t>(s.id)];
    for (const auto& v : s.defs) {
      d.push_back(g.intern(v));
      touched.insert(v);
    }
    for (const auto& v : s.uses) {
      u.push_back(g.intern(v));
      touched.insert(v);
    }
    std::sort(d.begin(), d.end());
    std::sort(u.begin(), u.end());
  }
  auto& entry_defs = g.defs[static_cast<std::size_t>(g.entry())];
  for (const auto& p : fn.params) entry_defs.push_back(g.intern(p.name));
  for (const auto& name : global_names) {
    const bool shadowed = std::any_of(fn.params.begin(), fn.params.end(), [&](const Param& p) { return p.name == name; });
    if (touched.count(name) && !shadowed) entry_defs.push_back(g.intern(name));
  }
  std::sort(entry_defs.begin(), entry_defs.end());
  entry_defs.erase(std::unique(entry_defs.begin(), entry_defs.end()), entry_defs.end());

  try {
    g.validate();
  } catch (const CfgError& e) {
    // Re-report with the source line of the offending statement.
    std::string msg = e.what();
    for (const auto& s : fn.stmts) {
      const std::string tag = "statement " + std::to_string(s.id) + " ";
      if (msg.find(tag) != std::string::npos) {
        msg += " (line " + std::to_string(s.line) + ")";
        break;
      }
    }
    throw CfgError(msg);
  }
  return g;
}

}  // namespace warnrank::minic
