#include "warnings/detectors.hpp"

#include <algorithm>
#include <set>

#include "dependence/dataflow.hpp"

namespace warnrank::warnings {

std::string warning_id(const std::string& file, int line, WarningKind kind, const std::string& detector) {
  return file + ":" + std::to_string(line) + ":" + kind_name(kind) + ":" + detector;
}

namespace {

Warning make(const minic::TranslationUnit& unit, const minic::FunctionAst& fn, int line, WarningKind kind,
             std::string detector) {
  Warning w;
  w.id = warning_id(unit.source_id, line, kind, detector);
  w.file = unit.source_id;
  w.function = fn.name;
  w.line = line;
  w.kind = kind;
  w.detector = std::move(detector);
  return w;
}

std::vector<std::string> global_names(const minic::TranslationUnit& unit) {
  std::vector<std::string> out;
  for (const auto& g : unit.globals) {
    for (const auto& d : g.decl.decls) out.push_back(d.name);
  }
  return out;
}

minic::ValueOrigin origin_of(const minic::Stmt& s, const std::string& var) {
  minic::ValueOrigin o = minic::ValueOrigin::Other;
  for (const auto& pa : s.pointer_assigns) {
    if (pa.var == var) o = pa.origin;
  }
  return o;
}

}  // namespace

std::vector<Warning> detect_bo(const minic::TranslationUnit& unit) {
  std::vector<Warning> out;
  std::set<std::pair<int, std::string>> seen;
  for (const auto& fn : unit.functions) {
    for (const auto& s : fn.stmts) {
      for (const auto& callee : s.callees) {
        const bool risky = std::any_of(std::begin(kRiskyBufferCalls), std::end(kRiskyBufferCalls),
                                       [&](const char* r) { return callee == r; });
        if (risky && seen.emplace(s.line, callee).second) {
          out.push_back(make(unit, fn, s.line, WarningKind::BO, "bo." + callee));
        }
      }
    }
  }
  return out;
}

std::vector<Warning> detect_npd(const minic::TranslationUnit& unit) {
  std::vector<Warning> out;
  std::set<int> seen_lines;
  const auto globals = global_names(unit);
  for (const auto& fn : unit.functions) {
    const minic::Cfg cfg = minic::build_cfg(fn, globals);
    const auto rd = dep::reaching_definitions(cfg);
    std::vector<std::vector<int>> cd_parents(static_cast<std::size_t>(cfg.size()));
    for (const auto& e : dep::control_dependence(cfg)) cd_parents[static_cast<std::size_t>(e.dst)].push_back(e.src);

    for (const auto& s : fn.stmts) {
      for (const auto& p : s.derefs) {
        auto vit = std::find(cfg.vars.begin(), cfg.vars.end(), p);
        if (vit == cfg.vars.end()) continue;
        const int var = static_cast<int>(vit - cfg.vars.begin());

        bool may_be_null = false;
        const auto& in = rd.in[static_cast<std::size_t>(s.id)];
        for (std::size_t d = 0; d < rd.defs.size(); ++d) {
          const auto& def = rd.defs[d];
          if (!in.test(d) || def.var != var || def.node >= cfg.num_stmts) continue;
          const auto o = origin_of(fn.stmts[static_cast<std::size_t>(def.node)], p);
          if (o == minic::ValueOrigin::NullLiteral || o == minic::ValueOrigin::Malloc) may_be_null = true;
        }
        if (!may_be_null) continue;

        bool guarded = false;
        std::vector<bool> visited(static_cast<std::size_t>(cfg.size()), false);
        std::vector<int> stack = cd_parents[static_cast<std::size_t>(s.id)];
        while (!stack.empty() && !guarded) {
          const int c = stack.back();
          stack.pop_back();
          if (visited[static_cast<std::size_t>(c)]) continue;
          visited[static_cast<std::size_t>(c)] = true;
          const auto& uses = fn.stmts[static_cast<std::size_t>(c)].uses;
          if (std::find(uses.begin(), uses.end(), p) != uses.end()) guarded = true;
          for (int up : cd_parents[static_cast<std::size_t>(c)]) stack.push_back(up);
        }
        if (!guarded && seen_lines.insert(s.line).second) {
          out.push_back(make(unit, fn, s.line, WarningKind::NPD, "npd.deref"));
        }
      }
    }
  }
  return out;
}

std::vector<Warning> detect_all(const minic::TranslationUnit& unit) {
  auto out = detect_bo(unit);
  auto npd = detect_npd(unit);
  out.insert(out.end(), npd.begin(), npd.end());
  std::stable_sort(out.begin(), out.end(), [](const Warning& a, const Warning& b) {
    return std::tie(a.line, a.kind, a.detector) < std::tie(b.line, b.kind, b.detector);
  });
  return out;
}

}  // namespace warnrank::warnings
