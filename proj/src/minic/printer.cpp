#include <sstream>

#include "minic/parser.hpp"

namespace warnrank::minic {

namespace {

int binary_level(const std::string& op) {
  if (op == "||") return 2;
  if (op == "&&") return 3;
  if (op == "==" || op == "!=") return 4;
  if (op == "<" || op == ">" || op == "<=" || op == ">=") return 5;
  if (op == "+" || op == "-") return 6;
  return 7;  // * / %
}

int level(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Assign: return 1;
    case Expr::Kind::Binary: return binary_level(e.text);
    case Expr::Kind::Unary: return 8;
    case Expr::Kind::PostIncDec:
    case Expr::Kind::Call:
    case Expr::Kind::Index: return 9;
    default: return 10;
  }
}

std::string print_at(const Expr& e, int min_level);

std::string print_raw(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Ident:
    case Expr::Kind::Number:
    case Expr::Kind::String:
    case Expr::Kind::Char:
    case Expr::Kind::Null: return e.text;
    case Expr::Kind::Unary: {
      std::string kid = print_at(e.kids[0], 8);
      // Avoid gluing "- -x" into "--x" and similar.
      if (!kid.empty() && kid.front() == e.text.back() && (e.text.back() == '-' || e.text.back() == '+' || e.text.back() == '&')) {
        return e.text + " " + kid;
      }
      return e.text + kid;
    }
    case Expr::Kind::PostIncDec: return print_at(e.kids[0], 9) + e.text;
    case Expr::Kind::Binary: {
      const int p = binary_level(e.text);
      return print_at(e.kids[0], p) + " " + e.text + " " + print_at(e.kids[1], p + 1);
    }
    case Expr::Kind::Assign: return print_at(e.kids[0], 8) + " " + e.text + " " + print_at(e.kids[1], 1);
    case Expr::Kind::Call: {
      std::string s = e.text + "(";
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        if (i) s += ", ";
        s += print_at(e.kids[i], 1);
      }
      return s + ")";
    }
    case Expr::Kind::Index: return print_at(e.kids[0], 9) + "[" + print_at(e.kids[1], 1) + "]";
  }
  return {};
}

std::string print_at(const Expr& e, int min_level) {
  std::string s = print_raw(e);
  if (level(e) < min_level) return "(" + s + ")";
  return s;
}

std::string type_words(const TypeSpec& t) {
  std::string s;
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    if (i) s += ' ';
    s += t.words[i];
  }
  return s;
}

std::string decl_text(const AstStmt& s) {
  std::string out = type_words(s.type) + " ";
  for (std::size_t i = 0; i < s.decls.size(); ++i) {
    const auto& d = s.decls[i];
    if (i) out += ", ";
    out += std::string(static_cast<std::size_t>(d.pointer_depth), '*') + d.name;
    if (d.is_array) out += "[" + (d.array_size ? print_at(*d.array_size, 1) : std::string()) + "]";
    if (d.init) out += " = " + print_at(*d.init, 1);
  }
  return out + ";";
}

class Printer {
 public:
  explicit Printer(std::ostringstream& os) : os_(os) {}

  void stmt(const AstStmt& s, int depth) {
    switch (s.kind) {
      case AstStmt::Kind::Decl: line(depth, decl_text(s)); return;
      case AstStmt::Kind::Expr: line(depth, print_expr(*s.expr) + ";"); return;
      case AstStmt::Kind::Return: line(depth, s.expr ? "return " + print_expr(*s.expr) + ";" : "return;"); return;
      case AstStmt::Kind::If:
        line(depth, "if (" + print_expr(*s.expr) + ") {");
        body(s.body.front(), depth + 1);
        if (!s.else_body.empty()) {
          line(depth, "} else {");
          body(s.else_body.front(), depth + 1);
        }
        line(depth, "}");
        return;
      case AstStmt::Kind::While:
        line(depth, "while (" + print_expr(*s.expr) + ") {");
        body(s.body.front(), depth + 1);
        line(depth, "}");
        return;
      case AstStmt::Kind::For: {
        std::string h = "for (";
        h += s.init ? print_expr(*s.init) : "";
        h += "; ";
        h += s.expr ? print_expr(*s.expr) : "";
        h += "; ";
        h += s.step ? print_expr(*s.step) : "";
        line(depth, h + ") {");
        body(s.body.front(), depth + 1);
        line(depth, "}");
        return;
      }
      case AstStmt::Kind::Block:
        line(depth, "{");
        for (const auto& k : s.body) stmt(k, depth + 1);
        line(depth, "}");
        return;
    }
  }

  // Bodies are always braced; a transparent block contributes its children.
  void body(const AstStmt& s, int depth) {
    if (s.kind == AstStmt::Kind::Block && s.id < 0) {
      for (const auto& k : s.body) stmt(k, depth);
    } else {
      stmt(s, depth);
    }
  }

  void line(int depth, const std::string& text) { os_ << std::string(static_cast<std::size_t>(depth) * 4, ' ') << text << '\n'; }

 private:
  std::ostringstream& os_;
};

}  // namespace

std::string print_expr(const Expr& e) { return print_at(e, 1); }

std::string pretty_print(const TranslationUnit& unit) {
  std::ostringstream os;
  Printer p(os);
  for (const auto& g : unit.globals) p.line(0, decl_text(g.decl));
  for (const auto& f : unit.functions) {
    std::string head = type_words(f.return_type) + " " + std::string(static_cast<std::size_t>(f.return_type.pointer_depth), '*') +
                       f.name + "(";
    if (f.params.empty()) head += "void";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      const auto& prm = f.params[i];
      if (i) head += ", ";
      head += type_words(prm.type) + " " + std::string(static_cast<std::size_t>(prm.type.pointer_depth), '*') + prm.name;
      if (prm.is_array) head += "[]";
    }
    p.line(0, head + ") {");
    for (const auto& s : f.body) p.stmt(s, 1);
    p.line(0, "}");
  }
  return os.str();
}

}  // namespace warnrank::minic
