#include "minic/parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "minic/cfg.hpp"
#include "minic/library.hpp"
#include "util/error.hpp"

namespace warnrank::minic {

namespace {

bool is_type_word(const LexToken& t) {
  static const std::unordered_set<std::string> kWords = {"int",      "char",   "void",  "long",  "short",
                                                         "unsigned", "signed", "const", "static"};
  return t.kind == TokenKind::Keyword && kWords.count(t.text) > 0;
}

struct Effects {
  std::set<std::string> defs, uses, derefs;
  std::vector<std::string> callees;
  std::vector<int> call_arity;
  std::vector<PointerAssign> pointer_assigns;
};

template <typename C>
std::vector<std::string> to_sorted(const C& c) {
  std::vector<std::string> v(c.begin(), c.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

class Parser {
 public:
  Parser(const std::vector<LexToken>& tokens, std::string source_id) : toks_(tokens) {
    unit_.source_id = std::move(source_id);
  }

  TranslationUnit run() {
    while (!at_end()) parse_top_level();
    for (const auto& fn : unit_.functions) build_cfg(fn);  // rejects unreachable code
    return std::move(unit_);
  }

 private:
  // ---- token cursor -------------------------------------------------------

  bool at_end() const { return pos_ >= toks_.size(); }

  const LexToken& peek(std::size_t ahead = 0) const {
    static const LexToken kEof{TokenKind::Punctuation, "<eof>", 0, 0, false};
    if (pos_ + ahead >= toks_.size()) {
      if (toks_.empty()) return kEof;
      eof_ = toks_.back();
      eof_.text = "<eof>";
      return eof_;
    }
    return toks_[pos_ + ahead];
  }

  [[noreturn]] void fail(const std::string& expected) const {
    const LexToken& t = peek();
    throw ParseError(unit_.source_id + ":" + std::to_string(t.line) + ":" + std::to_string(t.col) +
                     ": expected " + expected + ", found '" + t.text + "'");
  }

  const LexToken& take() {
    if (at_end()) fail("more input");
    return toks_[pos_++];
  }

  void expect_punct(std::string_view p) {
    if (!peek().is_punct(p)) fail("'" + std::string(p) + "'");
    ++pos_;
  }

  bool accept_punct(std::string_view p) {
    if (peek().is_punct(p)) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string expect_ident() {
    if (peek().kind != TokenKind::Identifier) fail("identifier");
    return take().text;
  }

  // ---- scopes -------------------------------------------------------------

  const VarInfo* lookup(const std::string& name) const {
    if (auto it = locals_.find(name); it != locals_.end()) return &it->second;
    if (auto it = globals_.find(name); it != globals_.end()) return &it->second;
    return nullptr;
  }

  std::string resolve_pointer(const std::string& name) const {
    const VarInfo* v = lookup(name);
    if (v && v->pointer_depth > 0 && !v->is_array) {
      if (auto it = alias_.find(name); it != alias_.end()) return it->second;
    }
    return name;
  }

  // ---- top level ----------------------------------------------------------

  TypeSpec parse_type_words() {
    TypeSpec t;
    while (!at_end() && is_type_word(peek())) t.words.push_back(take().text);
    if (t.words.empty()) fail("type specifier");
    return t;
  }

  int parse_stars() {
    int n = 0;
    while (peek().is_op("*")) {
      ++pos_;
      ++n;
    }
    return n;
  }

  void parse_top_level() {
    const std::size_t start = pos_;
    TypeSpec type = parse_type_words();
    const int stars = parse_stars();
    const LexToken& name_tok = peek();
    std::string name = expect_ident();
    if (peek().is_punct("(")) {
      type.pointer_depth = stars;
      parse_function(std::move(type), std::move(name), name_tok.line);
      return;
    }
    // Global declaration: rewind and parse as a declaration statement.
    pos_ = start;
    in_function_ = false;
    GlobalDecl g;
    g.stmt.id = static_cast<StmtId>(unit_.globals.size());
    g.decl = parse_decl_stmt(&g.stmt);
    unit_.globals.push_back(std::move(g));
  }

  void parse_function(TypeSpec ret, std::string name, int line) {
    for (const auto& f : unit_.functions) {
      if (f.name == name) throw ParseError(unit_.source_id + ":" + std::to_string(line) + ": duplicate function '" + name + "'");
    }
    if (globals_.count(name)) throw ParseError(unit_.source_id + ": '" + name + "' redeclared as function");
    FunctionAst fn;
    fn.name = std::move(name);
    fn.return_type = std::move(ret);
    fn.line = line;
    locals_.clear();
    alias_.clear();
    expect_punct("(");
    if (peek().is_keyword("void") && peek(1).is_punct(")")) {
      ++pos_;
    } else if (!peek().is_punct(")")) {
      do {
        Param p;
        p.type = parse_type_words();
        p.type.pointer_depth = parse_stars();
        p.name = expect_ident();
        if (accept_punct("[")) {
          expect_punct("]");
          p.is_array = true;
        }
        if (locals_.count(p.name)) fail("distinct parameter name");
        locals_[p.name] = VarInfo{p.name, p.type.pointer_depth + (p.is_array ? 1 : 0), false, true, false};
        fn.params.push_back(std::move(p));
      } while (accept_punct(","));
    }
    expect_punct(")");
    current_ = &fn;
    in_function_ = true;
    expect_punct("{");
    while (!peek().is_punct("}")) {
      if (at_end()) fail("'}'");
      fn.body.push_back(parse_stmt(/*transparent_block=*/false));
    }
    expect_punct("}");
    in_function_ = false;
    current_ = nullptr;
    unit_.functions.push_back(std::move(fn));
  }

  // ---- statements ---------------------------------------------------------

  StmtId open_stmt(StmtKind kind) {
    Stmt s;
    s.id = static_cast<StmtId>(current_->stmts.size());
    s.kind = kind;
    s.line = peek().line;
    current_->stmts.push_back(std::move(s));
    return current_->stmts.back().id;
  }

  void close_stmt(Stmt& s, std::size_t tok_begin, std::size_t tok_end, Effects fx) {
    s.line = toks_[tok_begin].line;
    s.tokens.assign(toks_.begin() + static_cast<std::ptrdiff_t>(tok_begin),
                    toks_.begin() + static_cast<std::ptrdiff_t>(tok_end));
    s.roles = identifier_roles(s.tokens);
    s.defs = to_sorted(fx.defs);
    s.uses = to_sorted(fx.uses);
    s.derefs = to_sorted(fx.derefs);
    s.callees = std::move(fx.callees);
    s.call_arity = std::move(fx.call_arity);
    s.pointer_assigns = std::move(fx.pointer_assigns);
  }

  Stmt& flat(StmtId id) { return current_->stmts[static_cast<std::size_t>(id)]; }

  AstStmt parse_stmt(bool transparent_block) {
    const LexToken& t = peek();
    if (t.is_punct("{")) return parse_block(transparent_block);
    if (t.is_keyword("if")) return parse_if();
    if (t.is_keyword("while")) return parse_while();
    if (t.is_keyword("for")) return parse_for();
    if (t.is_keyword("return")) return parse_return();
    if (is_type_word(t)) {
      const StmtId id = open_stmt(StmtKind::Decl);
      AstStmt s = parse_decl_stmt(&flat(id));
      s.id = id;
      return s;
    }
    if (t.is_keyword("else")) fail("statement ('else' without 'if')");
    if (t.kind == TokenKind::Keyword && t.text != "NULL") fail("statement (unsupported keyword '" + t.text + "')");
    if (t.is_punct(";")) fail("statement (empty statements are not supported)");
    return parse_expr_stmt();
  }

  // A block body; bare nested blocks become BlockEnter statements.
  AstStmt parse_block(bool transparent) {
    AstStmt s;
    s.kind = AstStmt::Kind::Block;
    if (!transparent) {
      const std::size_t b = pos_;
      s.id = open_stmt(StmtKind::BlockEnter);
      close_stmt(flat(s.id), b, b + 1, {});
    }
    expect_punct("{");
    while (!peek().is_punct("}")) {
      if (at_end()) fail("'}'");
      s.body.push_back(parse_stmt(false));
    }
    expect_punct("}");
    return s;
  }

  // Bodies of if/else/while/for are normalized to transparent blocks.
  AstStmt parse_body() {
    if (peek().is_punct("{")) return parse_block(/*transparent=*/true);
    AstStmt wrap;
    wrap.kind = AstStmt::Kind::Block;
    wrap.body.push_back(parse_stmt(false));
    return wrap;
  }

  AstStmt parse_if() {
    AstStmt s;
    s.kind = AstStmt::Kind::If;
    const std::size_t b = pos_;
    s.id = open_stmt(StmtKind::IfCond);
    ++pos_;
    expect_punct("(");
    Effects fx;
    s.expr = parse_expr();
    analyze(*s.expr, fx);
    expect_punct(")");
    close_stmt(flat(s.id), b, pos_, std::move(fx));
    s.body.push_back(parse_body());
    if (peek().is_keyword("else")) {
      ++pos_;
      s.else_body.push_back(parse_body());
    }
    return s;
  }

  AstStmt parse_while() {
    AstStmt s;
    s.kind = AstStmt::Kind::While;
    const std::size_t b = pos_;
    s.id = open_stmt(StmtKind::WhileCond);
    ++pos_;
    expect_punct("(");
    Effects fx;
    s.expr = parse_expr();
    analyze(*s.expr, fx);
    expect_punct(")");
    close_stmt(flat(s.id), b, pos_, std::move(fx));
    s.body.push_back(parse_body());
    return s;
  }

  AstStmt parse_for() {
    AstStmt s;
    s.kind = AstStmt::Kind::For;
    const std::size_t b = pos_;
    s.id = open_stmt(StmtKind::ForHeader);
    ++pos_;
    expect_punct("(");
    Effects fx;
    if (!peek().is_punct(";")) {
      if (is_type_word(peek())) fail("expression (declarations in for-init are not supported)");
      s.init = parse_expr();
      analyze(*s.init, fx);
    }
    expect_punct(";");
    if (!peek().is_punct(";")) {
      s.expr = parse_expr();
      analyze(*s.expr, fx);
    }
    expect_punct(";");
    if (!peek().is_punct(")")) {
      s.step = parse_expr();
      analyze(*s.step, fx);
    }
    expect_punct(")");
    close_stmt(flat(s.id), b, pos_, std::move(fx));
    s.body.push_back(parse_body());
    return s;
  }

  AstStmt parse_return() {
    AstStmt s;
    s.kind = AstStmt::Kind::Return;
    const std::size_t b = pos_;
    s.id = open_stmt(StmtKind::Return);
    ++pos_;
    Effects fx;
    if (!peek().is_punct(";")) {
      s.expr = parse_expr();
      analyze(*s.expr, fx);
    }
    expect_punct(";");
    close_stmt(flat(s.id), b, pos_, std::move(fx));
    return s;
  }

  AstStmt parse_expr_stmt() {
    AstStmt s;
    s.kind = AstStmt::Kind::Expr;
    const std::size_t b = pos_;
    s.id = open_stmt(StmtKind::Assign);
    Effects fx;
    s.expr = parse_expr();
    analyze(*s.expr, fx);
    expect_punct(";");
    Stmt& st = flat(s.id);
    const auto k = s.expr->kind;
    if (k == Expr::Kind::Assign || k == Expr::Kind::PostIncDec ||
        (k == Expr::Kind::Unary && (s.expr->text == "++" || s.expr->text == "--"))) {
      st.kind = StmtKind::Assign;
    } else if (!fx.callees.empty()) {
      st.kind = StmtKind::Call;
    }
    close_stmt(st, b, pos_, std::move(fx));
    return s;
  }

  // Parses "type declarator (, declarator)* ;" and fills `out` (flat form).
  AstStmt parse_decl_stmt(Stmt* out) {
    AstStmt s;
    s.kind = AstStmt::Kind::Decl;
    s.id = out->id;
    const std::size_t b = pos_;
    s.type = parse_type_words();
    Effects fx;
    do {
      Declarator d;
      d.pointer_depth = parse_stars();
      const LexToken& name_tok = peek();
      d.name = expect_ident();
      if (accept_punct("[")) {
        d.is_array = true;
        if (!peek().is_punct("]")) {
          d.array_size = parse_expr();
          analyze(*d.array_size, fx);
        }
        expect_punct("]");
      }
      if (peek().is_op("=")) {
        ++pos_;
        d.init = parse_assign();
        analyze(*d.init, fx);
      }
      if (!in_function_ && unit_.find_function(d.name)) {
        throw ParseError(unit_.source_id + ":" + std::to_string(name_tok.line) + ": '" + d.name +
                         "' redeclared as variable");
      }
      VarInfo v{d.name, d.pointer_depth, d.is_array, false, !in_function_};
      if (in_function_) {
        locals_[d.name] = v;
      } else {
        globals_[d.name] = v;
      }
      fx.defs.insert(d.name);
      if (d.init) note_pointer_assign(d.name, *d.init, fx);
      s.decls.push_back(std::move(d));
    } while (accept_punct(","));
    expect_punct(";");
    out->kind = StmtKind::Decl;
    close_stmt(*out, b, pos_, std::move(fx));
    return s;
  }

  // ---- expressions --------------------------------------------------------

  static int binary_prec(const LexToken& t) {
    if (t.kind != TokenKind::Operator) return -1;
    const std::string& o = t.text;
    if (o == "||") return 2;
    if (o == "&&") return 3;
    if (o == "==" || o == "!=") return 4;
    if (o == "<" || o == ">" || o == "<=" || o == ">=") return 5;
    if (o == "+" || o == "-") return 6;
    if (o == "*" || o == "/" || o == "%") return 7;
    return -1;
  }

  static bool is_assign_op(const LexToken& t) {
    return t.kind == TokenKind::Operator &&
           (t.text == "=" || t.text == "+=" || t.text == "-=" || t.text == "*=" || t.text == "/=" || t.text == "%=");
  }

  Expr parse_expr() { return parse_assign(); }

  Expr parse_assign() {
    Expr lhs = parse_binary(2);
    if (is_assign_op(peek())) {
      const std::string op = take().text;
      if (!is_lvalue(lhs)) fail("assignable expression before '" + op + "'");
      Expr rhs = parse_assign();
      return Expr{Expr::Kind::Assign, op, {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  static bool is_lvalue(const Expr& e) {
    return e.kind == Expr::Kind::Ident || e.kind == Expr::Kind::Index ||
           (e.kind == Expr::Kind::Unary && e.text == "*");
  }

  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    for (;;) {
      const int p = binary_prec(peek());
      if (p < min_prec) return lhs;
      const std::string op = take().text;
      Expr rhs = parse_binary(p + 1);
      lhs = Expr{Expr::Kind::Binary, op, {std::move(lhs), std::move(rhs)}};
    }
  }

  Expr parse_unary() {
    const LexToken& t = peek();
    if (t.kind == TokenKind::Operator &&
        (t.text == "!" || t.text == "-" || t.text == "*" || t.text == "&" || t.text == "++" || t.text == "--")) {
      const std::string op = take().text;
      Expr kid = parse_unary();
      if ((op == "++" || op == "--" || op == "&") && !is_lvalue(kid)) fail("assignable operand for '" + op + "'");
      return Expr{Expr::Kind::Unary, op, {std::move(kid)}};
    }
    return parse_postfix();
  }

  Expr parse_postfix() {
    Expr e = parse_primary();
    for (;;) {
      if (peek().is_punct("[")) {
        ++pos_;
        Expr idx = parse_expr();
        expect_punct("]");
        e = Expr{Expr::Kind::Index, "", {std::move(e), std::move(idx)}};
      } else if (peek().is_op("++") || peek().is_op("--")) {
        if (!is_lvalue(e)) fail("assignable operand for postfix operator");
        e = Expr{Expr::Kind::PostIncDec, take().text, {std::move(e)}};
      } else {
        return e;
      }
    }
  }

  Expr parse_primary() {
    const LexToken& t = peek();
    switch (t.kind) {
      case TokenKind::Number: return Expr{Expr::Kind::Number, take().text, {}};
      case TokenKind::String: return Expr{Expr::Kind::String, take().text, {}};
      case TokenKind::Char: return Expr{Expr::Kind::Char, take().text, {}};
      case TokenKind::Keyword:
        if (t.text == "NULL") {
          ++pos_;
          return Expr{Expr::Kind::Null, "NULL", {}};
        }
        fail("expression");
      case TokenKind::Identifier: {
        if (peek(1).is_punct("(")) {
          std::string name = take().text;
          if (lookup(name)) fail("function name ('" + name + "' is a variable)");
          ++pos_;
          Expr call{Expr::Kind::Call, std::move(name), {}};
          if (!peek().is_punct(")")) {
            do {
              call.kids.push_back(parse_assign());
            } while (accept_punct(","));
          }
          expect_punct(")");
          return call;
        }
        if (!lookup(t.text)) fail("declared identifier ('" + t.text + "' is undeclared)");
        return Expr{Expr::Kind::Ident, take().text, {}};
      }
      case TokenKind::Punctuation:
        if (t.text == "(") {
          ++pos_;
          Expr e = parse_expr();
          expect_punct(")");
          return e;
        }
        fail("expression");
      case TokenKind::Operator: fail("expression");
    }
    fail("expression");
  }

  // ---- def/use analysis ---------------------------------------------------

  // The variable an lvalue-ish expression is rooted at, or "".
  static std::string root_var(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Ident: return e.text;
      case Expr::Kind::Index:
      case Expr::Kind::PostIncDec: return root_var(e.kids[0]);
      case Expr::Kind::Unary:
        if (e.text == "*" || e.text == "&" || e.text == "++" || e.text == "--") return root_var(e.kids[0]);
        return {};
      case Expr::Kind::Binary:
        if (e.text == "+" || e.text == "-") return root_var(e.kids[0]);
        return {};
      case Expr::Kind::Assign: return root_var(e.kids[0]);
      default: return {};
    }
  }

  bool is_pointer_var(const std::string& name) const {
    const VarInfo* v = lookup(name);
    return v && v->pointer_depth > 0 && !v->is_array;
  }

  bool is_array_var(const std::string& name) const {
    const VarInfo* v = lookup(name);
    return v && v->is_array;
  }

  // Write through a pointer or into an array element: the target keeps its
  // other contents, so it is both used and defined.
  void partial_write(const std::string& base, Effects& fx) {
    if (base.empty()) return;
    if (is_pointer_var(base)) {
      fx.derefs.insert(base);
      fx.uses.insert(base);
    }
    const std::string target = resolve_pointer(base);
    fx.defs.insert(target);
    fx.uses.insert(target);
  }

  void analyze_store(const Expr& lhs, Effects& fx, bool compound) {
    switch (lhs.kind) {
      case Expr::Kind::Ident:
        fx.defs.insert(lhs.text);
        if (compound) fx.uses.insert(lhs.text);
        return;
      case Expr::Kind::Index:
        analyze(lhs.kids[1], fx);
        analyze_address(lhs.kids[0], fx);
        partial_write(root_var(lhs.kids[0]), fx);
        return;
      case Expr::Kind::Unary:  // '*'
        analyze_address(lhs.kids[0], fx);
        partial_write(root_var(lhs.kids[0]), fx);
        return;
      default:
        throw ParseError(unit_.source_id + ": invalid assignment target");
    }
  }

  // Reads performed while computing an address (not the pointee).
  void analyze_address(const Expr& e, Effects& fx) {
    if (e.kind == Expr::Kind::Ident) {
      if (!is_array_var(e.text)) fx.uses.insert(e.text);
      return;
    }
    analyze(e, fx);
  }

  void note_pointer_assign(const std::string& var, const Expr& rhs, Effects& fx) {
    const VarInfo* v = lookup(var);
    if (!v || v->pointer_depth == 0 || v->is_array) return;
    ValueOrigin origin = ValueOrigin::Other;
    if (rhs.kind == Expr::Kind::Null) {
      origin = ValueOrigin::NullLiteral;
    } else if (rhs.kind == Expr::Kind::Number && rhs.text == "0") {
      origin = ValueOrigin::NullLiteral;
    } else if (rhs.kind == Expr::Kind::Call) {
      const LibraryEffect* eff = find_library_effect(rhs.text);
      if (eff && eff->allocates) origin = ValueOrigin::Malloc;
    } else if (rhs.kind == Expr::Kind::Unary && rhs.text == "&") {
      origin = ValueOrigin::AddressOf;
    }
    fx.pointer_assigns.push_back({var, origin});

    // Syntactic alias tracking for writes through the pointer.
    if (rhs.kind == Expr::Kind::Unary && rhs.text == "&") {
      const std::string target = root_var(rhs.kids[0]);
      if (!target.empty()) {
        alias_[var] = target;
        return;
      }
    }
    if (rhs.kind == Expr::Kind::Ident) {
      if (is_array_var(rhs.text)) {
        alias_[var] = rhs.text;
        return;
      }
      if (auto it = alias_.find(rhs.text); it != alias_.end()) {
        alias_[var] = it->second;
        return;
      }
    }
    alias_.erase(var);
  }

  void analyze(const Expr& e, Effects& fx) {
    switch (e.kind) {
      case Expr::Kind::Ident: fx.uses.insert(e.text); return;
      case Expr::Kind::Number:
      case Expr::Kind::String:
      case Expr::Kind::Char:
      case Expr::Kind::Null: return;
      case Expr::Kind::Unary:
        if (e.text == "++" || e.text == "--") {
          analyze_store(e.kids[0], fx, true);
        } else if (e.text == "*") {
          analyze(e.kids[0], fx);
          const std::string base = root_var(e.kids[0]);
          if (!base.empty() && is_pointer_var(base)) {
            fx.derefs.insert(base);
            fx.uses.insert(resolve_pointer(base));
          }
        } else {
          analyze(e.kids[0], fx);
        }
        return;
      case Expr::Kind::PostIncDec: analyze_store(e.kids[0], fx, true); return;
      case Expr::Kind::Binary:
        analyze(e.kids[0], fx);
        analyze(e.kids[1], fx);
        return;
      case Expr::Kind::Index: {
        analyze(e.kids[0], fx);
        analyze(e.kids[1], fx);
        const std::string base = root_var(e.kids[0]);
        if (!base.empty() && is_pointer_var(base)) {
          fx.derefs.insert(base);
          fx.uses.insert(resolve_pointer(base));
        }
        return;
      }
      case Expr::Kind::Assign:
        analyze(e.kids[1], fx);
        analyze_store(e.kids[0], fx, e.text != "=");
        if (e.kids[0].kind == Expr::Kind::Ident && e.text == "=") note_pointer_assign(e.kids[0].text, e.kids[1], fx);
        return;
      case Expr::Kind::Call: {
        fx.callees.push_back(e.text);
        fx.call_arity.push_back(static_cast<int>(e.kids.size()));
        for (const auto& a : e.kids) analyze(a, fx);
        if (const LibraryEffect* eff = find_library_effect(e.text)) {
          for (int k : eff->def_args) {
            if (static_cast<std::size_t>(k) >= e.kids.size()) continue;
            const std::string base = root_var(e.kids[static_cast<std::size_t>(k)]);
            if (!base.empty() && lookup(base)) fx.defs.insert(resolve_pointer(base));
          }
        }
        return;
      }
    }
  }

  const std::vector<LexToken>& toks_;
  std::size_t pos_ = 0;
  mutable LexToken eof_;
  TranslationUnit unit_;
  FunctionAst* current_ = nullptr;
  bool in_function_ = false;
  std::map<std::string, VarInfo> locals_;
  std::map<std::string, VarInfo> globals_;
  std::map<std::string, std::string> alias_;
};

}  // namespace

TranslationUnit parse(const std::vector<LexToken>& tokens, std::string source_id) {
  return Parser(tokens, std::move(source_id)).run();
}

TranslationUnit parse_source(std::string_view source, std::string source_id) {
  return parse(lex(source), std::move(source_id));
}

}  // namespace warnrank::minic
