#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minic/lexer.hpp"

namespace warnrank::minic {

using StmtId = int;

struct Expr {
  enum class Kind { Ident, Number, String, Char, Null, Unary, PostIncDec, Binary, Assign, Call, Index };

  Kind kind = Kind::Ident;
  // Identifier / literal spelling, operator, or callee name.
  std::string text;
  std::vector<Expr> kids;

  bool operator==(const Expr&) const = default;
};

struct TypeSpec {
  std::vector<std::string> words;  // e.g. {"static", "const", "char"}
  int pointer_depth = 0;

  bool operator==(const TypeSpec&) const = default;
};

struct Declarator {
  std::string name;
  int pointer_depth = 0;
  bool is_array = false;
  std::optional<Expr> array_size;
  std::optional<Expr> init;

  bool operator==(const Declarator&) const = default;
};

// Statement tree. Each node that is a dependence-graph statement carries the
// StmtId of its flat Stmt; transparent blocks (bodies of if/while/for and the
// function body) carry id -1.
struct AstStmt {
  enum class Kind { Decl, Expr, If, While, For, Return, Block };

  Kind kind = Kind::Expr;
  StmtId id = -1;
  TypeSpec type;                      // Decl
  std::vector<Declarator> decls;      // Decl
  std::optional<Expr> expr;           // Expr, If/While condition, For condition, Return value
  std::optional<Expr> init, step;     // For
  std::vector<AstStmt> body;          // Block children; If-then / loop body as a single element
  std::vector<AstStmt> else_body;     // If-else as a single element, or empty

  bool operator==(const AstStmt&) const = default;
};

enum class StmtKind { Decl, Assign, Call, IfCond, WhileCond, ForHeader, Return, BlockEnter };

const char* stmt_kind_name(StmtKind kind) noexcept;

enum class IdentRole { None, Variable, Function, Library };

// Syntactic identifier classes: an identifier followed by "(" is a call
// target (Library when the effects table knows it), any other identifier a
// variable; non-identifiers get None.
std::vector<IdentRole> identifier_roles(const std::vector<LexToken>& tokens);

// How a pointer-typed variable obtained its value at an assignment.
enum class ValueOrigin { Other, NullLiteral, Malloc, AddressOf };

struct PointerAssign {
  std::string var;
  ValueOrigin origin = ValueOrigin::Other;
};

// One dependence-graph node: a simple statement or the header of a compound one.
struct Stmt {
  StmtId id = 0;
  int line = 0;
  StmtKind kind = StmtKind::Assign;
  std::vector<std::string> defs;      // sorted, unique
  std::vector<std::string> uses;      // sorted, unique
  std::vector<std::string> callees;   // one entry per syntactic call site, source order
  std::vector<int> call_arity;        // argument count per entry of `callees`
  std::vector<std::string> derefs;    // pointer variables dereferenced (sorted, unique)
  std::vector<PointerAssign> pointer_assigns;
  std::vector<LexToken> tokens;       // source tokens of the statement (header only for compound)
  std::vector<IdentRole> roles;       // parallel to tokens
};

struct Param {
  TypeSpec type;
  std::string name;
  bool is_array = false;

  bool operator==(const Param&) const = default;
};

struct FunctionAst {
  std::string name;
  TypeSpec return_type;
  std::vector<Param> params;
  std::vector<AstStmt> body;
  std::vector<Stmt> stmts;  // dense StmtIds 0..n-1 in source order
  int line = 0;             // line of the function name
};

struct GlobalDecl {
  AstStmt decl;   // Kind::Decl
  Stmt stmt;      // flat form, id = index in TranslationUnit::globals
};

struct VarInfo {
  std::string name;
  int pointer_depth = 0;
  bool is_array = false;
  bool is_param = false;
  bool is_global = false;

  bool is_pointer_like() const { return pointer_depth > 0 || is_array; }
};

struct TranslationUnit {
  std::string source_id;
  std::vector<GlobalDecl> globals;
  std::vector<FunctionAst> functions;

  const FunctionAst* find_function(std::string_view name) const;
};

// Structural equality: same declarations, statement trees, and flat
// statement facts, ignoring source positions.
bool structurally_equal(const TranslationUnit& a, const TranslationUnit& b);

}  // namespace warnrank::minic
