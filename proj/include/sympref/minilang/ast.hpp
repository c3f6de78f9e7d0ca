#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sympref/support/diag.hpp"

namespace sympref::minilang {

enum class Ty { Int, Bool };

inline const char* ty_name(Ty t) { return t == Ty::Int ? "int" : "bool"; }

// Runtime value. MiniLang has exactly two kinds: 64-bit signed integers and booleans.
class Value {
 public:
  Value() : data_(std::int64_t{0}) {}
  static Value of_int(std::int64_t v) { return Value(v); }
  static Value of_bool(bool v) { return Value(v); }

  bool is_int() const { return std::holds_alternative<std::int64_t>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  Ty type() const { return is_int() ? Ty::Int : Ty::Bool; }

  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }

  std::string to_string() const {
    if (is_int()) return std::to_string(as_int());
    return as_bool() ? "true" : "false";
  }

  friend bool operator==(const Value&, const Value&) = default;

 private:
  explicit Value(std::int64_t v) : data_(v) {}
  explicit Value(bool v) : data_(v) {}
  std::variant<std::int64_t, bool> data_;
};

enum class UnOp { Neg, Not };

enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

inline const char* un_op_text(UnOp op) { return op == UnOp::Neg ? "-" : "not"; }

inline const char* bin_op_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

inline bool is_arith(BinOp op) { return op <= BinOp::Mod; }
inline bool is_compare(BinOp op) { return op >= BinOp::Lt && op <= BinOp::Ne; }
inline bool is_logic(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct IntLit {
  std::int64_t value = 0;
};
struct BoolLit {
  bool value = false;
};
struct Var {
  std::string name;
};
struct Unary {
  UnOp op;
  ExprPtr operand;
};
struct Binary {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  std::variant<IntLit, BoolLit, Var, Unary, Binary> node;
  Span span;
};

inline ExprPtr make_int(std::int64_t v, Span s = {}) {
  return std::make_shared<Expr>(Expr{IntLit{v}, s});
}
inline ExprPtr make_bool(bool v, Span s = {}) {
  return std::make_shared<Expr>(Expr{BoolLit{v}, s});
}
inline ExprPtr make_var(std::string name, Span s = {}) {
  return std::make_shared<Expr>(Expr{Var{std::move(name)}, s});
}
inline ExprPtr make_unary(UnOp op, ExprPtr operand, Span s = {}) {
  return std::make_shared<Expr>(Expr{Unary{op, std::move(operand)}, s});
}
inline ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, Span s = {}) {
  return std::make_shared<Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}, s});
}

struct Stmt;

struct Assign {
  std::string target;
  ExprPtr value;
};
struct If {
  ExprPtr cond;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
};
struct While {
  ExprPtr cond;
  std::vector<Stmt> body;
};
struct Return {
  ExprPtr value;
};

struct Stmt {
  std::variant<Assign, If, While, Return> node;
  Span span;
};

struct Param {
  std::string name;
  std::optional<Ty> type;  // absent until annotated or inferred
};

// One standalone function. The whole program is exactly one of these.
struct Program {
  std::string name;
  std::vector<Param> params;
  std::vector<Stmt> body;
  Span source_span;
};

// Structural equality ignoring spans; the parse/pretty-print round-trip contract.
inline bool equal(const ExprPtr& a, const ExprPtr& b);
inline bool equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b);

inline bool equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = std::get_if<Assign>(&a.node)) {
    const auto& y = std::get<Assign>(b.node);
    return x->target == y.target && equal(x->value, y.value);
  }
  if (const auto* x = std::get_if<If>(&a.node)) {
    const auto& y = std::get<If>(b.node);
    return equal(x->cond, y.cond) && equal(x->then_body, y.then_body) &&
           equal(x->else_body, y.else_body);
  }
  if (const auto* x = std::get_if<While>(&a.node)) {
    const auto& y = std::get<While>(b.node);
    return equal(x->cond, y.cond) && equal(x->body, y.body);
  }
  const auto& x = std::get<Return>(a.node);
  const auto& y = std::get<Return>(b.node);
  return equal(x.value, y.value);
}

inline bool equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (const auto* x = std::get_if<IntLit>(&a->node))
    return x->value == std::get<IntLit>(b->node).value;
  if (const auto* x = std::get_if<BoolLit>(&a->node))
    return x->value == std::get<BoolLit>(b->node).value;
  if (const auto* x = std::get_if<Var>(&a->node)) return x->name == std::get<Var>(b->node).name;
  if (const auto* x = std::get_if<Unary>(&a->node)) {
    const auto& y = std::get<Unary>(b->node);
    return x->op == y.op && equal(x->operand, y.operand);
  }
  const auto& x = std::get<Binary>(a->node);
  const auto& y = std::get<Binary>(b->node);
  return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
}

inline bool equal(const Program& a, const Program& b) {
  if (a.name != b.name || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type)
      return false;
  }
  return equal(a.body, b.body);
}

enum class RuntimeErrorKind { DivByZero, ModByZero, Overflow, FuelExceeded, NoReturn };

inline const char* runtime_error_name(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::DivByZero: return "DivByZero";
    case RuntimeErrorKind::ModByZero: return "ModByZero";
    case RuntimeErrorKind::Overflow: return "Overflow";
    case RuntimeErrorKind::FuelExceeded: return "FuelExceeded";
    case RuntimeErrorKind::NoReturn: return "NoReturn";
  }
  return "?";
}

// Result of one concrete execution: a value or a runtime error, never both.
class ExecOutcome {
 public:
  static ExecOutcome returned(Value v) { return ExecOutcome(std::move(v)); }
  static ExecOutcome error(RuntimeErrorKind k) { return ExecOutcome(k); }

  bool is_returned() const { return std::holds_alternative<Value>(data_); }
  bool is_error() const { return !is_returned(); }

  const Value& value() const { return std::get<Value>(data_); }
  RuntimeErrorKind error_kind() const { return std::get<RuntimeErrorKind>(data_); }

  std::string to_string() const {
    if (is_returned()) return "Returned(" + value().to_string() + ")";
    return std::string("RuntimeError(") + runtime_error_name(error_kind()) + ")";
  }

  friend bool operator==(const ExecOutcome&, const ExecOutcome&) = default;

 private:
  explicit ExecOutcome(Value v) : data_(std::move(v)) {}
  explicit ExecOutcome(RuntimeErrorKind k) : data_(k) {}
  std::variant<Value, RuntimeErrorKind> data_;
};

}  // namespace sympref::minilang
