#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sympref/cfg.hpp"
#include "sympref/minilang/interp.hpp"

namespace sympref {

namespace sym {

using minilang::BinOp;
using minilang::Ty;
using minilang::UnOp;
using minilang::Value;

struct Expr;
using Ptr = std::shared_ptr<const Expr>;

struct VarRef {
  int param_index = 0;
  Ty type = Ty::Int;
};
struct IntConst {
  std::int64_t value = 0;
};
struct BoolConst {
  bool value = false;
};
struct Unary {
  UnOp op;
  Ptr operand;
};
struct Binary {
  BinOp op;
  Ptr lhs;
  Ptr rhs;
};

// Symbolic value: an expression over the program's parameters. Well-typed by
// construction; no simplification is performed, conditions stay auditable.
struct Expr {
  std::variant<VarRef, IntConst, BoolConst, Unary, Binary> node;
};

inline Ptr var(int param_index, Ty type) {
  return std::make_shared<Expr>(Expr{VarRef{param_index, type}});
}
inline Ptr int_const(std::int64_t v) { return std::make_shared<Expr>(Expr{IntConst{v}}); }
inline Ptr bool_const(bool v) { return std::make_shared<Expr>(Expr{BoolConst{v}}); }
inline Ptr unary(UnOp op, Ptr operand) {
  return std::make_shared<Expr>(Expr{Unary{op, std::move(operand)}});
}
inline Ptr binary(BinOp op, Ptr lhs, Ptr rhs) {
  return std::make_shared<Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

inline Ty type_of(const Ptr& e) {
  if (const auto* v = std::get_if<VarRef>(&e->node)) return v->type;
  if (std::holds_alternative<IntConst>(e->node)) return Ty::Int;
  if (std::holds_alternative<BoolConst>(e->node)) return Ty::Bool;
  if (const auto* u = std::get_if<Unary>(&e->node))
    return u->op == UnOp::Neg ? Ty::Int : Ty::Bool;
  const auto& b = std::get<Binary>(e->node);
  return minilang::is_arith(b.op) ? Ty::Int : Ty::Bool;
}

inline bool equal(const Ptr& a, const Ptr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  if (const auto* x = std::get_if<VarRef>(&a->node))
    return x->param_index == std::get<VarRef>(b->node).param_index;
  if (const auto* x = std::get_if<IntConst>(&a->node))
    return x->value == std::get<IntConst>(b->node).value;
  if (const auto* x = std::get_if<BoolConst>(&a->node))
    return x->value == std::get<BoolConst>(b->node).value;
  if (const auto* x = std::get_if<Unary>(&a->node)) {
    const auto& y = std::get<Unary>(b->node);
    return x->op == y.op && equal(x->operand, y.operand);
  }
  const auto& x = std::get<Binary>(a->node);
  const auto& y = std::get<Binary>(b->node);
  return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
}

inline void collect_vars(const Ptr& e, std::set<int>& out) {
  if (const auto* v = std::get_if<VarRef>(&e->node)) {
    out.insert(v->param_index);
  } else if (const auto* u = std::get_if<Unary>(&e->node)) {
    collect_vars(u->operand, out);
  } else if (const auto* b = std::get_if<Binary>(&e->node)) {
    collect_vars(b->lhs, out);
    collect_vars(b->rhs, out);
  }
}

inline std::string to_string(const Ptr& e) {
  if (const auto* v = std::get_if<VarRef>(&e->node))
    return "p" + std::to_string(v->param_index);
  if (const auto* c = std::get_if<IntConst>(&e->node)) return std::to_string(c->value);
  if (const auto* c = std::get_if<BoolConst>(&e->node)) return c->value ? "true" : "false";
  if (const auto* u = std::get_if<Unary>(&e->node)) {
    if (u->op == UnOp::Neg) return "-" + to_string(u->operand);
    return "not " + to_string(u->operand);
  }
  const auto& b = std::get<Binary>(e->node);
  return "(" + to_string(b.lhs) + " " + minilang::bin_op_text(b.op) + " " +
         to_string(b.rhs) + ")";
}

// Concrete evaluation under a full parameter assignment. Returns nullopt when
// evaluation traps (division by zero, overflow); mirrors interpreter semantics.
inline std::optional<Value> eval(const Ptr& e, const std::vector<Value>& assignment) {
  if (const auto* v = std::get_if<VarRef>(&e->node)) {
    return assignment[static_cast<std::size_t>(v->param_index)];
  }
  if (const auto* c = std::get_if<IntConst>(&e->node)) return Value::of_int(c->value);
  if (const auto* c = std::get_if<BoolConst>(&e->node)) return Value::of_bool(c->value);
  if (const auto* u = std::get_if<Unary>(&e->node)) {
    auto operand = eval(u->operand, assignment);
    if (!operand) return std::nullopt;
    if (u->op == UnOp::Not) return Value::of_bool(!operand->as_bool());
    if (operand->as_int() == INT64_MIN) return std::nullopt;
    return Value::of_int(-operand->as_int());
  }
  const auto& b = std::get<Binary>(e->node);
  auto lhs = eval(b.lhs, assignment);
  if (!lhs) return std::nullopt;
  auto rhs = eval(b.rhs, assignment);
  if (!rhs) return std::nullopt;
  if (minilang::is_arith(b.op)) {
    minilang::RuntimeErrorKind err{};
    auto r = minilang::detail::checked_arith(b.op, lhs->as_int(), rhs->as_int(), err);
    if (!r) return std::nullopt;
    return Value::of_int(*r);
  }
  switch (b.op) {
    case BinOp::Lt: return Value::of_bool(lhs->as_int() < rhs->as_int());
    case BinOp::Le: return Value::of_bool(lhs->as_int() <= rhs->as_int());
    case BinOp::Gt: return Value::of_bool(lhs->as_int() > rhs->as_int());
    case BinOp::Ge: return Value::of_bool(lhs->as_int() >= rhs->as_int());
    case BinOp::Eq: return Value::of_bool(*lhs == *rhs);
    case BinOp::Ne: return Value::of_bool(!(*lhs == *rhs));
    case BinOp::And: return Value::of_bool(lhs->as_bool() && rhs->as_bool());
    case BinOp::Or: return Value::of_bool(lhs->as_bool() || rhs->as_bool());
    default: return std::nullopt;
  }
}

}  // namespace sym

// Conjunction of boolean symbolic values; empty means trivially true.
struct PathCondition {
  std::vector<sym::Ptr> conjuncts;

  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
      if (i) out += ", ";
      out += sym::to_string(conjuncts[i]);
    }
    return out + "]";
  }
};

// True iff every conjunct evaluates to true and none traps. The solver and
// its exhaustive oracle both use this exact predicate.
inline bool satisfies(const PathCondition& cond,
                      const std::vector<minilang::Value>& assignment) {
  for (const auto& c : cond.conjuncts) {
    auto v = sym::eval(c, assignment);
    if (!v || !v->as_bool()) return false;
  }
  return true;
}

namespace detail {

class SymbolicWalker {
 public:
  explicit SymbolicWalker(const minilang::TypedProgram& prog) {
    const auto& params = prog.program.params;
    for (std::size_t i = 0; i < params.size(); ++i)
      env_.emplace(params[i].name, sym::var(static_cast<int>(i), *params[i].type));
  }

  // Evaluates an AST expression to a symbolic value over the parameters.
  // Division and modulo append a divisor-nonzero conjunct before the
  // consuming comparison sees it, so witnesses never trap the ground truth.
  sym::Ptr eval(const minilang::ExprPtr& e, PathCondition& cond) {
    using namespace minilang;
    if (const auto* lit = std::get_if<IntLit>(&e->node)) return sym::int_const(lit->value);
    if (const auto* lit = std::get_if<BoolLit>(&e->node)) return sym::bool_const(lit->value);
    if (const auto* v = std::get_if<Var>(&e->node)) return env_.at(v->name);
    if (const auto* u = std::get_if<Unary>(&e->node))
      return sym::unary(u->op, eval(u->operand, cond));
    const auto& b = std::get<Binary>(e->node);
    sym::Ptr lhs = eval(b.lhs, cond);
    sym::Ptr rhs = eval(b.rhs, cond);
    if (b.op == BinOp::Div || b.op == BinOp::Mod)
      cond.conjuncts.push_back(sym::binary(BinOp::Ne, rhs, sym::int_const(0)));
    return sym::binary(b.op, lhs, rhs);
  }

  void assign(const std::string& name, sym::Ptr value) {
    env_[name] = std::move(value);
  }

 private:
  std::map<std::string, sym::Ptr> env_;
};

}  // namespace detail

// Symbolically executes one enumerated path: assignments substitute into the
// symbolic store, every branch contributes its condition (negated on false
// edges), and the return expression's divisor guards are collected too.
inline PathCondition execute_path(const minilang::TypedProgram& prog, const Cfg& cfg,
                                  const PathDescriptor& path) {
  sympref::detail::SymbolicWalker walker(prog);
  PathCondition cond;
  std::size_t choice = 0;
  for (const int block_id : path.blocks) {
    const BasicBlock& block = cfg.blocks()[static_cast<std::size_t>(block_id)];
    for (const minilang::Stmt* s : block.stmts) {
      const auto& a = std::get<minilang::Assign>(s->node);
      walker.assign(a.target, walker.eval(a.value, cond));
    }
    if (block.term == BasicBlock::Term::Branch) {
      sym::Ptr c = walker.eval(block.cond, cond);
      const BranchDir dir = path.edge_choices[choice++];
      cond.conjuncts.push_back(dir == BranchDir::True ? c
                                                      : sym::unary(minilang::UnOp::Not, c));
    } else if (block.term == BasicBlock::Term::Return) {
      walker.eval(block.return_value, cond);
    }
  }
  return cond;
}

}  // namespace sympref
