#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sympref/minilang/typecheck.hpp"
#include "sympref/support/diag.hpp"

namespace sympref::minilang {

// Direction a condition evaluation took; the unit of branch traces and
// CFG edge labels.
enum class BranchDir : std::uint8_t { True, False };

inline constexpr std::int64_t kDefaultFuel = 100000;

struct RunResult {
  ExecOutcome outcome = ExecOutcome::error(RuntimeErrorKind::NoReturn);
  std::vector<BranchDir> trace;  // one entry per if/while condition evaluation
};

namespace detail {

// Arithmetic helpers shared by the interpreter and the solver's concrete
// evaluator. Overflow is an error, not wraparound.
inline std::optional<std::int64_t> checked_arith(BinOp op, std::int64_t a, std::int64_t b,
                                                 RuntimeErrorKind& err) {
  std::int64_t r = 0;
  switch (op) {
    case BinOp::Add:
      if (__builtin_add_overflow(a, b, &r)) { err = RuntimeErrorKind::Overflow; return std::nullopt; }
      return r;
    case BinOp::Sub:
      if (__builtin_sub_overflow(a, b, &r)) { err = RuntimeErrorKind::Overflow; return std::nullopt; }
      return r;
    case BinOp::Mul:
      if (__builtin_mul_overflow(a, b, &r)) { err = RuntimeErrorKind::Overflow; return std::nullopt; }
      return r;
    case BinOp::Div:
      if (b == 0) { err = RuntimeErrorKind::DivByZero; return std::nullopt; }
      if (a == INT64_MIN && b == -1) { err = RuntimeErrorKind::Overflow; return std::nullopt; }
      return a / b;
    case BinOp::Mod:
      if (b == 0) { err = RuntimeErrorKind::ModByZero; return std::nullopt; }
      if (a == INT64_MIN && b == -1) { err = RuntimeErrorKind::Overflow; return std::nullopt; }
      return a % b;
    default: return std::nullopt;
  }
}

class Interp {
 public:
  Interp(const TypedProgram& prog, std::int64_t fuel, std::vector<BranchDir>* trace)
      : prog_(prog), fuel_(fuel), trace_(trace) {}

  ExecOutcome run(const std::vector<Value>& input) {
    const auto& params = prog_.program.params;
    if (input.size() != params.size())
      throw DomainError("input arity does not match signature");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (input[i].type() != *params[i].type)
        throw DomainError("input kind does not match parameter '" + params[i].name + "'");
      env_.emplace_back(params[i].name, input[i]);
    }
    auto out = exec_block(prog_.program.body);
    if (out) return *out;
    return ExecOutcome::error(RuntimeErrorKind::NoReturn);
  }

 private:
  std::optional<ExecOutcome> exec_block(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
      if (auto out = exec_stmt(s)) return out;
    }
    return std::nullopt;
  }

  bool spend_fuel() { return --fuel_ >= 0; }

  std::optional<ExecOutcome> exec_stmt(const Stmt& s) {
    if (!spend_fuel()) return ExecOutcome::error(RuntimeErrorKind::FuelExceeded);
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      auto v = eval(a->value);
      if (!v) return ExecOutcome::error(err_);
      set_var(a->target, *v);
      return std::nullopt;
    }
    if (const auto* i = std::get_if<If>(&s.node)) {
      auto c = eval(i->cond);
      if (!c) return ExecOutcome::error(err_);
      const bool taken = c->as_bool();
      if (trace_) trace_->push_back(taken ? BranchDir::True : BranchDir::False);
      return exec_block(taken ? i->then_body : i->else_body);
    }
    if (const auto* w = std::get_if<While>(&s.node)) {
      while (true) {
        auto c = eval(w->cond);
        if (!c) return ExecOutcome::error(err_);
        const bool taken = c->as_bool();
        if (trace_) trace_->push_back(taken ? BranchDir::True : BranchDir::False);
        if (!taken) return std::nullopt;
        if (auto out = exec_block(w->body)) return out;
        if (!spend_fuel()) return ExecOutcome::error(RuntimeErrorKind::FuelExceeded);
      }
    }
    auto v = eval(std::get<Return>(s.node).value);
    if (!v) return ExecOutcome::error(err_);
    return ExecOutcome::returned(*v);
  }

  void set_var(const std::string& name, Value v) {
    for (auto& [n, slot] : env_)
      if (n == name) {
        slot = v;
        return;
      }
    env_.emplace_back(name, v);
  }

  const Value* get_var(const std::string& name) const {
    for (const auto& [n, slot] : env_)
      if (n == name) return &slot;
    return nullptr;
  }

  // Both operands of and/or are evaluated: MiniLang logic is strict, not
  // short-circuiting, so errors in either operand always surface.
  std::optional<Value> eval(const ExprPtr& e) {
    if (const auto* lit = std::get_if<IntLit>(&e->node)) return Value::of_int(lit->value);
    if (const auto* lit = std::get_if<BoolLit>(&e->node)) return Value::of_bool(lit->value);
    if (const auto* v = std::get_if<Var>(&e->node)) {
      const Value* slot = get_var(v->name);
      if (!slot) {
        err_ = RuntimeErrorKind::NoReturn;  // unreachable on typechecked programs
        return std::nullopt;
      }
      return *slot;
    }
    if (const auto* u = std::get_if<Unary>(&e->node)) {
      auto operand = eval(u->operand);
      if (!operand) return std::nullopt;
      if (u->op == UnOp::Not) return Value::of_bool(!operand->as_bool());
      if (operand->as_int() == INT64_MIN) {
        err_ = RuntimeErrorKind::Overflow;
        return std::nullopt;
      }
      return Value::of_int(-operand->as_int());
    }
    const auto& b = std::get<Binary>(e->node);
    auto lhs = eval(b.lhs);
    if (!lhs) return std::nullopt;
    auto rhs = eval(b.rhs);
    if (!rhs) return std::nullopt;
    if (is_arith(b.op)) {
      auto r = checked_arith(b.op, lhs->as_int(), rhs->as_int(), err_);
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

  const TypedProgram& prog_;
  std::int64_t fuel_;
  std::vector<BranchDir>* trace_;
  std::vector<std::pair<std::string, Value>> env_;
  RuntimeErrorKind err_ = RuntimeErrorKind::NoReturn;
};

}  // namespace detail

// Executes the program on a concrete input under a statement-step budget.
// Every statement costs one step; each loop iteration re-charges its header.
inline ExecOutcome run(const TypedProgram& prog, const std::vector<Value>& input,
                       std::int64_t fuel = kDefaultFuel) {
  return detail::Interp(prog, fuel, nullptr).run(input);
}

// Same as run() but also records the direction of every condition evaluation.
inline RunResult run_traced(const TypedProgram& prog, const std::vector<Value>& input,
                            std::int64_t fuel = kDefaultFuel) {
  RunResult result;
  detail::Interp interp(prog, fuel, &result.trace);
  result.outcome = interp.run(input);
  return result;
}

}  // namespace sympref::minilang
