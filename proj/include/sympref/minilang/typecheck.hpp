#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sympref/minilang/ast.hpp"

namespace sympref::minilang {

// A program that passed the typechecker. Carries the per-expression type
// annotations and the resolved variable table; the AST itself is shared
// with the input program.
struct TypedProgram {
  Program program;
  Ty return_type = Ty::Int;
  std::map<std::string, Ty> var_types;               // params and locals
  std::unordered_map<const Expr*, Ty> expr_types;

  Ty type_of(const ExprPtr& e) const { return expr_types.at(e.get()); }
};

namespace detail {

class Typechecker {
 public:
  Result<TypedProgram> run(Program program) {
    out_.program = std::move(program);
    const Program& prog = out_.program;

    std::set<std::string> defined;
    for (const auto& param : prog.params) {
      if (!param.type)
        return err("parameter '" + param.name + "' lacks a type annotation",
                   prog.source_span);
      if (out_.var_types.count(param.name))
        return err("duplicate parameter '" + param.name + "'", prog.source_span);
      out_.var_types.emplace(param.name, *param.type);
      defined.insert(param.name);
    }

    auto returns = check_block(prog.body, defined);
    if (diag_) return *diag_;
    if (!returns)
      return err("missing return on some control path", prog.source_span);
    out_.return_type = *return_type_;
    return std::move(out_);
  }

 private:
  Diagnostic err(std::string msg, Span span) {
    if (!diag_) diag_ = Diagnostic{Phase::Type, std::move(msg), span};
    return *diag_;
  }

  // Returns true when every control path through the block returns.
  bool check_block(const std::vector<Stmt>& stmts, std::set<std::string>& defined) {
    bool returns = false;
    for (const auto& s : stmts) {
      if (diag_) return false;
      returns = check_stmt(s, defined) || returns;
    }
    return returns;
  }

  bool check_stmt(const Stmt& s, std::set<std::string>& defined) {
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      auto vt = type_expr(a->value, defined);
      if (!vt) return false;
      auto it = out_.var_types.find(a->target);
      if (it == out_.var_types.end()) {
        out_.var_types.emplace(a->target, *vt);
      } else if (it->second != *vt) {
        err("variable '" + a->target + "' was " + ty_name(it->second) +
                ", assigned " + ty_name(*vt),
            s.span);
        return false;
      }
      defined.insert(a->target);
      return false;
    }
    if (const auto* i = std::get_if<If>(&s.node)) {
      auto ct = type_expr(i->cond, defined);
      if (!ct) return false;
      if (*ct != Ty::Bool) {
        err("if condition must be bool", i->cond->span);
        return false;
      }
      std::set<std::string> then_defined = defined;
      std::set<std::string> else_defined = defined;
      const bool then_returns = check_block(i->then_body, then_defined);
      const bool else_returns = check_block(i->else_body, else_defined);
      if (diag_) return false;
      // A variable survives the if only when both arms assign it.
      for (const auto& name : then_defined)
        if (else_defined.count(name)) defined.insert(name);
      return then_returns && else_returns;
    }
    if (const auto* w = std::get_if<While>(&s.node)) {
      auto ct = type_expr(w->cond, defined);
      if (!ct) return false;
      if (*ct != Ty::Bool) {
        err("while condition must be bool", w->cond->span);
        return false;
      }
      std::set<std::string> body_defined = defined;  // body may run zero times
      check_block(w->body, body_defined);
      return false;
    }
    const auto& r = std::get<Return>(s.node);
    auto vt = type_expr(r.value, defined);
    if (!vt) return false;
    if (return_type_ && *return_type_ != *vt) {
      err(std::string("return type mismatch: ") + ty_name(*return_type_) + " vs " +
              ty_name(*vt),
          s.span);
      return false;
    }
    return_type_ = *vt;
    return true;
  }

  std::optional<Ty> type_expr(const ExprPtr& e, const std::set<std::string>& defined) {
    auto record = [&](Ty t) -> std::optional<Ty> {
      out_.expr_types[e.get()] = t;
      return t;
    };
    if (std::holds_alternative<IntLit>(e->node)) return record(Ty::Int);
    if (std::holds_alternative<BoolLit>(e->node)) return record(Ty::Bool);
    if (const auto* v = std::get_if<Var>(&e->node)) {
      if (!defined.count(v->name)) {
        err("undefined variable '" + v->name + "'", e->span);
        return std::nullopt;
      }
      return record(out_.var_types.at(v->name));
    }
    if (const auto* u = std::get_if<Unary>(&e->node)) {
      auto ot = type_expr(u->operand, defined);
      if (!ot) return std::nullopt;
      const Ty want = u->op == UnOp::Neg ? Ty::Int : Ty::Bool;
      if (*ot != want) {
        err(std::string("operand of '") + un_op_text(u->op) + "' must be " + ty_name(want),
            e->span);
        return std::nullopt;
      }
      return record(want);
    }
    const auto& b = std::get<Binary>(e->node);
    auto lt = type_expr(b.lhs, defined);
    if (!lt) return std::nullopt;
    auto rt = type_expr(b.rhs, defined);
    if (!rt) return std::nullopt;
    if (is_arith(b.op)) {
      if (*lt != Ty::Int || *rt != Ty::Int) {
        err(std::string("operands of '") + bin_op_text(b.op) + "' must be int", e->span);
        return std::nullopt;
      }
      return record(Ty::Int);
    }
    if (b.op == BinOp::Eq || b.op == BinOp::Ne) {
      if (*lt != *rt) {
        err(std::string("operands of '") + bin_op_text(b.op) + "' must have equal types",
            e->span);
        return std::nullopt;
      }
      return record(Ty::Bool);
    }
    if (is_compare(b.op)) {
      if (*lt != Ty::Int || *rt != Ty::Int) {
        err(std::string("operands of '") + bin_op_text(b.op) + "' must be int", e->span);
        return std::nullopt;
      }
      return record(Ty::Bool);
    }
    // and / or
    if (*lt != Ty::Bool || *rt != Ty::Bool) {
      err(std::string("operands of '") + bin_op_text(b.op) + "' must be bool", e->span);
      return std::nullopt;
    }
    return record(Ty::Bool);
  }

  TypedProgram out_;
  std::optional<Ty> return_type_;
  std::optional<Diagnostic> diag_;
};

}  // namespace detail

inline Result<TypedProgram> typecheck(Program program) {
  return detail::Typechecker().run(std::move(program));
}

// Fills missing parameter annotations from sample inputs: each parameter gets
// the unique kind consistent with every sample. Tasks without samples are not
// inferable and get a diagnostic, mirroring the upstream task filter.
inline Result<Program> infer_types(Program program,
                                   const std::vector<std::vector<Value>>& samples) {
  if (samples.empty())
    return Diagnostic{Phase::Type, "no sample inputs to infer parameter types from",
                      program.source_span};
  for (const auto& sample : samples) {
    if (sample.size() != program.params.size())
      return Diagnostic{Phase::Type,
                        "sample arity " + std::to_string(sample.size()) +
                            " does not match parameter count " +
                            std::to_string(program.params.size()),
                        program.source_span};
  }
  for (std::size_t i = 0; i < program.params.size(); ++i) {
    auto& param = program.params[i];
    Ty kind = param.type ? *param.type : samples[0][i].type();
    for (const auto& sample : samples) {
      if (sample[i].type() != kind)
        return Diagnostic{Phase::Type,
                          "samples disagree on the kind of parameter '" + param.name + "'",
                          program.source_span};
    }
    param.type = kind;
  }
  return program;
}

}  // namespace sympref::minilang
