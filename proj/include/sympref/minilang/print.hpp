#pragma once

#include <string>

#include "sympref/minilang/ast.hpp"

namespace sympref::minilang {

// Canonical source form. Guarantee: parse(pretty_print(parse(s))) is
// structurally equal to parse(s). Parentheses are emitted exactly where the
// child binds looser than its context.
class Printer {
 public:
  static std::string program(const Program& prog) {
    Printer p;
    p.out_ += "fn " + prog.name + "(";
    for (std::size_t i = 0; i < prog.params.size(); ++i) {
      if (i) p.out_ += ", ";
      p.out_ += prog.params[i].name;
      if (prog.params[i].type) p.out_ += std::string(": ") + ty_name(*prog.params[i].type);
    }
    p.out_ += ") {\n";
    p.block(prog.body, 1);
    p.out_ += "}\n";
    return std::move(p.out_);
  }

  static std::string expression(const ExprPtr& e) {
    Printer p;
    p.expr(e, 0);
    return std::move(p.out_);
  }

 private:
  // Binding strength, loosest first. Mirrors the parser's ladder.
  enum Level : int { LOr = 1, LAnd, LNot, LCmp, LAdd, LMul, LNeg, LPrim };

  static int level(const ExprPtr& e) {
    if (const auto* u = std::get_if<Unary>(&e->node))
      return u->op == UnOp::Not ? LNot : LNeg;
    if (const auto* b = std::get_if<Binary>(&e->node)) {
      if (b->op == BinOp::Or) return LOr;
      if (b->op == BinOp::And) return LAnd;
      if (is_compare(b->op)) return LCmp;
      if (b->op == BinOp::Add || b->op == BinOp::Sub) return LAdd;
      return LMul;
    }
    return LPrim;
  }

  void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 4, ' '); }

  void block(const std::vector<Stmt>& stmts, int depth) {
    for (const auto& s : stmts) stmt(s, depth);
  }

  void stmt(const Stmt& s, int depth) {
    indent(depth);
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      out_ += a->target + " = ";
      expr(a->value, 0);
      out_ += ";\n";
    } else if (const auto* i = std::get_if<If>(&s.node)) {
      out_ += "if ";
      expr(i->cond, 0);
      out_ += " {\n";
      block(i->then_body, depth + 1);
      indent(depth);
      if (i->else_body.empty()) {
        out_ += "}\n";
      } else {
        out_ += "} else {\n";
        block(i->else_body, depth + 1);
        indent(depth);
        out_ += "}\n";
      }
    } else if (const auto* w = std::get_if<While>(&s.node)) {
      out_ += "while ";
      expr(w->cond, 0);
      out_ += " {\n";
      block(w->body, depth + 1);
      indent(depth);
      out_ += "}\n";
    } else {
      out_ += "return ";
      expr(std::get<Return>(s.node).value, 0);
      out_ += ";\n";
    }
  }

  void expr(const ExprPtr& e, int min_level) {
    const bool parens = level(e) < min_level;
    if (parens) out_ += "(";
    if (const auto* lit = std::get_if<IntLit>(&e->node)) {
      out_ += std::to_string(lit->value);
    } else if (const auto* lit = std::get_if<BoolLit>(&e->node)) {
      out_ += lit->value ? "true" : "false";
    } else if (const auto* v = std::get_if<Var>(&e->node)) {
      out_ += v->name;
    } else if (const auto* u = std::get_if<Unary>(&e->node)) {
      if (u->op == UnOp::Not) {
        out_ += "not ";
        expr(u->operand, LNot);
      } else {
        out_ += "-";
        expr(u->operand, LNeg);
      }
    } else {
      const auto& b = std::get<Binary>(e->node);
      const int lv = level(e);
      expr(b.lhs, lv);
      out_ += std::string(" ") + bin_op_text(b.op) + " ";
      expr(b.rhs, lv + 1);  // left-associative: looser right child needs parens
    }
    if (parens) out_ += ")";
  }

  std::string out_;
};

inline std::string pretty_print(const Program& prog) { return Printer::program(prog); }

}  // namespace sympref::minilang
