#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sympref/minilang/ast.hpp"
#include "sympref/minilang/lexer.hpp"

namespace sympref::minilang {

// Recursive-descent parser. Precedence, loosest first:
//   or < and < not < comparison < additive < multiplicative < unary minus
// Binary operators associate left; comparisons do not chain usefully (the
// typechecker rejects bool operands of a comparison).
class Parser {
 public:
  static Result<Program> parse(std::string_view source) {
    auto tokens = Lexer(source).run();
    if (!tokens.ok()) return tokens.diag();
    Parser p(std::move(tokens).value());
    auto prog = p.program();
    if (!prog.ok()) return prog;
    if (!p.at(Tok::End))
      return p.error("trailing input after function body");
    auto result = std::move(prog).value();
    result.source_span = {0, static_cast<std::uint32_t>(source.size())};
    return result;
  }

 private:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  Token take() { return toks_[pos_++]; }

  Diagnostic error(std::string msg) const {
    return Diagnostic{Phase::Parse, std::move(msg), cur().span};
  }

  Result<Token> expect(Tok k, const char* what) {
    if (!at(k)) return error(std::string("expected ") + what);
    return take();
  }

  Result<Program> program() {
    if (auto r = expect(Tok::KwFn, "'fn'"); !r.ok()) return r.diag();
    auto name = expect(Tok::Ident, "function name");
    if (!name.ok()) return name.diag();
    if (auto r = expect(Tok::LParen, "'('"); !r.ok()) return r.diag();
    Program prog;
    prog.name = std::string(name.value().text);
    if (!at(Tok::RParen)) {
      while (true) {
        auto param = parse_param();
        if (!param.ok()) return param.diag();
        prog.params.push_back(std::move(param).value());
        if (at(Tok::Comma)) {
          take();
          continue;
        }
        break;
      }
    }
    if (auto r = expect(Tok::RParen, "')'"); !r.ok()) return r.diag();
    auto body = block();
    if (!body.ok()) return body.diag();
    prog.body = std::move(body).value();
    return prog;
  }

  Result<Param> parse_param() {
    auto name = expect(Tok::Ident, "parameter name");
    if (!name.ok()) return name.diag();
    Param p{std::string(name.value().text), std::nullopt};
    if (at(Tok::Colon)) {
      take();
      if (at(Tok::KwInt)) {
        take();
        p.type = Ty::Int;
      } else if (at(Tok::KwBool)) {
        take();
        p.type = Ty::Bool;
      } else {
        return error("expected 'int' or 'bool' after ':'");
      }
    }
    return p;
  }

  Result<std::vector<Stmt>> block() {
    if (auto r = expect(Tok::LBrace, "'{'"); !r.ok()) return r.diag();
    std::vector<Stmt> stmts;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) return error("unterminated block, expected '}'");
      auto s = statement();
      if (!s.ok()) return s.diag();
      stmts.push_back(std::move(s).value());
    }
    take();  // '}'
    return stmts;
  }

  Result<Stmt> statement() {
    const Span start = cur().span;
    if (at(Tok::KwReturn)) {
      take();
      auto value = expression();
      if (!value.ok()) return value.diag();
      auto semi = expect(Tok::Semi, "';' after return");
      if (!semi.ok()) return semi.diag();
      return Stmt{Return{std::move(value).value()}, {start.begin, semi.value().span.end}};
    }
    if (at(Tok::KwIf)) {
      take();
      auto cond = expression();
      if (!cond.ok()) return cond.diag();
      auto then_body = block();
      if (!then_body.ok()) return then_body.diag();
      std::vector<Stmt> else_body;
      if (at(Tok::KwElse)) {
        take();
        auto eb = block();
        if (!eb.ok()) return eb.diag();
        else_body = std::move(eb).value();
      }
      return Stmt{If{std::move(cond).value(), std::move(then_body).value(), std::move(else_body)},
                  {start.begin, prev_end()}};
    }
    if (at(Tok::KwWhile)) {
      take();
      auto cond = expression();
      if (!cond.ok()) return cond.diag();
      auto body = block();
      if (!body.ok()) return body.diag();
      return Stmt{While{std::move(cond).value(), std::move(body).value()},
                  {start.begin, prev_end()}};
    }
    if (at(Tok::Ident)) {
      Token name = take();
      auto eq = expect(Tok::Assign, "'=' in assignment");
      if (!eq.ok()) return eq.diag();
      auto value = expression();
      if (!value.ok()) return value.diag();
      auto semi = expect(Tok::Semi, "';' after assignment");
      if (!semi.ok()) return semi.diag();
      return Stmt{Assign{std::string(name.text), std::move(value).value()},
                  {start.begin, semi.value().span.end}};
    }
    return error("expected a statement");
  }

  std::uint32_t prev_end() const { return toks_[pos_ - 1].span.end; }

  Result<ExprPtr> expression() { return or_expr(); }

  Result<ExprPtr> or_expr() {
    auto lhs = and_expr();
    if (!lhs.ok()) return lhs;
    ExprPtr e = std::move(lhs).value();
    while (at(Tok::KwOr)) {
      take();
      auto rhs = and_expr();
      if (!rhs.ok()) return rhs;
      e = make_binary(BinOp::Or, e, std::move(rhs).value(), {e->span.begin, prev_end()});
    }
    return e;
  }

  Result<ExprPtr> and_expr() {
    auto lhs = not_expr();
    if (!lhs.ok()) return lhs;
    ExprPtr e = std::move(lhs).value();
    while (at(Tok::KwAnd)) {
      take();
      auto rhs = not_expr();
      if (!rhs.ok()) return rhs;
      e = make_binary(BinOp::And, e, std::move(rhs).value(), {e->span.begin, prev_end()});
    }
    return e;
  }

  Result<ExprPtr> not_expr() {
    if (at(Tok::KwNot)) {
      const Span start = take().span;
      auto operand = not_expr();
      if (!operand.ok()) return operand;
      return make_unary(UnOp::Not, std::move(operand).value(), {start.begin, prev_end()});
    }
    return comparison();
  }

  std::optional<BinOp> compare_op() const {
    switch (cur().kind) {
      case Tok::Lt: return BinOp::Lt;
      case Tok::Le: return BinOp::Le;
      case Tok::Gt: return BinOp::Gt;
      case Tok::Ge: return BinOp::Ge;
      case Tok::Eq: return BinOp::Eq;
      case Tok::Ne: return BinOp::Ne;
      default: return std::nullopt;
    }
  }

  Result<ExprPtr> comparison() {
    auto lhs = additive();
    if (!lhs.ok()) return lhs;
    ExprPtr e = std::move(lhs).value();
    while (auto op = compare_op()) {
      take();
      auto rhs = additive();
      if (!rhs.ok()) return rhs;
      e = make_binary(*op, e, std::move(rhs).value(), {e->span.begin, prev_end()});
    }
    return e;
  }

  Result<ExprPtr> additive() {
    auto lhs = multiplicative();
    if (!lhs.ok()) return lhs;
    ExprPtr e = std::move(lhs).value();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      take();
      auto rhs = multiplicative();
      if (!rhs.ok()) return rhs;
      e = make_binary(op, e, std::move(rhs).value(), {e->span.begin, prev_end()});
    }
    return e;
  }

  Result<ExprPtr> multiplicative() {
    auto lhs = unary();
    if (!lhs.ok()) return lhs;
    ExprPtr e = std::move(lhs).value();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      const BinOp op = at(Tok::Star)   ? BinOp::Mul
                       : at(Tok::Slash) ? BinOp::Div
                                        : BinOp::Mod;
      take();
      auto rhs = unary();
      if (!rhs.ok()) return rhs;
      e = make_binary(op, e, std::move(rhs).value(), {e->span.begin, prev_end()});
    }
    return e;
  }

  Result<ExprPtr> unary() {
    if (at(Tok::Minus)) {
      const Span start = take().span;
      auto operand = unary();
      if (!operand.ok()) return operand;
      return make_unary(UnOp::Neg, std::move(operand).value(), {start.begin, prev_end()});
    }
    return primary();
  }

  Result<ExprPtr> primary() {
    if (at(Tok::IntLit)) {
      Token t = take();
      return make_int(t.int_value, t.span);
    }
    if (at(Tok::KwTrue)) return make_bool(true, take().span);
    if (at(Tok::KwFalse)) return make_bool(false, take().span);
    if (at(Tok::Ident)) {
      Token t = take();
      return make_var(std::string(t.text), t.span);
    }
    if (at(Tok::LParen)) {
      take();
      auto inner = expression();
      if (!inner.ok()) return inner;
      if (auto r = expect(Tok::RParen, "')'"); !r.ok()) return r.diag();
      return inner;
    }
    return error("expected an expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline Result<Program> parse(std::string_view source) { return Parser::parse(source); }

}  // namespace sympref::minilang
