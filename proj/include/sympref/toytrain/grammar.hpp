#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sympref/minilang/parser.hpp"
#include "sympref/minilang/print.hpp"
#include "sympref/minilang/typecheck.hpp"
#include "sympref/support/rng.hpp"

namespace sympref::toytrain {

using minilang::BinOp;
using minilang::Ty;
using minilang::UnOp;

// Fixed nonterminal layout of the program grammar. The policy owns one
// weight vector per nonterminal; softmax over the currently legal
// alternatives gives the choice distribution.
enum Nt : int {
  NtStmt = 0,   // 0 return | 1 assign | 2 if/else | 3 while
  NtIntExpr,    // 0 literal | 1 var | 2 binary | 3 negate
  NtArithOp,    // + - * / %
  NtBoolExpr,   // 0 true | 1 false | 2 var | 3 compare | 4 and | 5 or | 6 not
  NtCmpOp,      // < <= > >= == !=
  NtIntLit,     // literal alphabet
  NtVarPick,    // parameter 0..3 | scratch variable
  NtCount,
};

inline constexpr std::array<std::int64_t, 6> kLiteralAlphabet = {0, 1, 2, 3, 5, 10};
inline constexpr int kMaxParams = 4;
inline constexpr int kScratchAlt = kMaxParams;  // VarPick alternative for the scratch var

inline const char* nt_name(int nt) {
  switch (nt) {
    case NtStmt: return "stmt";
    case NtIntExpr: return "int_expr";
    case NtArithOp: return "arith_op";
    case NtBoolExpr: return "bool_expr";
    case NtCmpOp: return "cmp_op";
    case NtIntLit: return "int_lit";
    case NtVarPick: return "var_pick";
  }
  return "?";
}

inline int nt_alternative_count(int nt) {
  switch (nt) {
    case NtStmt: return 4;
    case NtIntExpr: return 4;
    case NtArithOp: return 5;
    case NtBoolExpr: return 7;
    case NtCmpOp: return 6;
    case NtIntLit: return static_cast<int>(kLiteralAlphabet.size());
    case NtVarPick: return kMaxParams + 1;
  }
  return 0;
}

struct Production {
  std::string name;
  std::vector<double> weights;
  std::vector<bool> allowed;  // policy-level mask, default all-true
};

struct GrammarPolicy {
  std::vector<Production> productions;
  int max_depth = 5;

  const Production& at(int nt) const { return productions[static_cast<std::size_t>(nt)]; }
  Production& at(int nt) { return productions[static_cast<std::size_t>(nt)]; }
};

inline GrammarPolicy make_policy(int max_depth = 5) {
  GrammarPolicy policy;
  policy.max_depth = max_depth;
  for (int nt = 0; nt < NtCount; ++nt) {
    const int alts = nt_alternative_count(nt);
    policy.productions.push_back(
        {nt_name(nt), std::vector<double>(static_cast<std::size_t>(alts), 0.0),
         std::vector<bool>(static_cast<std::size_t>(alts), true)});
  }
  return policy;
}

// One decision made while deriving a program: which alternative of which
// nonterminal, and which alternatives were legal at that point. The mask is
// recorded so gradients can be recomputed from the trace alone.
struct Choice {
  int nt = 0;
  int alt = 0;
  std::uint32_t mask = 0;
};

using ChoiceTrace = std::vector<Choice>;

// Function signature the sampler is conditioned on (the prompt analog).
struct Signature {
  std::string name;
  std::vector<std::pair<std::string, Ty>> params;
};

inline Signature signature_of(const minilang::TypedProgram& prog) {
  Signature sig;
  sig.name = prog.program.name;
  for (const auto& p : prog.program.params) sig.params.emplace_back(p.name, *p.type);
  return sig;
}

// Name for the grammar's scratch variable that cannot shadow a parameter.
inline std::string scratch_name(const Signature& sig) {
  for (const char* cand : {"t", "tmp", "acc", "aux"}) {
    bool clash = false;
    for (const auto& [name, ty] : sig.params) clash |= name == cand;
    if (!clash) return cand;
  }
  return "scratch_";
}

struct DerivationError : std::runtime_error {
  explicit DerivationError(const std::string& why)
      : std::runtime_error("not derivable: " + why) {}
};

namespace detail {

inline std::uint32_t depth_mask(int nt, int depth, int nparams) {
  const int alts = nt_alternative_count(nt);
  std::uint32_t mask = (1u << alts) - 1;
  if (nt == NtStmt && depth <= 0) mask = 1u;              // return only
  if (nt == NtIntExpr && depth <= 0) mask &= 0x3u;        // literal | var
  if (nt == NtBoolExpr && depth <= 0) mask &= 0x7u;       // true | false | var
  if (nt == NtVarPick) {
    std::uint32_t avail = 1u << kScratchAlt;
    for (int i = 0; i < nparams && i < kMaxParams; ++i) avail |= 1u << i;
    mask &= avail;
  }
  return mask;
}

inline std::uint32_t policy_mask(const GrammarPolicy& policy, int nt, std::uint32_t mask) {
  const auto& allowed = policy.at(nt).allowed;
  for (std::size_t i = 0; i < allowed.size(); ++i)
    if (!allowed[i]) mask &= ~(1u << i);
  return mask;
}

inline std::vector<double> masked_softmax(const std::vector<double>& weights,
                                          std::uint32_t mask) {
  std::vector<double> p(weights.size(), 0.0);
  double max_w = -HUGE_VAL;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (mask & (1u << i)) max_w = std::max(max_w, weights[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (mask & (1u << i)) z += std::exp(weights[i] - max_w);
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (mask & (1u << i)) p[i] = std::exp(weights[i] - max_w) / z;
  return p;
}

// Shared walking context: both the sampler and the deriver make the same
// sequence of choice points, so the probability accounting lives here.
class TraceBuilder {
 public:
  TraceBuilder(const GrammarPolicy& policy, int nparams)
      : policy_(policy), nparams_(nparams) {}

  double log_prob() const { return log_prob_; }
  const ChoiceTrace& trace() const { return trace_; }

  // Commits a choice that was decided externally (derivation). Throws when
  // the alternative is illegal at this point.
  void commit(int nt, int alt, int depth) {
    const std::uint32_t mask = active_mask(nt, depth);
    if (alt < 0 || alt >= nt_alternative_count(nt) || !(mask & (1u << alt)))
      throw DerivationError(std::string(nt_name(nt)) + " alternative " +
                            std::to_string(alt) + " is masked out");
    account(nt, alt, mask);
  }

  // Draws an alternative from the masked softmax.
  int draw(int nt, int depth, std::mt19937_64& rng) {
    const std::uint32_t mask = active_mask(nt, depth);
    const auto p = masked_softmax(policy_.at(nt).weights, mask);
    const double u = uniform_unit(rng);
    double acc = 0.0;
    int chosen = -1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(mask & (1u << i))) continue;
      acc += p[i];
      chosen = static_cast<int>(i);
      if (u < acc) break;
    }
    account(nt, chosen, mask);
    return chosen;
  }

 private:
  std::uint32_t active_mask(int nt, int depth) const {
    const std::uint32_t mask = policy_mask(policy_, nt, depth_mask(nt, depth, nparams_));
    if (mask == 0)
      throw DerivationError(std::string("no legal alternative for ") + nt_name(nt));
    return mask;
  }

  void account(int nt, int alt, std::uint32_t mask) {
    const auto p = masked_softmax(policy_.at(nt).weights, mask);
    log_prob_ += std::log(p[static_cast<std::size_t>(alt)]);
    trace_.push_back({nt, alt, mask});
  }

  const GrammarPolicy& policy_;
  int nparams_;
  double log_prob_ = 0.0;
  ChoiceTrace trace_;
};

}  // namespace detail

struct SampledProgram {
  std::string source;
  double log_prob = 0.0;
  ChoiceTrace trace;
};

namespace detail {

class Sampler {
 public:
  Sampler(const GrammarPolicy& policy, const Signature& sig, std::mt19937_64& rng)
      : builder_(policy, static_cast<int>(sig.params.size())),
        sig_(sig),
        scratch_(scratch_name(sig)),
        rng_(rng) {}

  SampledProgram run(int max_depth) {
    minilang::Program prog;
    prog.name = sig_.name;
    for (const auto& [name, ty] : sig_.params)
      prog.params.push_back(minilang::Param{name, ty});
    prog.body = body(max_depth);
    SampledProgram out;
    out.source = minilang::pretty_print(prog);
    out.log_prob = builder_.log_prob();
    out.trace = builder_.trace();
    return out;
  }

 private:
  std::vector<minilang::Stmt> body(int depth) {
    std::vector<minilang::Stmt> stmts;
    while (true) {
      const int alt = builder_.draw(NtStmt, depth, rng_);
      if (alt == 0) {  // return
        stmts.push_back({minilang::Return{int_expr(depth)}, {}});
        return stmts;
      }
      if (alt == 1) {  // assign, then continue
        std::string target = var_pick(depth);
        stmts.push_back({minilang::Assign{std::move(target), int_expr(depth)}, {}});
        --depth;
        continue;
      }
      if (alt == 2) {  // if/else, both arms complete the body
        auto cond = bool_expr(depth);
        auto then_body = body(depth - 1);
        auto else_body = body(depth - 1);
        stmts.push_back({minilang::If{cond, std::move(then_body), std::move(else_body)}, {}});
        return stmts;
      }
      // while with a single-assignment body, then continue
      auto cond = bool_expr(depth);
      std::string target = var_pick(depth);
      auto rhs = int_expr(depth);
      std::vector<minilang::Stmt> loop_body;
      loop_body.push_back({minilang::Assign{std::move(target), rhs}, {}});
      stmts.push_back({minilang::While{cond, std::move(loop_body)}, {}});
      --depth;
    }
  }

  minilang::ExprPtr int_expr(int depth) {
    const int alt = builder_.draw(NtIntExpr, depth, rng_);
    if (alt == 0) {
      const int lit = builder_.draw(NtIntLit, depth, rng_);
      return minilang::make_int(kLiteralAlphabet[static_cast<std::size_t>(lit)]);
    }
    if (alt == 1) return minilang::make_var(var_pick(depth));
    if (alt == 2) {
      const int op = builder_.draw(NtArithOp, depth, rng_);
      auto lhs = int_expr(depth - 1);
      auto rhs = int_expr(depth - 1);
      return minilang::make_binary(arith_op(op), std::move(lhs), std::move(rhs));
    }
    return minilang::make_unary(UnOp::Neg, int_expr(depth - 1));
  }

  minilang::ExprPtr bool_expr(int depth) {
    const int alt = builder_.draw(NtBoolExpr, depth, rng_);
    if (alt == 0) return minilang::make_bool(true);
    if (alt == 1) return minilang::make_bool(false);
    if (alt == 2) return minilang::make_var(var_pick(depth));
    if (alt == 3) {
      const int op = builder_.draw(NtCmpOp, depth, rng_);
      auto lhs = int_expr(depth - 1);
      auto rhs = int_expr(depth - 1);
      return minilang::make_binary(cmp_op(op), std::move(lhs), std::move(rhs));
    }
    if (alt == 4 || alt == 5) {
      auto lhs = bool_expr(depth - 1);
      auto rhs = bool_expr(depth - 1);
      return minilang::make_binary(alt == 4 ? BinOp::And : BinOp::Or, std::move(lhs),
                                   std::move(rhs));
    }
    return minilang::make_unary(UnOp::Not, bool_expr(depth - 1));
  }

  std::string var_pick(int depth) {
    const int alt = builder_.draw(NtVarPick, depth, rng_);
    if (alt == kScratchAlt) return scratch_;
    return sig_.params[static_cast<std::size_t>(alt)].first;
  }

  static BinOp arith_op(int alt) {
    constexpr std::array<BinOp, 5> ops = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div,
                                          BinOp::Mod};
    return ops[static_cast<std::size_t>(alt)];
  }
  static BinOp cmp_op(int alt) {
    constexpr std::array<BinOp, 6> ops = {BinOp::Lt, BinOp::Le, BinOp::Gt,
                                          BinOp::Ge, BinOp::Eq, BinOp::Ne};
    return ops[static_cast<std::size_t>(alt)];
  }

  TraceBuilder builder_;
  const Signature& sig_;
  std::string scratch_;
  std::mt19937_64& rng_;
};

}  // namespace detail

// Samples a program conditioned on the task signature. The emitted source
// always parses; it may still fail the typechecker (that is part of the
// category distribution the pipeline grades).
inline SampledProgram sample_program(const GrammarPolicy& policy, const Signature& sig,
                                     std::mt19937_64& rng) {
  return detail::Sampler(policy, sig, rng).run(policy.max_depth);
}

namespace detail {

// Maps an AST back onto grammar choices. The grammar is unambiguous: a
// source inside its language has exactly one derivation, so log-probability
// of a source is well defined.
class Deriver {
 public:
  Deriver(const GrammarPolicy& policy, const Signature& sig)
      : builder_(policy, static_cast<int>(sig.params.size())),
        sig_(sig),
        scratch_(scratch_name(sig)) {}

  SampledProgram run(const minilang::Program& prog, const std::string& source,
                     int max_depth) {
    if (prog.name != sig_.name) throw DerivationError("function name differs");
    if (prog.params.size() != sig_.params.size())
      throw DerivationError("parameter count differs");
    for (std::size_t i = 0; i < prog.params.size(); ++i) {
      if (prog.params[i].name != sig_.params[i].first ||
          !prog.params[i].type || *prog.params[i].type != sig_.params[i].second)
        throw DerivationError("parameter list differs from the signature");
    }
    body(prog.body, 0, max_depth);
    SampledProgram out;
    out.source = source;
    out.log_prob = builder_.log_prob();
    out.trace = builder_.trace();
    return out;
  }

 private:
  void body(const std::vector<minilang::Stmt>& stmts, std::size_t from, int depth) {
    if (from >= stmts.size()) throw DerivationError("body ends without return or if/else");
    const auto& s = stmts[from];
    if (const auto* r = std::get_if<minilang::Return>(&s.node)) {
      if (from + 1 != stmts.size()) throw DerivationError("statements after return");
      builder_.commit(NtStmt, 0, depth);
      int_expr(r->value, depth);
      return;
    }
    if (const auto* a = std::get_if<minilang::Assign>(&s.node)) {
      builder_.commit(NtStmt, 1, depth);
      var_pick(a->target, depth);
      int_expr(a->value, depth);
      body(stmts, from + 1, depth - 1);
      return;
    }
    if (const auto* i = std::get_if<minilang::If>(&s.node)) {
      if (from + 1 != stmts.size()) throw DerivationError("statements after if/else");
      if (i->else_body.empty()) throw DerivationError("if without else");
      builder_.commit(NtStmt, 2, depth);
      bool_expr(i->cond, depth);
      body(i->then_body, 0, depth - 1);
      body(i->else_body, 0, depth - 1);
      return;
    }
    const auto& w = std::get<minilang::While>(s.node);
    if (w.body.size() != 1 || !std::holds_alternative<minilang::Assign>(w.body[0].node))
      throw DerivationError("while body is not a single assignment");
    builder_.commit(NtStmt, 3, depth);
    bool_expr(w.cond, depth);
    const auto& a = std::get<minilang::Assign>(w.body[0].node);
    var_pick(a.target, depth);
    int_expr(a.value, depth);
    body(stmts, from + 1, depth - 1);
  }

  void int_expr(const minilang::ExprPtr& e, int depth) {
    if (const auto* lit = std::get_if<minilang::IntLit>(&e->node)) {
      builder_.commit(NtIntExpr, 0, depth);
      for (std::size_t i = 0; i < kLiteralAlphabet.size(); ++i) {
        if (kLiteralAlphabet[i] == lit->value) {
          builder_.commit(NtIntLit, static_cast<int>(i), depth);
          return;
        }
      }
      throw DerivationError("literal outside the alphabet");
    }
    if (const auto* v = std::get_if<minilang::Var>(&e->node)) {
      builder_.commit(NtIntExpr, 1, depth);
      var_pick(v->name, depth);
      return;
    }
    if (const auto* b = std::get_if<minilang::Binary>(&e->node)) {
      if (!minilang::is_arith(b->op)) throw DerivationError("non-arithmetic op in int position");
      builder_.commit(NtIntExpr, 2, depth);
      builder_.commit(NtArithOp, arith_alt(b->op), depth);
      int_expr(b->lhs, depth - 1);
      int_expr(b->rhs, depth - 1);
      return;
    }
    if (const auto* u = std::get_if<minilang::Unary>(&e->node)) {
      if (u->op != UnOp::Neg) throw DerivationError("'not' in int position");
      builder_.commit(NtIntExpr, 3, depth);
      int_expr(u->operand, depth - 1);
      return;
    }
    throw DerivationError("bool literal in int position");
  }

  void bool_expr(const minilang::ExprPtr& e, int depth) {
    if (const auto* lit = std::get_if<minilang::BoolLit>(&e->node)) {
      builder_.commit(NtBoolExpr, lit->value ? 0 : 1, depth);
      return;
    }
    if (const auto* v = std::get_if<minilang::Var>(&e->node)) {
      builder_.commit(NtBoolExpr, 2, depth);
      var_pick(v->name, depth);
      return;
    }
    if (const auto* b = std::get_if<minilang::Binary>(&e->node)) {
      if (minilang::is_compare(b->op)) {
        builder_.commit(NtBoolExpr, 3, depth);
        builder_.commit(NtCmpOp, cmp_alt(b->op), depth);
        int_expr(b->lhs, depth - 1);
        int_expr(b->rhs, depth - 1);
        return;
      }
      if (b->op == BinOp::And || b->op == BinOp::Or) {
        builder_.commit(NtBoolExpr, b->op == BinOp::And ? 4 : 5, depth);
        bool_expr(b->lhs, depth - 1);
        bool_expr(b->rhs, depth - 1);
        return;
      }
      throw DerivationError("arithmetic op in bool position");
    }
    if (const auto* u = std::get_if<minilang::Unary>(&e->node)) {
      if (u->op != UnOp::Not) throw DerivationError("negation in bool position");
      builder_.commit(NtBoolExpr, 6, depth);
      bool_expr(u->operand, depth - 1);
      return;
    }
    throw DerivationError("int literal in bool position");
  }

  void var_pick(const std::string& name, int depth) {
    if (name == scratch_) {
      builder_.commit(NtVarPick, kScratchAlt, depth);
      return;
    }
    for (std::size_t i = 0; i < sig_.params.size(); ++i) {
      if (sig_.params[i].first == name) {
        builder_.commit(NtVarPick, static_cast<int>(i), depth);
        return;
      }
    }
    throw DerivationError("unknown variable '" + name + "'");
  }

  static int arith_alt(BinOp op) {
    switch (op) {
      case BinOp::Add: return 0;
      case BinOp::Sub: return 1;
      case BinOp::Mul: return 2;
      case BinOp::Div: return 3;
      default: return 4;  // Mod
    }
  }
  static int cmp_alt(BinOp op) {
    switch (op) {
      case BinOp::Lt: return 0;
      case BinOp::Le: return 1;
      case BinOp::Gt: return 2;
      case BinOp::Ge: return 3;
      case BinOp::Eq: return 4;
      default: return 5;  // Ne
    }
  }

  detail::TraceBuilder builder_;
  const Signature& sig_;
  std::string scratch_;
};

}  // namespace detail

// Recovers the unique derivation of a source under the grammar, giving its
// exact log-probability. Throws DerivationError when the source is outside
// the grammar's language.
inline SampledProgram derive(const GrammarPolicy& policy, const Signature& sig,
                             const std::string& source) {
  auto parsed = minilang::parse(source);
  if (!parsed.ok()) throw DerivationError(parsed.diag().to_string());
  return detail::Deriver(policy, sig).run(parsed.value(), source, policy.max_depth);
}

// Log-probability of an already-derived trace under (possibly different)
// weights. The stored masks make this independent of grammar context.
inline double trace_log_prob(const GrammarPolicy& policy, const ChoiceTrace& trace) {
  double lp = 0.0;
  for (const auto& c : trace) {
    const auto p = detail::masked_softmax(policy.at(c.nt).weights, c.mask);
    lp += std::log(p[static_cast<std::size_t>(c.alt)]);
  }
  return lp;
}

}  // namespace sympref::toytrain
