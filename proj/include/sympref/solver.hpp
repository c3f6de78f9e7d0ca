#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sympref/symexec.hpp"

namespace sympref {

using Assignment = std::vector<minilang::Value>;  // indexed by param position

struct SolverConfig {
  std::int64_t domain_lo = -1024;
  std::int64_t domain_hi = 1023;
  std::int64_t search_budget = 1000000;  // candidate value assignments
};

enum class SolveStatus { Sat, Infeasible, BudgetExhausted };

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Assignment> assignment;  // present iff Sat; smallest witness
  std::int64_t evaluations = 0;
};

namespace detail {

using I128 = __int128;

inline I128 floordiv(I128 a, I128 b) {
  I128 q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}
inline I128 ceildiv(I128 a, I128 b) { return -floordiv(-a, b); }

enum class Rel { Le0, Ge0, Eq0 };

// Normalized linear constraint: sum(coeff_i * x_i) + constant REL 0.
// Booleans are encoded 0/1. Strict inequalities were absorbed into the
// constant (integer domain).
struct LinAtom {
  std::map<int, I128> coeffs;
  I128 constant = 0;
  Rel rel = Rel::Le0;
};

struct Interval {
  std::int64_t lo;
  std::int64_t hi;
  bool empty() const { return lo > hi; }
};

class LinearExtractor {
 public:
  // sum(coeff*var) + constant for integer-typed expressions; nullopt when the
  // expression is nonlinear (mul of two variable polys, div, mod).
  struct Poly {
    std::map<int, I128> coeffs;
    I128 constant = 0;
  };

  static std::optional<Poly> poly_of(const sym::Ptr& e) {
    using namespace sym;
    if (const auto* v = std::get_if<VarRef>(&e->node)) {
      if (v->type != Ty::Int) return std::nullopt;
      Poly p;
      p.coeffs[v->param_index] = 1;
      return p;
    }
    if (const auto* c = std::get_if<IntConst>(&e->node)) {
      Poly p;
      p.constant = c->value;
      return p;
    }
    if (const auto* u = std::get_if<Unary>(&e->node)) {
      if (u->op != UnOp::Neg) return std::nullopt;
      auto inner = poly_of(u->operand);
      if (!inner) return std::nullopt;
      return scale(*inner, -1);
    }
    const auto* b = std::get_if<Binary>(&e->node);
    if (!b) return std::nullopt;
    if (b->op == BinOp::Add || b->op == BinOp::Sub) {
      auto lhs = poly_of(b->lhs);
      auto rhs = poly_of(b->rhs);
      if (!lhs || !rhs) return std::nullopt;
      return combine(*lhs, *rhs, b->op == BinOp::Add ? 1 : -1);
    }
    if (b->op == BinOp::Mul) {
      auto lhs = poly_of(b->lhs);
      auto rhs = poly_of(b->rhs);
      if (!lhs || !rhs) return std::nullopt;
      if (lhs->coeffs.empty()) return scale(*rhs, lhs->constant);
      if (rhs->coeffs.empty()) return scale(*lhs, rhs->constant);
      return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  static constexpr I128 kMagnitudeCap = I128(1) << 62;

  static std::optional<Poly> checked(Poly p) {
    if (p.constant > kMagnitudeCap || p.constant < -kMagnitudeCap) return std::nullopt;
    for (const auto& [v, c] : p.coeffs)
      if (c > kMagnitudeCap || c < -kMagnitudeCap) return std::nullopt;
    return p;
  }

  static std::optional<Poly> scale(const Poly& p, I128 k) {
    Poly out;
    out.constant = p.constant * k;
    for (const auto& [v, c] : p.coeffs)
      if (c * k != 0) out.coeffs[v] = c * k;
    return checked(std::move(out));
  }

  static std::optional<Poly> combine(const Poly& a, const Poly& b, I128 sign) {
    Poly out = a;
    out.constant += sign * b.constant;
    for (const auto& [v, c] : b.coeffs) {
      out.coeffs[v] += sign * c;
      if (out.coeffs[v] == 0) out.coeffs.erase(v);
    }
    return checked(std::move(out));
  }
};

// Turns one boolean conjunct into linear atoms where possible. `negate`
// tracks an odd number of enclosing `not`s. Conjuncts that do not fit the
// linear fragment are handled by concrete evaluation during the search.
inline void extract_atoms(const sym::Ptr& e, bool negate, std::vector<LinAtom>& out) {
  using namespace sym;
  if (const auto* u = std::get_if<Unary>(&e->node)) {
    if (u->op == UnOp::Not) extract_atoms(u->operand, !negate, out);
    return;
  }
  if (const auto* v = std::get_if<VarRef>(&e->node)) {
    if (v->type != Ty::Bool) return;
    LinAtom atom;  // x == 1 (or x == 0 when negated)
    atom.coeffs[v->param_index] = 1;
    atom.constant = negate ? 0 : -1;
    atom.rel = Rel::Eq0;
    out.push_back(std::move(atom));
    return;
  }
  const auto* b = std::get_if<Binary>(&e->node);
  if (!b) return;
  if (b->op == BinOp::And && !negate) {
    extract_atoms(b->lhs, false, out);
    extract_atoms(b->rhs, false, out);
    return;
  }
  if (b->op == BinOp::Or && negate) {  // not (a or b) == not a and not b
    extract_atoms(b->lhs, true, out);
    extract_atoms(b->rhs, true, out);
    return;
  }
  if (!minilang::is_compare(b->op)) return;
  if (sym::type_of(b->lhs) != Ty::Int) return;  // == / != over booleans: residue
  auto lhs = LinearExtractor::poly_of(b->lhs);
  auto rhs = LinearExtractor::poly_of(b->rhs);
  if (!lhs || !rhs) return;
  LinAtom atom;  // poly = lhs - rhs
  atom.coeffs = lhs->coeffs;
  atom.constant = lhs->constant - rhs->constant;
  for (const auto& [v, c] : rhs->coeffs) {
    atom.coeffs[v] -= c;
    if (atom.coeffs[v] == 0) atom.coeffs.erase(v);
  }
  BinOp op = b->op;
  if (negate) {
    switch (op) {
      case BinOp::Lt: op = BinOp::Ge; break;
      case BinOp::Le: op = BinOp::Gt; break;
      case BinOp::Gt: op = BinOp::Le; break;
      case BinOp::Ge: op = BinOp::Lt; break;
      case BinOp::Eq: op = BinOp::Ne; break;
      case BinOp::Ne: op = BinOp::Eq; break;
      default: return;
    }
  }
  switch (op) {
    case BinOp::Lt: atom.constant += 1; atom.rel = Rel::Le0; break;
    case BinOp::Le: atom.rel = Rel::Le0; break;
    case BinOp::Gt: atom.constant -= 1; atom.rel = Rel::Ge0; break;
    case BinOp::Ge: atom.rel = Rel::Ge0; break;
    case BinOp::Eq: atom.rel = Rel::Eq0; break;
    case BinOp::Ne: return;  // no interval information
    default: return;
  }
  out.push_back(std::move(atom));
}

class BoundedSearch {
 public:
  BoundedSearch(const PathCondition& cond, const std::vector<minilang::Ty>& param_types,
                const SolverConfig& config)
      : cond_(cond), types_(param_types), config_(config) {
    for (const auto t : types_) {
      if (t == minilang::Ty::Bool)
        base_.push_back({0, 1});
      else
        base_.push_back({config.domain_lo, config.domain_hi});
    }
    for (const auto& c : cond.conjuncts) extract_atoms(c, false, atoms_);
    conjunct_max_var_.reserve(cond.conjuncts.size());
    for (const auto& c : cond.conjuncts) {
      std::set<int> vars;
      sym::collect_vars(c, vars);
      conjunct_max_var_.push_back(vars.empty() ? -1 : *vars.rbegin());
    }
  }

  SolveResult run() {
    SolveResult result;
    if (!narrow(base_)) {
      result.status = SolveStatus::Infeasible;
      result.evaluations = evaluations_;
      return result;
    }
    scratch_.assign(types_.size(), minilang::Value::of_int(0));
    // Variable-free conjuncts decide satisfiability on their own.
    for (std::size_t i = 0; i < cond_.conjuncts.size(); ++i) {
      if (conjunct_max_var_[i] >= 0) continue;
      auto v = sym::eval(cond_.conjuncts[i], scratch_);
      if (!v || !v->as_bool()) {
        result.status = SolveStatus::Infeasible;
        result.evaluations = evaluations_;
        return result;
      }
    }
    if (types_.empty()) {
      result.status = SolveStatus::Sat;
      result.assignment = Assignment{};
      result.evaluations = evaluations_;
      return result;
    }
    const SolveStatus status = search(0, base_);
    result.status = status;
    result.evaluations = evaluations_;
    if (status == SolveStatus::Sat) result.assignment = witness_;
    return result;
  }

 private:
  // Interval narrowing to fixpoint. Removes only values that cannot satisfy
  // some atom for any choice of the other variables. False means empty.
  bool narrow(std::vector<Interval>& iv) const {
    for (int round = 0; round < 64; ++round) {
      bool changed = false;
      for (const auto& atom : atoms_) {
        for (const auto& [v, a] : atom.coeffs) {
          Interval& target = iv[static_cast<std::size_t>(v)];
          I128 rest_min = atom.constant;
          I128 rest_max = atom.constant;
          for (const auto& [u, c] : atom.coeffs) {
            if (u == v) continue;
            const Interval& o = iv[static_cast<std::size_t>(u)];
            if (o.empty()) return false;
            const I128 p1 = c * o.lo;
            const I128 p2 = c * o.hi;
            rest_min += p1 < p2 ? p1 : p2;
            rest_max += p1 < p2 ? p2 : p1;
          }
          // a*x + rest REL 0 must be satisfiable for the best-case rest.
          if (atom.rel == Rel::Le0 || atom.rel == Rel::Eq0) {
            const I128 bound = -rest_min;  // a*x <= bound
            I128 limit = a > 0 ? floordiv(bound, a) : ceildiv(bound, a);
            changed |= apply_upper_or_lower(target, limit, a > 0);
          }
          if (atom.rel == Rel::Ge0 || atom.rel == Rel::Eq0) {
            const I128 bound = -rest_max;  // a*x >= bound
            I128 limit = a > 0 ? ceildiv(bound, a) : floordiv(bound, a);
            changed |= apply_upper_or_lower(target, limit, a < 0);
          }
          if (target.empty()) return false;
        }
      }
      if (!changed) return true;
    }
    return true;
  }

  // Tightens one side of an interval; is_upper selects which. Domain bounds
  // are capped well inside int64, so the +-1 sentinels cannot overflow.
  static bool apply_upper_or_lower(Interval& iv, I128 limit, bool is_upper) {
    if (is_upper) {
      if (limit < I128(iv.lo) - 1) limit = I128(iv.lo) - 1;
      if (limit < I128(iv.hi)) {
        iv.hi = static_cast<std::int64_t>(limit);
        return true;
      }
      return false;
    }
    if (limit > I128(iv.hi) + 1) limit = I128(iv.hi) + 1;
    if (limit > I128(iv.lo)) {
      iv.lo = static_cast<std::int64_t>(limit);
      return true;
    }
    return false;
  }

  SolveStatus search(std::size_t depth, const std::vector<Interval>& iv) {
    const Interval range = iv[depth];
    for (std::int64_t v = range.lo; v <= range.hi; ++v) {
      if (++evaluations_ > config_.search_budget) return SolveStatus::BudgetExhausted;
      scratch_[depth] = types_[depth] == minilang::Ty::Bool ? minilang::Value::of_bool(v != 0)
                                                            : minilang::Value::of_int(v);
      bool pruned = false;
      for (std::size_t i = 0; i < cond_.conjuncts.size(); ++i) {
        if (conjunct_max_var_[i] != static_cast<int>(depth)) continue;
        auto val = sym::eval(cond_.conjuncts[i], scratch_);
        if (!val || !val->as_bool()) {
          pruned = true;
          break;
        }
      }
      if (pruned) {
        if (v == range.hi) break;
        continue;
      }
      if (depth + 1 == types_.size()) {
        if (satisfies(cond_, scratch_)) {  // re-evaluation before returning
          witness_ = scratch_;
          return SolveStatus::Sat;
        }
      } else {
        std::vector<Interval> next = iv;
        next[depth] = {v, v};
        if (narrow(next)) {
          const SolveStatus st = search(depth + 1, next);
          if (st != SolveStatus::Infeasible) return st;
        }
      }
      if (v == range.hi) break;  // guard against hi == INT64_MAX wraparound
    }
    return SolveStatus::Infeasible;
  }

  const PathCondition& cond_;
  const std::vector<minilang::Ty>& types_;
  const SolverConfig& config_;
  std::vector<Interval> base_;
  std::vector<LinAtom> atoms_;
  std::vector<int> conjunct_max_var_;
  Assignment scratch_;
  Assignment witness_;
  std::int64_t evaluations_ = 0;
};

}  // namespace detail

// Bounded-domain witness search: exact within [domain_lo, domain_hi].
// Deterministic: the returned witness is the lexicographically smallest by
// parameter index. Infeasible means no witness exists inside the domain.
inline SolveResult solve(const PathCondition& cond,
                         const std::vector<minilang::Ty>& param_types,
                         const SolverConfig& config = {}) {
  constexpr std::int64_t kDomainLimit = std::int64_t{1} << 40;
  if (config.domain_lo > config.domain_hi)
    throw DomainError("solver domain is empty");
  if (config.domain_lo < -kDomainLimit || config.domain_hi > kDomainLimit)
    throw DomainError("solver domain exceeds +-2^40");
  if (config.search_budget <= 0)
    throw DomainError("search budget must be positive");
  return detail::BoundedSearch(cond, param_types, config).run();
}

inline std::vector<minilang::Ty> param_types_of(const minilang::TypedProgram& prog) {
  std::vector<minilang::Ty> out;
  out.reserve(prog.program.params.size());
  for (const auto& p : prog.program.params) out.push_back(*p.type);
  return out;
}

}  // namespace sympref
