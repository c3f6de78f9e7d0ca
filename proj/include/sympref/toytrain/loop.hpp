#pragma once

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "sympref/metrics.hpp"
#include "sympref/prefdata.hpp"
#include "sympref/testgen.hpp"
#include "sympref/toytrain/critic.hpp"
#include "sympref/toytrain/dpo.hpp"
#include "sympref/toytrain/grammar.hpp"
#include "sympref/toytrain/reinforce.hpp"

namespace sympref::toytrain {

// Reward assigned to each grade category; must rise with the ordinal.
struct RewardMap {
  std::array<double, 4> by_category{-1.0, -0.6, -0.3, 1.0};

  double of(GradeCategory c) const { return by_category[static_cast<std::size_t>(ordinal(c))]; }

  void validate() const {
    for (int i = 1; i < 4; ++i)
      if (by_category[static_cast<std::size_t>(i)] <=
          by_category[static_cast<std::size_t>(i - 1)])
        throw DomainError("reward map must be strictly increasing with category");
  }
};

struct PreparedTask {
  Task task;
  minilang::TypedProgram typed;
  Signature signature;
  TestSuite suite;
};

inline std::vector<PreparedTask> prepare_corpus(const std::vector<Task>& tasks,
                                                const GenConfig& gen = {}) {
  std::vector<PreparedTask> out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) {
    PreparedTask pt;
    pt.task = task;
    pt.typed = check_ground_truth(task);
    pt.signature = signature_of(pt.typed);
    pt.suite = generate_tests(task, gen);
    if (pt.suite.cases.empty()) throw TaskRejected(task.id, "no feasible test cases");
    out.push_back(std::move(pt));
  }
  return out;
}

namespace detail {

// Counts how often each grammar alternative structurally occurs in a
// program. Constructs outside the grammar's template language (rich while
// bodies, out-of-alphabet literals) contribute their children only.
class UsageCounter {
 public:
  UsageCounter() {
    for (int nt = 0; nt < NtCount; ++nt)
      counts_.emplace_back(static_cast<std::size_t>(nt_alternative_count(nt)), 0);
  }

  void add(const minilang::Program& prog, const Signature& sig) {
    sig_ = &sig;
    stmt_list(prog.body);
  }

  const std::vector<std::vector<int>>& counts() const { return counts_; }

 private:
  enum class Want { Int, Bool, Any };

  void bump(int nt, int alt) { ++counts_[static_cast<std::size_t>(nt)][static_cast<std::size_t>(alt)]; }

  void stmt_list(const std::vector<minilang::Stmt>& stmts) {
    using namespace minilang;
    for (const auto& s : stmts) {
      if (const auto* r = std::get_if<Return>(&s.node)) {
        bump(NtStmt, 0);
        expr(r->value, Want::Any);
      } else if (const auto* a = std::get_if<Assign>(&s.node)) {
        bump(NtStmt, 1);
        var(a->target);
        expr(a->value, Want::Any);
      } else if (const auto* i = std::get_if<If>(&s.node)) {
        bump(NtStmt, 2);
        expr(i->cond, Want::Bool);
        stmt_list(i->then_body);
        stmt_list(i->else_body);
      } else {
        const auto& w = std::get<While>(s.node);
        bump(NtStmt, 3);
        expr(w.cond, Want::Bool);
        stmt_list(w.body);
      }
    }
  }

  void expr(const minilang::ExprPtr& e, Want want) {
    using namespace minilang;
    if (const auto* lit = std::get_if<IntLit>(&e->node)) {
      bump(NtIntExpr, 0);
      for (std::size_t i = 0; i < kLiteralAlphabet.size(); ++i)
        if (kLiteralAlphabet[i] == lit->value) bump(NtIntLit, static_cast<int>(i));
      return;
    }
    if (const auto* lit = std::get_if<BoolLit>(&e->node)) {
      bump(NtBoolExpr, lit->value ? 0 : 1);
      return;
    }
    if (const auto* v = std::get_if<Var>(&e->node)) {
      Want got = want;
      if (got == Want::Any) {
        got = Want::Int;  // scratch variables are integers in the grammar
        for (const auto& [name, ty] : sig_->params)
          if (name == v->name && ty == Ty::Bool) got = Want::Bool;
      }
      bump(got == Want::Int ? NtIntExpr : NtBoolExpr, got == Want::Int ? 1 : 2);
      var(v->name);
      return;
    }
    if (const auto* u = std::get_if<Unary>(&e->node)) {
      if (u->op == UnOp::Neg) {
        bump(NtIntExpr, 3);
        expr(u->operand, Want::Int);
      } else {
        bump(NtBoolExpr, 6);
        expr(u->operand, Want::Bool);
      }
      return;
    }
    const auto& b = std::get<Binary>(e->node);
    if (is_arith(b.op)) {
      bump(NtIntExpr, 2);
      constexpr std::array<BinOp, 5> ops = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div,
                                            BinOp::Mod};
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i] == b.op) bump(NtArithOp, static_cast<int>(i));
      expr(b.lhs, Want::Int);
      expr(b.rhs, Want::Int);
      return;
    }
    if (is_compare(b.op)) {
      bump(NtBoolExpr, 3);
      constexpr std::array<BinOp, 6> ops = {BinOp::Lt, BinOp::Le, BinOp::Gt,
                                            BinOp::Ge, BinOp::Eq, BinOp::Ne};
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i] == b.op) bump(NtCmpOp, static_cast<int>(i));
      expr(b.lhs, Want::Int);
      expr(b.rhs, Want::Int);
      return;
    }
    bump(NtBoolExpr, b.op == BinOp::And ? 4 : 5);
    expr(b.lhs, Want::Bool);
    expr(b.rhs, Want::Bool);
  }

  void var(const std::string& name) {
    for (std::size_t i = 0; i < sig_->params.size() && i < kMaxParams; ++i) {
      if (sig_->params[i].first == name) {
        bump(NtVarPick, static_cast<int>(i));
        return;
      }
    }
    bump(NtVarPick, kScratchAlt);
  }

  std::vector<std::vector<int>> counts_;
  const Signature* sig_ = nullptr;
};

}  // namespace detail

// Supervised warm-up analog: weights initialized to log(1 + usage count)
// over the corpus ground truths, so sampling starts near the corpus
// distribution instead of uniform.
inline GrammarPolicy warmup_policy(const std::vector<PreparedTask>& corpus,
                                   int max_depth = 5) {
  detail::UsageCounter counter;
  for (const auto& pt : corpus) counter.add(pt.typed.program, pt.signature);
  GrammarPolicy policy = make_policy(max_depth);
  for (int nt = 0; nt < NtCount; ++nt) {
    auto& w = policy.at(nt).weights;
    for (std::size_t j = 0; j < w.size(); ++j)
      w[j] = std::log(1.0 + counter.counts()[static_cast<std::size_t>(nt)][j]);
  }
  return policy;
}

enum class TrainMode { Rl, Dpo };
enum class CriticKind { Untrained, Trained, Oracle };

struct LoopConfig {
  TrainMode mode = TrainMode::Rl;
  int iterations = 30;
  int samples_per_task = 100;
  RewardMap reward_map;
  std::uint64_t seed = 0;
  double actor_learning_rate = 0.002;
  CriticKind critic = CriticKind::Trained;
  int critic_epochs = 400;
  double critic_learning_rate = 2.0;
  int critic_dim = kCriticDim;
  DpoConfig dpo;
  std::int64_t fuel = 1000;
  std::int64_t k = 5;
  int max_depth = 5;
  std::ostream* log = nullptr;
};

struct IterationMetrics {
  int iteration = 0;
  double mean_reward = 0.0;  // true categories mapped through the reward map
  double pass_at_k = 0.0;    // over n = samples_per_task with c = passing samples
  double mean_signal = 0.0;  // RL: critic-derived reward; DPO: mean pair loss
};

struct TrainOutcome {
  GrammarPolicy policy;
  CriticModel critic;
  std::vector<IterationMetrics> history;
};

// Desk-scale actor fine-tuning loop. RL mode: sample
// programs per task, let the critic judge them, update the actor with
// REINFORCE against the batch-mean baseline. DPO mode: build one preference
// pair per eligible task each iteration and take DPO steps against the
// frozen warm-up reference.
inline TrainOutcome run_training_loop(const std::vector<PreparedTask>& corpus,
                                      const LoopConfig& config) {
  if (corpus.empty()) throw EmptyCorpusError();
  if (config.iterations < 1) throw DomainError("iterations must be >= 1");
  if (config.samples_per_task < 1) throw DomainError("samples_per_task must be >= 1");
  if (config.k < 1 || config.k > config.samples_per_task)
    throw DomainError("need 1 <= k <= samples_per_task");
  config.reward_map.validate();

  std::mt19937_64 rng(config.seed);
  TrainOutcome out;
  out.policy = warmup_policy(corpus, config.max_depth);
  out.critic = make_critic(config.critic_dim);

  if (config.mode == TrainMode::Rl && config.critic == CriticKind::Trained) {
    // Critic phase: label warm-up samples with the grader, then fit.
    std::vector<CodeFeedbackPair> pairs;
    pairs.reserve(corpus.size() * static_cast<std::size_t>(config.samples_per_task));
    for (const auto& pt : corpus) {
      for (int s = 0; s < config.samples_per_task; ++s) {
        auto sp = sample_program(out.policy, pt.signature, rng);
        const auto rec = grade(sp.source, pt.suite, config.fuel);
        pairs.push_back({pt.task.id, std::move(sp.source), rec.category});
      }
    }
    out.critic =
        train_critic(pairs, config.critic_epochs, config.critic_learning_rate,
                     config.critic_dim)
            .model;
  }

  const GrammarPolicy reference = out.policy;  // DPO stays anchored here
  std::map<std::string, const Signature*> sig_by_task;
  for (const auto& pt : corpus) sig_by_task[pt.task.id] = &pt.signature;

  for (int it = 0; it < config.iterations; ++it) {
    std::vector<Episode> episodes;
    std::vector<GradeRecord> iter_grades;
    CandidateStore iter_sources;
    std::vector<PassAtKInput> passk;
    double true_sum = 0.0;
    double signal_sum = 0.0;
    std::size_t total = 0;

    for (const auto& pt : corpus) {
      std::int64_t correct = 0;
      for (int s = 0; s < config.samples_per_task; ++s) {
        auto sp = sample_program(out.policy, pt.signature, rng);
        auto rec = grade(sp.source, pt.suite, config.fuel, std::to_string(s));
        rec.task_id = pt.task.id;
        const GradeCategory truth = rec.category;
        true_sum += config.reward_map.of(truth);
        ++total;
        if (truth == GradeCategory::TestPassed) ++correct;
        if (config.mode == TrainMode::Rl) {
          GradeCategory judged = truth;
          if (config.critic != CriticKind::Oracle)
            judged = predict(out.critic, sp.source).category;
          const double signal = config.reward_map.of(judged);
          signal_sum += signal;
          episodes.push_back({std::move(sp.trace), signal});
        } else {
          iter_sources[pt.task.id][rec.candidate_id] = sp.source;
          iter_grades.push_back(std::move(rec));
        }
      }
      passk.push_back({config.samples_per_task, correct, config.k});
    }

    IterationMetrics row;
    row.iteration = it;
    row.mean_reward = true_sum / static_cast<double>(total);
    row.pass_at_k = aggregate_pass_at_k(passk, config.k);

    if (config.mode == TrainMode::Rl) {
      const double baseline = signal_sum / static_cast<double>(total);
      row.mean_signal = baseline;
      out.policy =
          reinforce_update(out.policy, episodes, config.actor_learning_rate, baseline);
    } else {
      const auto built = build_preference_pairs(iter_grades, iter_sources, rng());
      if (built.pairs.empty()) {
        if (config.log)
          *config.log << "warning: iteration " << it
                      << ": no eligible preference pairs, policy unchanged\n";
      } else {
        double loss_sum = 0.0;
        for (const auto& pair : built.pairs) {
          auto res = dpo_step(out.policy, reference, pair, *sig_by_task.at(pair.task_id),
                              config.dpo);
          out.policy = std::move(res.policy);
          loss_sum += res.loss;
        }
        row.mean_signal = loss_sum / static_cast<double>(built.pairs.size());
      }
    }
    out.history.push_back(row);
  }
  return out;
}

}  // namespace sympref::toytrain
