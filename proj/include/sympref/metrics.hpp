#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sympref/grader.hpp"
#include "sympref/support/diag.hpp"

namespace sympref {

struct PassAtKInput {
  std::int64_t n = 0;  // samples generated
  std::int64_t c = 0;  // correct samples
  std::int64_t k = 0;  // top-k cutoff
};

// Probability that at least one of k samples drawn from n (c correct) is
// correct: 1 - C(n-c,k)/C(n,k), in the stable product form
// 1 - prod_{i=n-c+1..n} (1 - k/i). Exact 1 when n-c < k.
inline double pass_at_k(std::int64_t n, std::int64_t c, std::int64_t k) {
  if (c < 0 || c > n) throw DomainError("pass_at_k requires 0 <= c <= n");
  if (k < 1 || k > n) throw DomainError("pass_at_k requires 1 <= k <= n");
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (std::int64_t i = n - c + 1; i <= n; ++i)
    miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  return 1.0 - miss;
}

inline double pass_at_k(const PassAtKInput& in) { return pass_at_k(in.n, in.c, in.k); }

// Expectation over problems: the corpus-level metric.
inline double aggregate_pass_at_k(const std::vector<PassAtKInput>& per_problem,
                                  std::int64_t k) {
  if (per_problem.empty()) throw EmptyCorpusError();
  double sum = 0.0;
  for (const auto& p : per_problem) sum += pass_at_k(p.n, p.c, k);
  return sum / static_cast<double>(per_problem.size());
}

struct CriticEval {
  std::vector<GradeCategory> predictions;
  std::vector<GradeCategory> actuals;
};

struct CriticMetrics {
  double accuracy = 0.0;  // exact-match fraction
  double mae = 0.0;       // mean |predicted ordinal - actual ordinal|, in [0,3]
};

inline CriticMetrics critic_metrics(const CriticEval& eval) {
  if (eval.predictions.empty()) throw DomainError("critic evaluation is empty");
  if (eval.predictions.size() != eval.actuals.size())
    throw DomainError("prediction/actual length mismatch");
  std::size_t hits = 0;
  std::int64_t abs_sum = 0;
  for (std::size_t i = 0; i < eval.predictions.size(); ++i) {
    const int diff = ordinal(eval.predictions[i]) - ordinal(eval.actuals[i]);
    if (diff == 0) ++hits;
    abs_sum += diff < 0 ? -diff : diff;
  }
  const double n = static_cast<double>(eval.predictions.size());
  return {static_cast<double>(hits) / n, static_cast<double>(abs_sum) / n};
}

}  // namespace sympref
