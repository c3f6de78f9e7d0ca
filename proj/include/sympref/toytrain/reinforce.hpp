#pragma once

#include <vector>

#include "sympref/toytrain/grammar.hpp"

namespace sympref::toytrain {

struct Episode {
  ChoiceTrace trace;
  double reward = 0.0;
};

// Accumulates sum over episodes of advantage * grad log pi(trace) into a
// per-production gradient table. Exposed separately so finite-difference
// checks can compare against the same accumulation the update uses.
inline std::vector<std::vector<double>> reinforce_gradient(
    const GrammarPolicy& policy, const std::vector<Episode>& episodes, double baseline) {
  std::vector<std::vector<double>> grad;
  grad.reserve(policy.productions.size());
  for (const auto& prod : policy.productions)
    grad.emplace_back(prod.weights.size(), 0.0);
  for (const auto& ep : episodes) {
    const double advantage = ep.reward - baseline;
    if (advantage == 0.0) continue;
    for (const auto& c : ep.trace) {
      const auto p = detail::masked_softmax(policy.at(c.nt).weights, c.mask);
      auto& g = grad[static_cast<std::size_t>(c.nt)];
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (!(c.mask & (1u << j))) continue;
        const double indicator = static_cast<int>(j) == c.alt ? 1.0 : 0.0;
        g[j] += advantage * (indicator - p[j]);
      }
    }
  }
  return grad;
}

// One policy-gradient ascent step on (reward - baseline) * log pi(trace).
// Returns the updated policy; the input policy is untouched.
inline GrammarPolicy reinforce_update(const GrammarPolicy& policy,
                                      const std::vector<Episode>& episodes,
                                      double learning_rate, double baseline) {
  const auto grad = reinforce_gradient(policy, episodes, baseline);
  GrammarPolicy next = policy;
  for (std::size_t nt = 0; nt < next.productions.size(); ++nt) {
    auto& w = next.productions[nt].weights;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] += learning_rate * grad[nt][j];
  }
  return next;
}

// Surrogate objective the gradient above differentiates; used by tests.
inline double reinforce_objective(const GrammarPolicy& policy,
                                  const std::vector<Episode>& episodes, double baseline) {
  double total = 0.0;
  for (const auto& ep : episodes)
    total += (ep.reward - baseline) * trace_log_prob(policy, ep.trace);
  return total;
}

}  // namespace sympref::toytrain
