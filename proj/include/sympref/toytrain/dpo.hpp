#pragma once

#include <cmath>

#include "sympref/prefdata.hpp"
#include "sympref/toytrain/grammar.hpp"

namespace sympref::toytrain {

struct DpoConfig {
  double beta = 0.1;
  double learning_rate = 0.05;
};

struct DpoStepResult {
  double loss = 0.0;
  GrammarPolicy policy;
};

// Loss of one preference pair under the current and reference policies:
//   -log sigmoid(beta * [(log pi(c) - log pi_ref(c)) - (log pi(r) - log pi_ref(r))])
// computed via log1p for exact ln 2 at zero margin.
inline double dpo_loss(const GrammarPolicy& policy, const GrammarPolicy& reference,
                       const ChoiceTrace& chosen, const ChoiceTrace& rejected,
                       double beta) {
  const double margin = (trace_log_prob(policy, chosen) - trace_log_prob(reference, chosen)) -
                        (trace_log_prob(policy, rejected) - trace_log_prob(reference, rejected));
  return std::log1p(std::exp(-beta * margin));
}

// One gradient-descent step on the DPO loss. Only the policy moves; the
// reference is frozen. Gradient: -beta * sigmoid(-beta * margin) *
// (grad log pi(chosen) - grad log pi(rejected)).
inline DpoStepResult dpo_step(const GrammarPolicy& policy, const GrammarPolicy& reference,
                              const PreferencePair& pair, const Signature& sig,
                              const DpoConfig& config) {
  if (config.beta <= 0.0) throw DomainError("beta must be positive");
  const SampledProgram chosen = derive(policy, sig, pair.chosen);
  const SampledProgram rejected = derive(policy, sig, pair.rejected);

  DpoStepResult result;
  result.loss = dpo_loss(policy, reference, chosen.trace, rejected.trace, config.beta);

  const double margin =
      (trace_log_prob(policy, chosen.trace) - trace_log_prob(reference, chosen.trace)) -
      (trace_log_prob(policy, rejected.trace) - trace_log_prob(reference, rejected.trace));
  const double scale = config.beta / (1.0 + std::exp(config.beta * margin));

  result.policy = policy;
  // Gradients are evaluated at the incoming policy, then applied once.
  auto grad_of = [&](const ChoiceTrace& trace) {
    std::vector<std::vector<double>> g;
    for (const auto& prod : policy.productions) g.emplace_back(prod.weights.size(), 0.0);
    for (const auto& c : trace) {
      const auto p = detail::masked_softmax(policy.at(c.nt).weights, c.mask);
      for (std::size_t j = 0; j < g[static_cast<std::size_t>(c.nt)].size(); ++j) {
        if (!(c.mask & (1u << j))) continue;
        const double indicator = static_cast<int>(j) == c.alt ? 1.0 : 0.0;
        g[static_cast<std::size_t>(c.nt)][j] += indicator - p[j];
      }
    }
    return g;
  };
  const auto gc = grad_of(chosen.trace);
  const auto gr = grad_of(rejected.trace);
  for (std::size_t nt = 0; nt < result.policy.productions.size(); ++nt) {
    auto& w = result.policy.productions[nt].weights;
    for (std::size_t j = 0; j < w.size(); ++j)
      w[j] += config.learning_rate * scale * (gc[nt][j] - gr[nt][j]);
  }
  return result;
}

}  // namespace sympref::toytrain
