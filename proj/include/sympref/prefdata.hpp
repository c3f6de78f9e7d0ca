#pragma once

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sympref/grader.hpp"
#include "sympref/support/rng.hpp"

namespace sympref {

// Sources keyed by task id, then candidate id.
using CandidateStore = std::map<std::string, std::map<std::string, std::string>>;

struct MissingCandidateError : std::runtime_error {
  MissingCandidateError(const std::string& task_id, const std::string& candidate_id)
      : std::runtime_error("no source for candidate '" + candidate_id + "' of task '" +
                           task_id + "'") {}
};

struct CodeFeedbackPair {
  std::string task_id;
  std::string source;
  GradeCategory category = GradeCategory::CompileError;
};

struct PreferencePair {
  std::string task_id;
  std::string chosen;    // graded TestPassed
  std::string rejected;  // graded below TestPassed
  GradeCategory rejected_category = GradeCategory::CompileError;
};

inline const std::string& candidate_source(const CandidateStore& store,
                                           const std::string& task_id,
                                           const std::string& candidate_id) {
  auto task_it = store.find(task_id);
  if (task_it == store.end()) throw MissingCandidateError(task_id, candidate_id);
  auto cand_it = task_it->second.find(candidate_id);
  if (cand_it == task_it->second.end()) throw MissingCandidateError(task_id, candidate_id);
  return cand_it->second;
}

// One supervised training pair per graded candidate, category verbatim.
inline std::vector<CodeFeedbackPair> build_code_feedback(
    const std::vector<GradeRecord>& grades, const CandidateStore& candidates) {
  std::vector<CodeFeedbackPair> out;
  out.reserve(grades.size());
  for (const auto& g : grades)
    out.push_back({g.task_id, candidate_source(candidates, g.task_id, g.candidate_id),
                   g.category});
  return out;
}

enum class ChosenRule { First, Uniform };

struct PrefBuildResult {
  std::vector<PreferencePair> pairs;
  std::size_t skipped_tasks = 0;  // no correct or no incorrect candidate
};

// Per task with at least one passing and one non-passing candidate: exactly
// one pair. The rejected side is drawn uniformly from every non-passing
// candidate regardless of its failure category. Tasks are processed in
// first-seen grade order off a single seeded stream, so output is a pure
// function of (grades, candidates, seed).
inline PrefBuildResult build_preference_pairs(const std::vector<GradeRecord>& grades,
                                              const CandidateStore& candidates,
                                              std::uint64_t seed,
                                              ChosenRule rule = ChosenRule::First) {
  std::vector<std::string> task_order;
  std::map<std::string, std::vector<const GradeRecord*>> by_task;
  for (const auto& g : grades) {
    auto [it, inserted] = by_task.try_emplace(g.task_id);
    if (inserted) task_order.push_back(g.task_id);
    it->second.push_back(&g);
  }

  std::mt19937_64 rng(seed);
  PrefBuildResult result;
  for (const auto& task_id : task_order) {
    std::vector<const GradeRecord*> correct;
    std::vector<const GradeRecord*> incorrect;
    for (const GradeRecord* g : by_task[task_id]) {
      (g->category == GradeCategory::TestPassed ? correct : incorrect).push_back(g);
    }
    if (correct.empty() || incorrect.empty()) {
      ++result.skipped_tasks;
      continue;
    }
    const GradeRecord* chosen =
        rule == ChosenRule::First
            ? correct.front()
            : correct[bounded_uniform(rng, correct.size())];
    const GradeRecord* rejected = incorrect[bounded_uniform(rng, incorrect.size())];
    result.pairs.push_back({task_id,
                            candidate_source(candidates, task_id, chosen->candidate_id),
                            candidate_source(candidates, task_id, rejected->candidate_id),
                            rejected->category});
  }
  return result;
}

}  // namespace sympref
