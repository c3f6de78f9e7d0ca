#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sympref/minilang/parser.hpp"
#include "sympref/solver.hpp"
#include "sympref/support/rational.hpp"

namespace sympref {

enum class Difficulty { Introductory, Interview, Competition };

inline const char* difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::Introductory: return "introductory";
    case Difficulty::Interview: return "interview";
    case Difficulty::Competition: return "competition";
  }
  return "?";
}

inline std::optional<Difficulty> difficulty_from(const std::string& s) {
  if (s == "introductory") return Difficulty::Introductory;
  if (s == "interview") return Difficulty::Interview;
  if (s == "competition") return Difficulty::Competition;
  return std::nullopt;
}

struct Task {
  std::string id;
  std::string prompt;
  std::string ground_truth;  // MiniLang source
  std::vector<std::vector<minilang::Value>> samples;
  Difficulty difficulty = Difficulty::Introductory;
};

enum class TestOrigin { PathGenerated, Sample };

struct TestCase {
  std::vector<minilang::Value> input;
  minilang::Value expected;
  TestOrigin origin = TestOrigin::PathGenerated;
  std::optional<PathDescriptor> path;  // present for PathGenerated cases
};

struct TestSuite {
  std::string task_id;
  std::vector<TestCase> cases;
  int skipped_paths = 0;     // solver budget ran out, or the witness trapped
  int infeasible_paths = 0;  // no witness inside the solver domain
};

struct TaskRejected : std::runtime_error {
  TaskRejected(const std::string& task_id, const std::string& why)
      : std::runtime_error("task '" + task_id + "' rejected: " + why) {}
};

struct GenConfig {
  int loop_bound = kDefaultLoopBound;
  std::size_t path_cap = kDefaultPathCap;
  SolverConfig solver;
  std::int64_t fuel = minilang::kDefaultFuel;
  bool merge_samples = false;
  std::ostream* log = nullptr;  // per-path warnings, optional
};

// Parses, infers parameter types from samples, and typechecks a task's
// ground truth. Shared by test generation and the corpus loader.
inline minilang::TypedProgram check_ground_truth(const Task& task) {
  auto parsed = minilang::parse(task.ground_truth);
  if (!parsed.ok()) throw TaskRejected(task.id, parsed.diag().to_string());
  auto inferred = minilang::infer_types(std::move(parsed).value(), task.samples);
  if (!inferred.ok()) throw TaskRejected(task.id, inferred.diag().to_string());
  auto typed = minilang::typecheck(std::move(inferred).value());
  if (!typed.ok()) throw TaskRejected(task.id, typed.diag().to_string());
  return std::move(typed).value();
}

// One concrete test per feasible path of the ground truth, expected outputs
// from the interpreter, then optional sample merging. Duplicate inputs keep
// the first occurrence.
inline TestSuite generate_tests(const Task& task, const GenConfig& config = {}) {
  using minilang::Value;
  minilang::TypedProgram typed = check_ground_truth(task);
  const Cfg cfg = build_cfg(typed);
  const auto paths = enumerate_paths(cfg, config.loop_bound, config.path_cap);
  const auto types = param_types_of(typed);

  TestSuite suite;
  suite.task_id = task.id;
  auto seen = [&](const std::vector<Value>& input) {
    return std::any_of(suite.cases.begin(), suite.cases.end(),
                       [&](const TestCase& c) { return c.input == input; });
  };

  for (const auto& path : paths) {
    const PathCondition cond = execute_path(typed, cfg, path);
    const SolveResult res = solve(cond, types, config.solver);
    if (res.status == SolveStatus::Infeasible) {
      ++suite.infeasible_paths;
      continue;
    }
    if (res.status == SolveStatus::BudgetExhausted) {
      ++suite.skipped_paths;
      if (config.log)
        *config.log << "warning: task " << task.id << ": solver budget exhausted on path "
                    << cond.to_string() << "\n";
      continue;
    }
    const auto replay = minilang::run_traced(typed, *res.assignment, config.fuel);
    if (replay.outcome.is_error()) {
      // Witness satisfies the path condition but the ground truth still
      // traps (overflow outside any condition) or runs out of fuel.
      ++suite.skipped_paths;
      if (config.log)
        *config.log << "warning: task " << task.id << ": ground truth "
                    << replay.outcome.to_string() << " on generated input\n";
      continue;
    }
    const auto replayed = descriptor_for_trace(cfg, replay.trace);
    if (!replayed || !(*replayed == path))
      throw std::logic_error("task " + task.id + ": witness does not replay its path");
    if (seen(*res.assignment)) continue;
    suite.cases.push_back(
        {*res.assignment, replay.outcome.value(), TestOrigin::PathGenerated, path});
  }

  if (config.merge_samples) {
    for (const auto& sample : task.samples) {
      if (seen(sample)) continue;
      const auto outcome = minilang::run(typed, sample, config.fuel);
      if (outcome.is_error()) {
        if (config.log)
          *config.log << "warning: task " << task.id << ": sample input "
                      << outcome.to_string() << ", not merged\n";
        continue;
      }
      suite.cases.push_back({sample, outcome.value(), TestOrigin::Sample, std::nullopt});
    }
  }
  return suite;
}

struct SuiteStats {
  Rational mean;
  Rational median;
  std::map<std::size_t, std::size_t> histogram;  // case count -> suite frequency
};

inline SuiteStats suite_stats(const std::vector<TestSuite>& suites) {
  if (suites.empty()) throw EmptyCorpusError();
  std::vector<std::int64_t> counts;
  counts.reserve(suites.size());
  SuiteStats stats;
  std::int64_t total = 0;
  for (const auto& s : suites) {
    counts.push_back(static_cast<std::int64_t>(s.cases.size()));
    total += counts.back();
    ++stats.histogram[s.cases.size()];
  }
  stats.mean = Rational(total, static_cast<std::int64_t>(counts.size()));
  std::sort(counts.begin(), counts.end());
  const std::size_t n = counts.size();
  if (n % 2 == 1) {
    stats.median = Rational(counts[n / 2]);
  } else {
    stats.median = Rational(counts[n / 2 - 1] + counts[n / 2], 2);
  }
  return stats;
}

}  // namespace sympref
