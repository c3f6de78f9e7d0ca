#pragma once

#include <string>
#include <vector>

#include "sympref/minilang/parser.hpp"
#include "sympref/support/parallel.hpp"
#include "sympref/testgen.hpp"

namespace sympref {

// The four ordinal feedback categories, worst to best.
enum class GradeCategory : int {
  CompileError = 0,
  RuntimeError = 1,
  TestFailed = 2,
  TestPassed = 3,
};

inline const char* grade_category_name(GradeCategory c) {
  switch (c) {
    case GradeCategory::CompileError: return "CompileError";
    case GradeCategory::RuntimeError: return "RuntimeError";
    case GradeCategory::TestFailed: return "TestFailed";
    case GradeCategory::TestPassed: return "TestPassed";
  }
  return "?";
}

inline int ordinal(GradeCategory c) { return static_cast<int>(c); }

struct PerTest {
  std::vector<minilang::Value> input;
  minilang::ExecOutcome outcome = minilang::ExecOutcome::error(minilang::RuntimeErrorKind::NoReturn);
  bool matched = false;
};

struct GradeRecord {
  std::string task_id;
  std::string candidate_id;
  GradeCategory category = GradeCategory::CompileError;
  double pass_fraction = 0.0;  // matched cases / total cases; 0 on compile error
  std::vector<PerTest> per_test;
};

struct Candidate {
  std::string id;
  std::string source;
};

// Grades one candidate against a suite. Every case is run (no short-circuit)
// so pass_fraction stays meaningful; the category is the minimum ordinal any
// case contributed. Missing parameter annotations are inferred from the
// suite's inputs; a signature that cannot accept them is a compile error in
// this statically typed setting.
inline GradeRecord grade(const std::string& candidate_source, const TestSuite& suite,
                         std::int64_t fuel = minilang::kDefaultFuel,
                         const std::string& candidate_id = "") {
  GradeRecord record;
  record.task_id = suite.task_id;
  record.candidate_id = candidate_id;
  if (suite.cases.empty()) throw DomainError("cannot grade against an empty suite");

  auto parsed = minilang::parse(candidate_source);
  if (!parsed.ok()) return record;  // CompileError
  std::vector<std::vector<minilang::Value>> inputs;
  inputs.reserve(suite.cases.size());
  for (const auto& c : suite.cases) inputs.push_back(c.input);
  auto inferred = minilang::infer_types(std::move(parsed).value(), inputs);
  if (!inferred.ok()) return record;  // arity or kind mismatch with the suite
  auto typed = minilang::typecheck(std::move(inferred).value());
  if (!typed.ok()) return record;
  const auto& prog = typed.value();

  int worst = ordinal(GradeCategory::TestPassed);
  std::size_t matched = 0;
  for (const auto& c : suite.cases) {
    PerTest pt;
    pt.input = c.input;
    pt.outcome = minilang::run(prog, c.input, fuel);
    int contributed;
    if (pt.outcome.is_error()) {
      contributed = ordinal(GradeCategory::RuntimeError);
    } else if (pt.outcome.value() == c.expected) {
      pt.matched = true;
      ++matched;
      contributed = ordinal(GradeCategory::TestPassed);
    } else {
      contributed = ordinal(GradeCategory::TestFailed);
    }
    worst = std::min(worst, contributed);
    record.per_test.push_back(std::move(pt));
  }
  record.category = static_cast<GradeCategory>(worst);
  record.pass_fraction =
      static_cast<double>(matched) / static_cast<double>(suite.cases.size());
  return record;
}

// Order-preserving batch grade; identical to element-wise grade calls.
inline std::vector<GradeRecord> grade_batch(const std::vector<Candidate>& candidates,
                                            const TestSuite& suite,
                                            std::int64_t fuel = minilang::kDefaultFuel) {
  return parallel_map<GradeRecord>(candidates.size(), [&](std::size_t i) {
    return grade(candidates[i].source, suite, fuel, candidates[i].id);
  });
}

}  // namespace sympref
