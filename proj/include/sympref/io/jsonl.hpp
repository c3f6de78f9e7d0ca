#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sympref/grader.hpp"
#include "sympref/prefdata.hpp"
#include "sympref/testgen.hpp"
#include "sympref/toytrain/critic.hpp"

namespace sympref::io {

using nlohmann::json;

// Malformed or inconsistent input data; the CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json to_json(const minilang::Value& v) {
  if (v.is_int()) return v.as_int();
  return v.as_bool();
}

inline minilang::Value value_from_json(const json& j) {
  if (j.is_boolean()) return minilang::Value::of_bool(j.get<bool>());
  if (j.is_number_integer()) return minilang::Value::of_int(j.get<std::int64_t>());
  throw DataError("expected an integer or boolean value, got: " + j.dump());
}

inline json to_json(const std::vector<minilang::Value>& tuple) {
  json arr = json::array();
  for (const auto& v : tuple) arr.push_back(to_json(v));
  return arr;
}

inline std::vector<minilang::Value> tuple_from_json(const json& j) {
  if (!j.is_array()) throw DataError("expected an input tuple array, got: " + j.dump());
  std::vector<minilang::Value> out;
  for (const auto& v : j) out.push_back(value_from_json(v));
  return out;
}

inline json to_json(const PathDescriptor& path) {
  json arr = json::array();
  for (const auto dir : path.edge_choices)
    arr.push_back(dir == BranchDir::True ? "T" : "F");
  return arr;
}

inline PathDescriptor path_from_json(const json& j) {
  PathDescriptor d;
  for (const auto& label : j) {
    const auto s = label.get<std::string>();
    if (s != "T" && s != "F") throw DataError("path label must be \"T\" or \"F\"");
    d.edge_choices.push_back(s == "T" ? BranchDir::True : BranchDir::False);
  }
  return d;
}

inline json to_json(const TestSuite& suite) {
  json cases = json::array();
  for (const auto& c : suite.cases) {
    json entry = {{"input", to_json(c.input)},
                  {"expected", to_json(c.expected)},
                  {"origin", c.origin == TestOrigin::PathGenerated ? "path" : "sample"}};
    if (c.path) entry["path"] = to_json(*c.path);
    cases.push_back(std::move(entry));
  }
  return {{"task_id", suite.task_id},
          {"cases", std::move(cases)},
          {"skipped_paths", suite.skipped_paths},
          {"infeasible_paths", suite.infeasible_paths}};
}

inline TestSuite suite_from_json(const json& j) {
  try {
    TestSuite suite;
    suite.task_id = j.at("task_id").get<std::string>();
    suite.skipped_paths = j.at("skipped_paths").get<int>();
    suite.infeasible_paths = j.at("infeasible_paths").get<int>();
    for (const auto& c : j.at("cases")) {
      TestCase tc;
      tc.input = tuple_from_json(c.at("input"));
      tc.expected = value_from_json(c.at("expected"));
      const auto origin = c.at("origin").get<std::string>();
      if (origin != "path" && origin != "sample")
        throw DataError("unknown test case origin: " + origin);
      tc.origin = origin == "path" ? TestOrigin::PathGenerated : TestOrigin::Sample;
      if (c.contains("path")) tc.path = path_from_json(c.at("path"));
      suite.cases.push_back(std::move(tc));
    }
    return suite;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad suite record: ") + e.what());
  }
}

inline GradeCategory category_from_json(const json& j) {
  const int v = j.get<int>();
  if (v < 0 || v > 3) throw DataError("category ordinal out of range: " + j.dump());
  return static_cast<GradeCategory>(v);
}

inline json to_json(const minilang::ExecOutcome& outcome) {
  if (outcome.is_returned()) return {{"returned", to_json(outcome.value())}};
  return {{"error", minilang::runtime_error_name(outcome.error_kind())}};
}

inline minilang::ExecOutcome outcome_from_json(const json& j) {
  using minilang::RuntimeErrorKind;
  if (j.contains("returned"))
    return minilang::ExecOutcome::returned(value_from_json(j.at("returned")));
  const auto name = j.at("error").get<std::string>();
  for (const auto kind :
       {RuntimeErrorKind::DivByZero, RuntimeErrorKind::ModByZero, RuntimeErrorKind::Overflow,
        RuntimeErrorKind::FuelExceeded, RuntimeErrorKind::NoReturn}) {
    if (name == minilang::runtime_error_name(kind))
      return minilang::ExecOutcome::error(kind);
  }
  throw DataError("unknown runtime error kind: " + name);
}

inline json to_json(const GradeRecord& record) {
  json per_test = json::array();
  for (const auto& pt : record.per_test)
    per_test.push_back({{"input", to_json(pt.input)},
                        {"outcome", to_json(pt.outcome)},
                        {"matched", pt.matched}});
  return {{"task_id", record.task_id},
          {"candidate_id", record.candidate_id},
          {"category", ordinal(record.category)},
          {"pass_fraction", record.pass_fraction},
          {"per_test", std::move(per_test)}};
}

inline GradeRecord grade_from_json(const json& j) {
  try {
    GradeRecord record;
    record.task_id = j.at("task_id").get<std::string>();
    record.candidate_id = j.at("candidate_id").get<std::string>();
    record.category = category_from_json(j.at("category"));
    record.pass_fraction = j.at("pass_fraction").get<double>();
    for (const auto& pt : j.at("per_test")) {
      PerTest entry;
      entry.input = tuple_from_json(pt.at("input"));
      entry.outcome = outcome_from_json(pt.at("outcome"));
      entry.matched = pt.at("matched").get<bool>();
      record.per_test.push_back(std::move(entry));
    }
    return record;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad grade record: ") + e.what());
  }
}

inline json to_json(const PreferencePair& pair) {
  return {{"task_id", pair.task_id},
          {"chosen", pair.chosen},
          {"rejected", pair.rejected},
          {"rejected_category", ordinal(pair.rejected_category)}};
}

inline PreferencePair pref_from_json(const json& j) {
  try {
    PreferencePair pair;
    pair.task_id = j.at("task_id").get<std::string>();
    pair.chosen = j.at("chosen").get<std::string>();
    pair.rejected = j.at("rejected").get<std::string>();
    pair.rejected_category = category_from_json(j.at("rejected_category"));
    return pair;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad preference record: ") + e.what());
  }
}

inline json to_json(const toytrain::CriticModel& model) {
  return {{"dim", model.dim},
          {"bias", model.bias},
          {"weights", model.weights}};
}

inline toytrain::CriticModel critic_from_json(const json& j) {
  try {
    toytrain::CriticModel model;
    model.dim = j.at("dim").get<int>();
    model.bias = j.at("bias").get<std::array<double, 4>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    if (model.weights.size() != 4 * static_cast<std::size_t>(model.dim))
      throw DataError("critic weight matrix has the wrong shape");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad critic model: ") + e.what());
  }
}

// One JSON document per non-empty line.
inline std::vector<json> read_jsonl(std::istream& in) {
  std::vector<json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <class T>
void write_jsonl(std::ostream& out, const std::vector<T>& records) {
  for (const auto& r : records) out << to_json(r).dump() << "\n";
}

}  // namespace sympref::io
