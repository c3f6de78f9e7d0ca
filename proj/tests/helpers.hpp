#pragma once

#include <string>
#include <vector>

#include "sympref/io/corpus.hpp"
#include "sympref/minilang/parser.hpp"
#include "sympref/minilang/typecheck.hpp"
#include "sympref/testgen.hpp"

namespace test {

inline sympref::minilang::Program parse_ok(const std::string& src) {
  auto r = sympref::minilang::parse(src);
  if (!r.ok()) throw std::runtime_error("fixture does not parse: " + r.diag().to_string());
  return std::move(r).value();
}

inline sympref::minilang::TypedProgram typed(const std::string& src) {
  auto t = sympref::minilang::typecheck(parse_ok(src));
  if (!t.ok())
    throw std::runtime_error("fixture does not typecheck: " + t.diag().to_string());
  return std::move(t).value();
}

inline const std::vector<sympref::Task>& corpus() {
  static const std::vector<sympref::Task> tasks = sympref::io::load_corpus(SYMPREF_CORPUS_DIR);
  return tasks;
}

inline sympref::minilang::Value iv(std::int64_t v) {
  return sympref::minilang::Value::of_int(v);
}
inline sympref::minilang::Value bv(bool v) { return sympref::minilang::Value::of_bool(v); }

}  // namespace test
