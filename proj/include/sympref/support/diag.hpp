#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace sympref {

// Half-open byte range into the source text.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

enum class Phase { Lex, Parse, Type };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Lex: return "lex";
    case Phase::Parse: return "parse";
    case Phase::Type: return "type";
  }
  return "?";
}

struct Diagnostic {
  Phase phase = Phase::Parse;
  std::string message;
  Span span;

  std::string to_string() const {
    return std::string(phase_name(phase)) + " error at [" +
           std::to_string(span.begin) + "," + std::to_string(span.end) + "): " + message;
  }
};

// Success-or-diagnostic result for the language front end.
template <class T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}
  Result(Diagnostic diag) : data_(std::move(diag)) {}

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(data_); }
  T& value() & { return std::get<T>(data_); }
  T&& value() && { return std::get<T>(std::move(data_)); }

  const Diagnostic& diag() const { return std::get<Diagnostic>(data_); }

 private:
  std::variant<T, Diagnostic> data_;
};

// Violated operation preconditions (metric domains, config ranges).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyCorpusError : std::runtime_error {
  EmptyCorpusError() : std::runtime_error("empty corpus") {}
};

}  // namespace sympref
