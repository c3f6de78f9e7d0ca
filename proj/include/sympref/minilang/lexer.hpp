#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sympref/minilang/ast.hpp"

namespace sympref::minilang {

enum class Tok {
  KwFn, KwIf, KwElse, KwWhile, KwReturn, KwTrue, KwFalse, KwAnd, KwOr, KwNot,
  KwInt, KwBool,
  Ident, IntLit,
  LParen, RParen, LBrace, RBrace, Comma, Colon, Semi,
  Assign, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Percent,
  End,
};

struct Token {
  Tok kind;
  std::string_view text;
  Span span;
  std::int64_t int_value = 0;  // valid for IntLit
};

class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  Result<std::vector<Token>> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, {}, {at(), at()}});
        return out;
      }
      auto tok = next();
      if (!tok.ok()) return tok.diag();
      out.push_back(tok.value());
    }
  }

 private:
  std::uint32_t at() const { return static_cast<std::uint32_t>(pos_); }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Result<Token> next() {
    const std::uint32_t start = at();
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident_or_keyword();
    if (std::isdigit(static_cast<unsigned char>(c))) return int_literal();
    ++pos_;
    auto single = [&](Tok k) { return Token{k, src_.substr(start, 1), {start, at()}}; };
    auto pair = [&](Tok k) {
      ++pos_;
      return Token{k, src_.substr(start, 2), {start, at()}};
    };
    const bool has_eq = pos_ < src_.size() && src_[pos_] == '=';
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case ',': return single(Tok::Comma);
      case ':': return single(Tok::Colon);
      case ';': return single(Tok::Semi);
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '%': return single(Tok::Percent);
      case '=': return has_eq ? pair(Tok::Eq) : single(Tok::Assign);
      case '<': return has_eq ? pair(Tok::Le) : single(Tok::Lt);
      case '>': return has_eq ? pair(Tok::Ge) : single(Tok::Gt);
      case '!':
        if (has_eq) return pair(Tok::Ne);
        return Diagnostic{Phase::Lex, "stray '!', expected '!='", {start, at()}};
      default:
        return Diagnostic{Phase::Lex, std::string("unexpected character '") + c + "'",
                          {start, at()}};
    }
  }

  Result<Token> ident_or_keyword() {
    const std::uint32_t start = at();
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view text = src_.substr(start, pos_ - start);
    Tok kind = Tok::Ident;
    if (text == "fn") kind = Tok::KwFn;
    else if (text == "if") kind = Tok::KwIf;
    else if (text == "else") kind = Tok::KwElse;
    else if (text == "while") kind = Tok::KwWhile;
    else if (text == "return") kind = Tok::KwReturn;
    else if (text == "true") kind = Tok::KwTrue;
    else if (text == "false") kind = Tok::KwFalse;
    else if (text == "and") kind = Tok::KwAnd;
    else if (text == "or") kind = Tok::KwOr;
    else if (text == "not") kind = Tok::KwNot;
    else if (text == "int") kind = Tok::KwInt;
    else if (text == "bool") kind = Tok::KwBool;
    return Token{kind, text, {start, at()}};
  }

  Result<Token> int_literal() {
    const std::uint32_t start = at();
    std::uint64_t value = 0;
    bool overflow = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      const std::uint64_t digit = static_cast<std::uint64_t>(src_[pos_] - '0');
      if (value > (UINT64_MAX - digit) / 10) overflow = true;
      if (!overflow) value = value * 10 + digit;
      ++pos_;
    }
    if (overflow || value > static_cast<std::uint64_t>(INT64_MAX))
      return Diagnostic{Phase::Lex, "integer literal out of range", {start, at()}};
    Token tok{Tok::IntLit, src_.substr(start, pos_ - start), {start, at()}};
    tok.int_value = static_cast<std::int64_t>(value);
    return tok;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace sympref::minilang
