#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symrl/ltn/formula.hpp"

namespace symrl::ltn {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error("theory parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

namespace detail {

struct Token {
  enum class Kind { kIdent, kLParen, kRParen, kColon, kNot, kAnd, kOr, kImplies, kIff, kEnd };
  Kind kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    const int line = line_, col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Token::Kind::kEnd, "", line, col};
      return;
    }
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string ident;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ident += src_[pos_];
        bump();
      }
      tok_ = {Token::Kind::kIdent, std::move(ident), line, col};
      return;
    }
    if (c == '(') { bump(); tok_ = {Token::Kind::kLParen, "(", line, col}; return; }
    if (c == ')') { bump(); tok_ = {Token::Kind::kRParen, ")", line, col}; return; }
    if (c == ':') { bump(); tok_ = {Token::Kind::kColon, ":", line, col}; return; }
    if (c == '~') { bump(); tok_ = {Token::Kind::kNot, "~", line, col}; return; }
    if (c == '&') { bump(); tok_ = {Token::Kind::kAnd, "&", line, col}; return; }
    if (c == '|') { bump(); tok_ = {Token::Kind::kOr, "|", line, col}; return; }
    if (src_.compare(pos_, 3, "<->") == 0) {
      bump(); bump(); bump();
      tok_ = {Token::Kind::kIff, "<->", line, col};
      return;
    }
    if (src_.compare(pos_, 2, "->") == 0) {
      bump(); bump();
      tok_ = {Token::Kind::kImplies, "->", line, col};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_{};
};

}  // namespace detail

// Parses the axiom DSL:
//
//   theory   = { "learnable" IDENT } { axiom } ;
//   axiom    = "forall" IDENT ":" formula ;
//   formula  = iff ;
//   iff      = imp { "<->" imp } ;
//   imp      = or { "->" or } ;
//   or       = and { "|" and } ;
//   and      = unary { "&" unary } ;
//   unary    = "~" unary | atom ;
//   atom     = IDENT "(" IDENT ")" | "(" formula ")" ;
//
// '#' starts a line comment. Atom predicates must be one of the built-in
// type predicates or declared learnable; all axioms must quantify the same
// single variable.
class TheoryParser {
 public:
  explicit TheoryParser(const std::string& src) : lex_(src) {}

  Theory parse() {
    Theory theory;
    while (lex_.peek().kind == detail::Token::Kind::kIdent && lex_.peek().text == "learnable") {
      lex_.next();
      const auto name = expect_ident("learnable predicate name");
      if (type_predicate_channel(name.text) >= 0) {
        throw ParseError("'" + name.text + "' is a built-in type predicate", name.line, name.col);
      }
      if (theory.is_learnable(name.text)) {
        throw ParseError("duplicate learnable declaration '" + name.text + "'", name.line,
                         name.col);
      }
      theory.learnable.push_back(name.text);
    }
    while (lex_.peek().kind != detail::Token::Kind::kEnd) {
      parse_axiom(theory);
    }
    if (theory.axioms.empty()) {
      const auto& t = lex_.peek();
      throw ParseError("theory must contain at least one axiom", t.line, t.col);
    }
    return theory;
  }

 private:
  void parse_axiom(Theory& theory) {
    const auto kw = expect_ident("'forall'");
    if (kw.text != "forall") {
      throw ParseError("expected 'forall', got '" + kw.text + "'", kw.line, kw.col);
    }
    const auto var = expect_ident("quantified variable name");
    if (theory.axioms.empty()) {
      theory.variable = var.text;
    } else if (var.text != theory.variable) {
      throw ParseError("theories are single-variable: got '" + var.text + "' after '" +
                           theory.variable + "'",
                       var.line, var.col);
    }
    expect(detail::Token::Kind::kColon, "':'");
    theory.axioms.push_back(parse_iff(theory));
  }

  FormulaPtr parse_iff(const Theory& theory) {
    auto f = parse_imp(theory);
    while (lex_.peek().kind == detail::Token::Kind::kIff) {
      lex_.next();
      f = Formula::iff(std::move(f), parse_imp(theory));
    }
    return f;
  }

  FormulaPtr parse_imp(const Theory& theory) {
    auto f = parse_or(theory);
    while (lex_.peek().kind == detail::Token::Kind::kImplies) {
      lex_.next();
      f = Formula::implies(std::move(f), parse_or(theory));
    }
    return f;
  }

  FormulaPtr parse_or(const Theory& theory) {
    auto f = parse_and(theory);
    while (lex_.peek().kind == detail::Token::Kind::kOr) {
      lex_.next();
      f = Formula::lor(std::move(f), parse_and(theory));
    }
    return f;
  }

  FormulaPtr parse_and(const Theory& theory) {
    auto f = parse_unary(theory);
    while (lex_.peek().kind == detail::Token::Kind::kAnd) {
      lex_.next();
      f = Formula::land(std::move(f), parse_unary(theory));
    }
    return f;
  }

  FormulaPtr parse_unary(const Theory& theory) {
    if (lex_.peek().kind == detail::Token::Kind::kNot) {
      lex_.next();
      return Formula::lnot(parse_unary(theory));
    }
    return parse_atom(theory);
  }

  FormulaPtr parse_atom(const Theory& theory) {
    const auto& t = lex_.peek();
    if (t.kind == detail::Token::Kind::kLParen) {
      lex_.next();
      auto f = parse_iff(theory);
      expect(detail::Token::Kind::kRParen, "')'");
      return f;
    }
    if (t.kind != detail::Token::Kind::kIdent) {
      throw ParseError("expected a predicate or '('", t.line, t.col);
    }
    const auto pred = lex_.next();
    if (type_predicate_channel(pred.text) < 0 && !theory.is_learnable(pred.text)) {
      throw ParseError("undeclared predicate '" + pred.text + "'", pred.line, pred.col);
    }
    expect(detail::Token::Kind::kLParen, "'('");
    const auto var = expect_ident("variable name");
    if (var.text != theory.variable) {
      throw ParseError("variable '" + var.text + "' is not the quantified '" + theory.variable +
                           "'",
                       var.line, var.col);
    }
    expect(detail::Token::Kind::kRParen, "')'");
    return Formula::atom(pred.text, var.text);
  }

  detail::Token expect_ident(const std::string& what) {
    const auto& t = lex_.peek();
    if (t.kind != detail::Token::Kind::kIdent) {
      throw ParseError("expected " + what, t.line, t.col);
    }
    return lex_.next();
  }

  void expect(detail::Token::Kind kind, const std::string& what) {
    const auto& t = lex_.peek();
    if (t.kind != kind) {
      throw ParseError("expected " + what, t.line, t.col);
    }
    lex_.next();
  }

  detail::Lexer lex_;
};

inline Theory parse_theory(const std::string& text) { return TheoryParser(text).parse(); }

}  // namespace symrl::ltn
