#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace symrl::ltn {

// One object of the discourse domain: the four type-predicate scores
// (circle, square, cross, agent) of a grid cell.
using DomainSample = std::array<double, 4>;

inline constexpr std::array<const char*, 4> kTypePredicates = {"circle", "square", "cross",
                                                               "agent"};

inline int type_predicate_channel(const std::string& name) {
  for (int i = 0; i < 4; ++i)
    if (name == kTypePredicates[i]) return i;
  return -1;
}

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Single-variable first-order formula tree.
struct Formula {
  enum class Kind { kAtom, kNot, kAnd, kOr, kImplies, kIff };

  Kind kind;
  std::string predicate;  // atoms
  std::string variable;   // atoms
  FormulaPtr lhs, rhs;    // kNot uses lhs only

  static FormulaPtr atom(std::string pred, std::string var) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::kAtom;
    f->predicate = std::move(pred);
    f->variable = std::move(var);
    return f;
  }
  static FormulaPtr lnot(FormulaPtr a) { return node(Kind::kNot, std::move(a), nullptr); }
  static FormulaPtr land(FormulaPtr a, FormulaPtr b) { return node(Kind::kAnd, std::move(a), std::move(b)); }
  static FormulaPtr lor(FormulaPtr a, FormulaPtr b) { return node(Kind::kOr, std::move(a), std::move(b)); }
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return node(Kind::kImplies, std::move(a), std::move(b)); }
  static FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return node(Kind::kIff, std::move(a), std::move(b)); }

  void collect_predicates(std::vector<std::string>& out) const {
    if (kind == Kind::kAtom) {
      for (const auto& p : out)
        if (p == predicate) return;
      out.push_back(predicate);
      return;
    }
    if (lhs) lhs->collect_predicates(out);
    if (rhs) rhs->collect_predicates(out);
  }

 private:
  static FormulaPtr node(Kind k, FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
  }
};

// Universally quantified axioms over a single variable, with predicates split
// into the built-in type predicates and declared learnable ones.
struct Theory {
  std::string variable;
  std::vector<std::string> learnable;  // declaration order
  std::vector<FormulaPtr> axioms;

  bool is_learnable(const std::string& name) const {
    for (const auto& l : learnable)
      if (l == name) return true;
    return false;
  }
};

// Łukasiewicz connectives expressed over an algebra supplying add/sub/
// min/max and the lattice constants. One evaluator serves every
// instantiation: plain doubles for inference, tape tensors for training,
// exact tenth-integers for the algebra identity suite.
//
//   ~a      = 1 - a
//   a & b   = max(0, a + b - 1)
//   a | b   = min(1, a + b)
//   a -> b  = min(1, 1 - a + b)
//   a <-> b = min(a -> b, b -> a)
template <class Alg>
typename Alg::Value eval_formula(const Formula& f, Alg& alg) {
  using K = Formula::Kind;
  const auto imp = [&alg](typename Alg::Value a, typename Alg::Value b) {
    return alg.min(alg.add(alg.sub(alg.one(), a), b), alg.one());
  };
  switch (f.kind) {
    case K::kAtom:
      return alg.atom(f.predicate);
    case K::kNot:
      return alg.sub(alg.one(), eval_formula(*f.lhs, alg));
    case K::kAnd: {
      auto l = eval_formula(*f.lhs, alg);
      auto r = eval_formula(*f.rhs, alg);
      return alg.max(alg.sub(alg.add(l, r), alg.one()), alg.zero());
    }
    case K::kOr: {
      auto l = eval_formula(*f.lhs, alg);
      auto r = eval_formula(*f.rhs, alg);
      return alg.min(alg.add(l, r), alg.one());
    }
    case K::kImplies: {
      auto l = eval_formula(*f.lhs, alg);
      auto r = eval_formula(*f.rhs, alg);
      return imp(l, r);
    }
    case K::kIff: {
      auto l = eval_formula(*f.lhs, alg);
      auto r = eval_formula(*f.rhs, alg);
      return alg.min(imp(l, r), imp(r, l));
    }
  }
  throw std::logic_error("eval_formula: unknown node kind");
}

// Plain 64-bit truth values.
struct ScalarAlgebra {
  using Value = double;
  std::function<double(const std::string&)> lookup;

  double one() const { return 1.0; }
  double zero() const { return 0.0; }
  double add(double a, double b) const { return a + b; }
  double sub(double a, double b) const { return a - b; }
  double min(double a, double b) const { return a < b ? a : b; }
  double max(double a, double b) const { return a > b ? a : b; }
  double atom(const std::string& name) const { return lookup(name); }
};

// Exact truth values in tenths (0..10 maps to 0.0..1.0). Łukasiewicz
// connectives are closed over this grid, so identity checks can demand
// equality instead of a float tolerance.
struct TenthsAlgebra {
  using Value = int;
  std::function<int(const std::string&)> lookup;

  int one() const { return 10; }
  int zero() const { return 0; }
  int add(int a, int b) const { return a + b; }
  int sub(int a, int b) const { return a - b; }
  int min(int a, int b) const { return a < b ? a : b; }
  int max(int a, int b) const { return a > b ? a : b; }
  int atom(const std::string& name) const { return lookup(name); }
};

}  // namespace symrl::ltn
