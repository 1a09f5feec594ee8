#ifndef NCCONV_EXPR_HPP
#define NCCONV_EXPR_HPP

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ncconv/convolution.hpp"

namespace ncconv {

// Measure-expression AST. Grammar (whitespace-insensitive):
//   expr    := primary (infix primary)*            left-associative
//   infix   := "|>" | "(+)" | "(u)"                mono_add / free_add / bool_add
//   primary := call | "(" expr ")"
//   call    := IDENT "(" args ")"
//   args    := (number | expr) ("," (number | expr))*
// Literals: dirac(x), atoms(x1,w1,...), bern(p,a,b), uniform_circle,
// semicircle(m,v). Unary maps: translate(e,x), dilate(e,a), rotate(e,t).
// Binary: mono_add, bool_add, free_add, mono_mult, mono_mult_alt, bool_mult,
// bool_mult_new, free_mult.

struct MeasureExpr;
using ExprPtr = std::shared_ptr<const MeasureExpr>;

struct DiracLit {
  double x;
};
struct AtomsLit {
  std::vector<Atom> atoms;
};
struct BernLit {
  double p, a, b;  // p delta_a + (1-p) delta_b
};
struct UniformCircleLit {};
struct SemicircleLit {
  double mean, variance;
};
enum class UnaryMap { Translate, Dilate, Rotate };
struct UnaryExpr {
  UnaryMap map;
  double parameter;
  ExprPtr child;
};
enum class BinaryOp {
  MonoAdd,
  BoolAdd,
  FreeAdd,
  MonoMult,
  MonoMultAlt,
  BoolMult,
  BoolMultNew,
  FreeMult,
};
struct BinaryExpr {
  BinaryOp op;
  bool sugared;  // written with the infix form
  ExprPtr lhs;
  ExprPtr rhs;
};

struct MeasureExpr {
  std::variant<DiracLit, AtomsLit, BernLit, UniformCircleLit, SemicircleLit,
               UnaryExpr, BinaryExpr>
      node;
};

MeasureExpr parse_expression(std::string_view text);

// Canonical form; parse . pretty_print is the identity on canonical input.
std::string pretty_print(const MeasureExpr& expr);

struct EvalOptions {
  std::optional<Domain> literal_domain;  // force atomic literals onto a domain
  SolveOptions solve;
  int bercovici_class_samples = 200;
  std::uint64_t seed = default_seed();
};

struct EvalValue {
  std::variant<AtomicMeasure, TransformHandle, Undefined> value;
  Domain domain;

  bool is_atomic() const { return std::holds_alternative<AtomicMeasure>(value); }
  bool is_undefined() const { return std::holds_alternative<Undefined>(value); }
  const AtomicMeasure& atoms() const { return std::get<AtomicMeasure>(value); }
  const Undefined& undefined() const { return std::get<Undefined>(value); }
  TransformHandle handle() const;
};

// Type-checks domains (inference per operation) and evaluates.
EvalValue evaluate_expression(const MeasureExpr& expr, const EvalOptions& opts = {});

// The operation of the top-level binary node after domain inference, plus
// its atomic operands; used by `model --dump`. Throws unless the root is a
// model-backed convolution of atomic operands.
struct RootConvolution {
  OpKind op;
  AtomicMeasure mu;
  AtomicMeasure nu;
};
RootConvolution root_convolution(const MeasureExpr& expr, const EvalOptions& opts = {});

}  // namespace ncconv

#endif
