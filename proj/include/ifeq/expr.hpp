#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "ifeq/errors.hpp"

namespace ifeq {

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div };

/// Immutable expression tree for a scalar real function of one variable `x`.
///
/// Trees are built through the factory functions below, which apply light
/// normalization (constant folding plus 0/1 identities). Subtrees are
/// reference counted and shared, so copies are cheap and evaluation is safe
/// to run concurrently from many threads.
class Expr {
 public:
  /// Default-constructed expression is the literal 0.
  Expr();

  static Expr variable();
  static Expr literal(double value);
  static Expr unary(UnaryOp op, const Expr& child);
  static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs);
  /// Power with a constant integer exponent. pow(e, 1) is e, pow(e, 0) is 1.
  static Expr pow(const Expr& base, long exponent);

  /// Value at x. Throws EvalDomainError on log of a non-positive value,
  /// sqrt of a negative value, division by zero, or any non-finite
  /// intermediate result; never returns an unflagged non-finite value.
  double eval(double x) const;

  /// Symbolic derivative with light simplification. Throws
  /// NonDifferentiableError if an abs node is reached.
  Expr derivative() const;

  /// Renders the tree so that parse_expr(str()) rebuilds it structurally.
  std::string str() const;

  /// Structural equality (literals compared bit for bit).
  bool same_structure(const Expr& other) const;

  /// The value when the tree is a single literal, NaN otherwise.
  double literal_value() const;

  struct Node;
  const Node& node() const { return *node_; }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the expression grammar
///
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | power
///   power  := atom ("^" integer)?
///   atom   := number | "x" | func "(" expr ")" | "(" expr ")"
///   func   := "sin"|"cos"|"exp"|"log"|"sqrt"|"abs"
///
/// Whitespace-insensitive. Throws ParseError (with byte offset and the
/// expected-token set) or UnknownIdentifierError.
Expr parse_expr(std::string_view text);

/// Shortest decimal string that converts back to exactly the same double.
std::string format_double(double value);

}  // namespace ifeq
