#pragma once

#include "ifeq/expr.hpp"

namespace ifeq {

/// A strictly monotone C^1 map with a known positive floor on |derivative|.
/// The floor makes the map a bijection of the reals and bounds the inverse's
/// Lipschitz constant by 1/floor, which is what the inversion routine leans
/// on for its bracketing guarantee.
struct MonotoneMap {
  Expr forward;
  Expr derivative;
  int direction = +1;            // +1 increasing, -1 decreasing
  double derivative_floor = 0.0; // the constant K or alpha
};

/// Builds a MonotoneMap and spot-checks |derivative| >= floor on a dense
/// probe grid over [-probe_halfwidth, probe_halfwidth]. A violation (or a
/// derivative sign change) is a hard configuration error. The direction is
/// read off the derivative sign at x = 0.
MonotoneMap make_monotone_map(const Expr& forward, const Expr& derivative, double floor,
                              double probe_halfwidth = 10.0, int probe_n = 2001);

/// Solves forward(x) = y to |forward(x) - y| <= tol.
///
/// A bracket is expanded geometrically from x = direction * y / floor (the
/// derivative floor forces |forward| to grow at least linearly, so a bracket
/// always appears); inside it, a Newton step is accepted only if it stays in
/// the bracket, makes sufficient progress, and reduces |forward(x) - y|,
/// otherwise the step bisects. Throws BracketError after 200 doublings and
/// propagates non-finite forward values as EvalDomainError.
double invert(const MonotoneMap& m, double y, double tol);

/// (forward^{-1})'(y) = 1 / forward'(forward^{-1}(y)).
double inverse_derivative(const MonotoneMap& m, double y, double tol);

}  // namespace ifeq
