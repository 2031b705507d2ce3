#pragma once

#include "ifeq/gridfn.hpp"
#include "ifeq/problem.hpp"
#include "ifeq/solver.hpp"

#include "json.hpp"

namespace ifeq {

struct ResidualResult {
  double sup = 0.0;
  double argmax = 0.0;
  int points_used = 0;  // check points whose compositions stayed in [-A, A]
};

/// Sup of |phi(phi(x)) - h(phi(f(x))) - g(x)| over n_check uniform points in
/// the core window [-A/2, A/2], computed with grid evaluation and forward
/// expression evaluation only — no inversion, so the check is independent of
/// the solver's path to the solution.
///
/// Check points where f(x) or phi(x) leaves [-A, A] are skipped: there the
/// interpolant's constant extension would measure the truncation of the
/// domain rather than the equation (for exponential f this affects part of
/// the core window no matter how A is chosen).
ResidualResult residual(const GridFunction& phi, const ProblemSpec& spec, int n_check);

/// Max over interior check points of |central difference of phi - Phi|.
/// The step must be at least twice the grid spacing; differencing across the
/// interpolant below its own resolution is meaningless.
double derivative_consistency(const GridFunction& phi, const GridFunction& deriv, double step,
                              int n_check = 2001);

/// Max of delta_{n+1}/delta_n over the phi-deltas past the burn-in. Ratios
/// whose denominator is below 100 machine epsilons are skipped. Throws
/// InsufficientTrace when fewer than burn_in + 3 steps exist or no ratio
/// survives the skip rule.
double observed_contraction_ratio(const IterationTrace& trace, int burn_in);

struct VerificationReport {
  double residual_sup = 0.0;
  double residual_argmax = 0.0;
  int residual_points = 0;
  double derivative_mismatch_sup = 0.0;
  double lipschitz_of_solution = 0.0;
  double derivative_bound = 0.0;
  double observed_ratio = 0.0;  // 0 when the trace is too short to measure
  double theoretical_factor = 0.0;
  // a-posteriori bound on |phi - phi*| from the last sup-delta and the base
  // contraction factor: delta * lambda / (1 - lambda)
  double phi_error_bound = 0.0;
};

/// Runs every check against a solve result: equation residual, derivative
/// consistency at fd_step_multiplier times the grid spacing, class
/// membership of the solution, and the observed contraction ratio next to
/// the theoretical factor max((L+1)/K, 2 rho/(alpha K)).
VerificationReport verify_solution(const SolutionPair& sol, const ProblemSpec& spec,
                                   double fd_step_multiplier = 10.0, int n_check = 2001,
                                   int burn_in = 5);

nlohmann::json verification_to_json(const VerificationReport& r);

}  // namespace ifeq
