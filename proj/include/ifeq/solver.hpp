#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "ifeq/exec.hpp"
#include "ifeq/gridfn.hpp"
#include "ifeq/problem.hpp"

namespace ifeq {

/// Per-problem state shared by the operator kernels: the node set and the
/// f-inverse data at every node. f^{-1} does not depend on the iterate, so
/// it is inverted once per node here instead of once per sweep.
struct SolverWorkspace {
  explicit SolverWorkspace(const ProblemSpec& spec, ExecPolicy exec = ExecPolicy::Parallel);

  ProblemSpec spec;  // owned copy; expression trees are shared, so this is cheap
  ExecPolicy exec;
  std::shared_ptr<const std::vector<double>> nodes;
  std::vector<double> f_inv;        // u_i = f^{-1}(x_i)
  std::vector<double> f_inv_deriv;  // (f^{-1})'(x_i) = 1 / f'(u_i)
  std::vector<double> g_at_u;       // g(u_i)
  std::vector<double> g_prime_at_u; // g'(u_i)
};

/// The base operator: (Lambda phi)(x) = h^{-1}( phi(phi(u)) - g(u) ) with
/// u = f^{-1}(x), evaluated at every node. phi(phi(u)) is composition.
GridFunction apply_lambda(const GridFunction& phi, const SolverWorkspace& ws);

/// The fiber operator:
///   Psi(phi, Phi)(x) = (h^{-1})'(phi(phi(u)) - g(u))
///                      * ( Phi(phi(u)) * Phi(u) - g'(u) ) * (f^{-1})'(x).
GridFunction apply_psi(const GridFunction& phi, const GridFunction& deriv,
                       const SolverWorkspace& ws);

/// One application of the bundle map Gamma(phi, Phi) = (Lambda(phi),
/// Psi(phi, Phi)), sharing the h-inversion between the two coordinates.
/// Bit-identical to calling apply_lambda and apply_psi separately.
std::pair<GridFunction, GridFunction> gamma_step(const GridFunction& phi,
                                                 const GridFunction& deriv,
                                                 const SolverWorkspace& ws);

// Convenience overloads building a temporary workspace.
GridFunction apply_lambda(const GridFunction& phi, const ProblemSpec& spec,
                          ExecPolicy exec = ExecPolicy::Parallel);
GridFunction apply_psi(const GridFunction& phi, const GridFunction& deriv,
                       const ProblemSpec& spec, ExecPolicy exec = ExecPolicy::Parallel);

enum class StopReason { Converged, MaxIterExceeded };

struct IterationTrace {
  struct Step {
    int n;
    double delta_phi;    // sup |phi_{n} - phi_{n-1}|
    double delta_deriv;  // sup |Phi_{n} - Phi_{n-1}|
    double residual;     // equation residual of phi_n on the core window
    double seconds;      // wall time of the step
  };
  std::vector<Step> steps;
  StopReason stop = StopReason::MaxIterExceeded;
};

struct SolutionPair {
  GridFunction phi_star;
  GridFunction deriv_star;  // Phi*, the candidate derivative
  ConditionReport report;
  IterationTrace trace;
  bool converged() const { return trace.stop == StopReason::Converged; }
};

/// Runs the fiber iteration (phi_{n+1}, Phi_{n+1}) = Gamma(phi_n, Phi_n)
/// until max(delta_phi, delta_Phi) <= tol or max_iter is hit (the partial
/// trace is returned with StopReason::MaxIterExceeded). Seeds must satisfy
/// Lip(phi0) <= L and |Phi0| <= rho; an iterate escaping its class beyond
/// 1e-6 relative slack throws MembershipDrift (discretization too coarse).
SolutionPair iterate_fiber(const GridFunction& phi0, const GridFunction& deriv0,
                           const ProblemSpec& spec, double tol, int max_iter,
                           ExecPolicy exec = ExecPolicy::Parallel);

/// Zero seed pair on the problem's grid; satisfies Phi0 = (phi0)' exactly
/// and lies in every admissible class.
std::pair<GridFunction, GridFunction> zero_seeds(const ProblemSpec& spec);

/// Interval halfwidth from the boundedness recursion
///   b <- max(|h^{-1}(b + g_bound)|, |h^{-1}(-(b + g_bound))|)
/// iterated from 0 to its fixed point (the map contracts at rate 1/K), then
/// doubled; floored at 10.
double default_interval(const MonotoneMap& h_map, double g_bound, double inverse_tol);
double default_interval(const ProblemSpec& spec);

/// CSV with header `n,delta_phi,delta_Phi,residual,seconds`.
void write_trace_csv(const IterationTrace& trace, std::ostream& out);

}  // namespace ifeq
