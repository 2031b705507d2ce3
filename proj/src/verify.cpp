#include "ifeq/verify.hpp"

#include <cmath>
#include <limits>

namespace ifeq {

ResidualResult residual(const GridFunction& phi, const ProblemSpec& spec, int n_check) {
  if (n_check < 2) throw ConfigError("residual: n_check must be at least 2");
  const double A = spec.interval_halfwidth;
  const double lo = -0.5 * A, hi = 0.5 * A;
  const double denom = static_cast<double>(n_check - 1);

  ResidualResult r;
  r.argmax = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < n_check; ++j) {
    const double x = (lo * (denom - j) + hi * j) / denom;
    const double fx = spec.f.eval(x);
    if (std::fabs(fx) > A) continue;
    const double px = phi(x);
    if (std::fabs(px) > A) continue;
    const double value = std::fabs(phi(px) - spec.h.eval(phi(fx)) - spec.g.eval(x));
    ++r.points_used;
    if (value > r.sup || r.points_used == 1) {
      r.sup = value;
      r.argmax = x;
    }
  }
  if (r.points_used == 0)
    throw ConfigError("residual: no check point keeps the compositions inside the interval");
  return r;
}

double derivative_consistency(const GridFunction& phi, const GridFunction& deriv, double step,
                              int n_check) {
  if (!(step > 0)) throw ConfigError("derivative_consistency: step must be positive");
  if (n_check < 2) throw ConfigError("derivative_consistency: n_check must be at least 2");
  const auto& xs = phi.nodes();
  double spacing = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) spacing = std::fmax(spacing, xs[i + 1] - xs[i]);
  if (step < 2.0 * spacing)
    throw ConfigError("derivative_consistency: step " + format_double(step) +
                      " is below twice the grid spacing " + format_double(spacing));

  const double lo = phi.lo() + step, hi = phi.hi() - step;
  if (!(lo < hi)) throw ConfigError("derivative_consistency: step too large for the interval");
  const double denom = static_cast<double>(n_check - 1);
  double m = 0.0;
  for (int j = 0; j < n_check; ++j) {
    const double x = (lo * (denom - j) + hi * j) / denom;
    const double fd = (phi(x + step) - phi(x - step)) / (2.0 * step);
    m = std::fmax(m, std::fabs(fd - deriv(x)));
  }
  return m;
}

double observed_contraction_ratio(const IterationTrace& trace, int burn_in) {
  if (burn_in < 0) throw ConfigError("observed_contraction_ratio: burn_in must be >= 0");
  const auto& steps = trace.steps;
  if (steps.size() < static_cast<std::size_t>(burn_in) + 3)
    throw InsufficientTrace("trace has " + std::to_string(steps.size()) +
                            " steps; need at least " + std::to_string(burn_in + 3));
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();
  double m = -1.0;
  for (std::size_t i = static_cast<std::size_t>(burn_in); i + 1 < steps.size(); ++i) {
    const double d0 = steps[i].delta_phi;
    if (d0 < floor) continue;
    m = std::fmax(m, steps[i + 1].delta_phi / d0);
  }
  if (m < 0)
    throw InsufficientTrace("all phi-deltas past the burn-in sit below 100 machine epsilons");
  return m;
}

VerificationReport verify_solution(const SolutionPair& sol, const ProblemSpec& spec,
                                   double fd_step_multiplier, int n_check, int burn_in) {
  VerificationReport r;
  const ResidualResult rr = residual(sol.phi_star, spec, n_check);
  r.residual_sup = rr.sup;
  r.residual_argmax = rr.argmax;
  r.residual_points = rr.points_used;

  const double spacing = 2.0 * spec.interval_halfwidth / static_cast<double>(spec.grid_n - 1);
  r.derivative_mismatch_sup =
      derivative_consistency(sol.phi_star, sol.deriv_star, fd_step_multiplier * spacing, n_check);

  r.lipschitz_of_solution = lipschitz_estimate(sol.phi_star);
  r.derivative_bound = bound_estimate(sol.deriv_star);
  r.theoretical_factor = std::fmax(sol.report.lambda_factor, sol.report.psi_factor);
  try {
    r.observed_ratio = observed_contraction_ratio(sol.trace, burn_in);
  } catch (const InsufficientTrace&) {
    r.observed_ratio = 0.0;  // converged too fast to measure a ratio
  }
  if (!sol.trace.steps.empty()) {
    const double lambda = sol.report.lambda_factor;
    r.phi_error_bound = sol.trace.steps.back().delta_phi * lambda / (1.0 - lambda);
  }
  return r;
}

nlohmann::json verification_to_json(const VerificationReport& r) {
  return {{"residual_sup", r.residual_sup},
          {"residual_argmax", r.residual_argmax},
          {"residual_points", r.residual_points},
          {"derivative_mismatch_sup", r.derivative_mismatch_sup},
          {"lipschitz_of_solution", r.lipschitz_of_solution},
          {"derivative_bound", r.derivative_bound},
          {"observed_ratio", r.observed_ratio},
          {"theoretical_factor", r.theoretical_factor},
          {"phi_error_bound", r.phi_error_bound}};
}

}  // namespace ifeq
