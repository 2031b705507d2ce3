#include "ifeq/solver.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "ifeq/inverse.hpp"
#include "ifeq/verify.hpp"

namespace ifeq {

namespace {

constexpr int kTraceResidualPoints = 501;
constexpr double kDriftSlack = 1e-6;  // relative class-membership slack per step

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SolverWorkspace::SolverWorkspace(const ProblemSpec& s, ExecPolicy e)
    : spec(s), exec(e), nodes(uniform_nodes(s.interval_halfwidth, s.grid_n)) {
  const std::int64_t n = static_cast<std::int64_t>(nodes->size());
  f_inv.resize(n);
  f_inv_deriv.resize(n);
  g_at_u.resize(n);
  g_prime_at_u.resize(n);
  detail::parallel_for(exec, n, [&](std::int64_t i) {
    const double x = (*nodes)[i];
    const double u = invert(spec.f_map, x, spec.inverse_tol);
    f_inv[i] = u;
    f_inv_deriv[i] = 1.0 / spec.f_map.derivative.eval(u);
    g_at_u[i] = spec.g.eval(u);
    g_prime_at_u[i] = spec.g_prime.eval(u);
  });
}

GridFunction apply_lambda(const GridFunction& phi, const SolverWorkspace& ws) {
  const std::int64_t n = static_cast<std::int64_t>(ws.nodes->size());
  std::vector<double> out(n);
  detail::parallel_for(ws.exec, n, [&](std::int64_t i) {
    const double u = ws.f_inv[i];
    const double w = phi(phi(u)) - ws.g_at_u[i];
    out[i] = invert(ws.spec.h_map, w, ws.spec.inverse_tol);
  });
  return GridFunction(ws.nodes, std::move(out));
}

GridFunction apply_psi(const GridFunction& phi, const GridFunction& deriv,
                       const SolverWorkspace& ws) {
  const std::int64_t n = static_cast<std::int64_t>(ws.nodes->size());
  std::vector<double> out(n);
  detail::parallel_for(ws.exec, n, [&](std::int64_t i) {
    const double u = ws.f_inv[i];
    const double w = phi(phi(u)) - ws.g_at_u[i];
    const double hinv_deriv = inverse_derivative(ws.spec.h_map, w, ws.spec.inverse_tol);
    out[i] = hinv_deriv * (deriv(phi(u)) * deriv(u) - ws.g_prime_at_u[i]) * ws.f_inv_deriv[i];
  });
  return GridFunction(ws.nodes, std::move(out));
}

std::pair<GridFunction, GridFunction> gamma_step(const GridFunction& phi,
                                                 const GridFunction& deriv,
                                                 const SolverWorkspace& ws) {
  const std::int64_t n = static_cast<std::int64_t>(ws.nodes->size());
  std::vector<double> lambda_out(n);
  std::vector<double> psi_out(n);
  detail::parallel_for(ws.exec, n, [&](std::int64_t i) {
    const double u = ws.f_inv[i];
    const double w = phi(phi(u)) - ws.g_at_u[i];
    const double t = invert(ws.spec.h_map, w, ws.spec.inverse_tol);
    lambda_out[i] = t;
    psi_out[i] = (1.0 / ws.spec.h_map.derivative.eval(t)) *
                 (deriv(phi(u)) * deriv(u) - ws.g_prime_at_u[i]) * ws.f_inv_deriv[i];
  });
  return {GridFunction(ws.nodes, std::move(lambda_out)),
          GridFunction(ws.nodes, std::move(psi_out))};
}

GridFunction apply_lambda(const GridFunction& phi, const ProblemSpec& spec, ExecPolicy exec) {
  return apply_lambda(phi, SolverWorkspace(spec, exec));
}

GridFunction apply_psi(const GridFunction& phi, const GridFunction& deriv,
                       const ProblemSpec& spec, ExecPolicy exec) {
  return apply_psi(phi, deriv, SolverWorkspace(spec, exec));
}

std::pair<GridFunction, GridFunction> zero_seeds(const ProblemSpec& spec) {
  auto nodes = uniform_nodes(spec.interval_halfwidth, spec.grid_n);
  std::vector<double> zero(nodes->size(), 0.0);
  return {GridFunction(nodes, zero), GridFunction(nodes, zero)};
}

SolutionPair iterate_fiber(const GridFunction& phi0, const GridFunction& deriv0,
                           const ProblemSpec& spec, double tol, int max_iter, ExecPolicy exec) {
  if (!(tol > 0)) throw ConfigError("iterate_fiber: tol must be positive");
  if (max_iter < 1) throw ConfigError("iterate_fiber: max_iter must be at least 1");
  if (!spec.report.parameters_chosen)
    throw ConfigError("iterate_fiber: (L, rho) have not been chosen");

  SolverWorkspace ws(spec, exec);
  if (phi0.nodes() != *ws.nodes || deriv0.nodes() != *ws.nodes)
    throw ConfigError("iterate_fiber: seeds must live on the problem's grid");

  const double L = spec.report.chosen_L;
  const double rho = spec.report.chosen_rho;
  if (lipschitz_estimate(phi0) > L * (1.0 + kDriftSlack))
    throw ConfigError("iterate_fiber: seed phi0 has Lipschitz constant above L");
  if (bound_estimate(deriv0) > rho * (1.0 + kDriftSlack))
    throw ConfigError("iterate_fiber: seed Phi0 has sup norm above rho");

  SolutionPair result{phi0, deriv0, spec.report, {}};
  GridFunction phi = phi0;
  GridFunction deriv = deriv0;

  for (int n = 1; n <= max_iter; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    auto [phi_next, deriv_next] = gamma_step(phi, deriv, ws);

    const double lip = lipschitz_estimate(phi_next);
    if (lip > L * (1.0 + kDriftSlack))
      throw MembershipDrift("Lip(phi_" + std::to_string(n) + ") = " + format_double(lip) +
                            " exceeds L = " + format_double(L) +
                            "; refine the grid or enlarge the interval");
    const double bound = bound_estimate(deriv_next);
    if (bound > rho * (1.0 + kDriftSlack))
      throw MembershipDrift("|Phi_" + std::to_string(n) + "| = " + format_double(bound) +
                            " exceeds rho = " + format_double(rho) +
                            "; refine the grid or enlarge the interval");

    const double delta_phi = sup_dist(phi_next, phi);
    const double delta_deriv = sup_dist(deriv_next, deriv);
    double res;
    try {
      res = residual(phi_next, spec, kTraceResidualPoints).sup;
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) +
                        "; the problem's compositions never stay inside [-A, A], "
                        "so the solution cannot be certified on this interval");
    }

    phi = std::move(phi_next);
    deriv = std::move(deriv_next);
    result.trace.steps.push_back({n, delta_phi, delta_deriv, res, seconds_since(t0)});

    if (std::fmax(delta_phi, delta_deriv) <= tol) {
      result.trace.stop = StopReason::Converged;
      break;
    }
  }

  result.phi_star = std::move(phi);
  result.deriv_star = std::move(deriv);
  return result;
}

double default_interval(const MonotoneMap& h_map, double g_bound, double inverse_tol) {
  double b = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double target = b + g_bound;
    const double next = std::fmax(std::fabs(invert(h_map, target, inverse_tol)),
                                  std::fabs(invert(h_map, -target, inverse_tol)));
    const bool done = std::fabs(next - b) < 1e-6;
    b = next;
    if (done) break;
  }
  return std::fmax(10.0, 2.0 * b);
}

double default_interval(const ProblemSpec& spec) {
  return default_interval(spec.h_map, spec.constants.g_bound, spec.inverse_tol);
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
  out << "n,delta_phi,delta_Phi,residual,seconds\n";
  for (const auto& s : trace.steps)
    out << s.n << ',' << format_double(s.delta_phi) << ',' << format_double(s.delta_deriv) << ','
        << format_double(s.residual) << ',' << format_double(s.seconds) << '\n';
}

}  // namespace ifeq
