#include "ifeq/conditions.hpp"

#include <cmath>
#include <limits>

namespace ifeq {

namespace {

double probe_point(double halfwidth, int i, int n) {
  const double denom = static_cast<double>(n - 1);
  return (-halfwidth * (denom - i) + halfwidth * i) / denom;
}

double grid_max_abs(const Expr& e, double halfwidth, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::fmax(m, std::fabs(e.eval(probe_point(halfwidth, i, n))));
  return m;
}

double grid_min_abs(const Expr& e, double halfwidth, int n) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) m = std::fmin(m, std::fabs(e.eval(probe_point(halfwidth, i, n))));
  return m;
}

const char* case_name(SolvabilityCase c) {
  return c == SolvabilityCase::SmallAlpha ? "small-alpha" : "large-alpha";
}

void check_chosen(ConditionReport& r, double L, double rho) {
  r.chosen_L = L;
  r.chosen_rho = rho;
  r.lambda_factor = (L + 1.0) / r.constants.K;
  r.psi_factor = 2.0 * rho / (r.constants.alpha * r.constants.K);
  r.parameters_chosen = true;
  if (!(r.lambda_factor < 1.0) || !(r.psi_factor < 1.0))
    throw InternalError("contraction factor not below 1 for an in-window choice");
}

}  // namespace

ConditionReport validate(const Constants& c) {
  if (!std::isfinite(c.K) || !std::isfinite(c.alpha) || !std::isfinite(c.beta) ||
      !std::isfinite(c.g_bound))
    throw HypothesisViolation("constants must be finite");
  if (!(c.K > 1.0)) throw HypothesisViolation("K must exceed 1 (got " + format_double(c.K) + ")");
  if (!(c.alpha > 0.0))
    throw HypothesisViolation("alpha must be positive (got " + format_double(c.alpha) + ")");
  if (!(c.beta > 0.0))
    throw HypothesisViolation("beta must be positive (got " + format_double(c.beta) + ")");
  if (c.g_bound < 0.0) throw HypothesisViolation("g_bound must be non-negative");

  ConditionReport r;
  r.constants = c;
  r.case_threshold = 2.0 * (1.0 - 1.0 / c.K);
  r.solvability_case =
      c.alpha < r.case_threshold ? SolvabilityCase::SmallAlpha : SolvabilityCase::LargeAlpha;

  const double aK = c.alpha * c.K;
  r.beta_bound = r.solvability_case == SolvabilityCase::SmallAlpha
                     ? 0.25 * aK * aK
                     : (c.K - 1.0) * (aK - c.K + 1.0);
  if (!(c.beta < r.beta_bound))
    throw BetaTooLarge(case_name(r.solvability_case), r.beta_bound, c.beta);

  r.discriminant = aK * aK - 4.0 * c.beta;
  if (!(r.discriminant > 0.0))
    throw InternalError("discriminant must be positive when the beta bound holds");

  const double half = 0.5 * std::sqrt(r.discriminant);
  const double center = 0.5 * aK;
  const double lo = center - half;       // > 0 since beta > 0
  const double hi_closed = center + half;

  r.L_window.lo = lo;
  if (c.K - 1.0 <= hi_closed) {
    r.L_window.hi = c.K - 1.0;
    r.L_window.hi_open = true;  // strict L < K - 1 binds
  } else {
    r.L_window.hi = hi_closed;
    r.L_window.hi_open = false;
  }

  // rho < alpha*K/2 always binds because the closed end sits at center+half.
  r.rho_window.lo = lo;
  r.rho_window.hi = center;
  r.rho_window.hi_open = true;

  if (r.L_window.empty() || r.rho_window.empty())
    throw InternalError("admissible window is empty although the beta bound holds");
  return r;
}

std::pair<double, double> choose_parameters(ConditionReport& report, ChoicePolicy policy) {
  if (report.L_window.empty() || report.rho_window.empty())
    throw InternalError("choose_parameters on an empty window");
  double L, rho;
  switch (policy) {
    case ChoicePolicy::Midpoint:
      L = report.L_window.midpoint();
      rho = report.rho_window.midpoint();
      break;
    case ChoicePolicy::MinLMinRho:
      L = report.L_window.lo;
      rho = report.rho_window.lo;
      break;
    default:
      throw InternalError("unknown choice policy");
  }
  check_chosen(report, L, rho);
  return {L, rho};
}

std::pair<double, double> choose_parameters(ConditionReport& report, double L, double rho) {
  if (!report.L_window.contains(L))
    throw ExplicitOutOfWindow("L = " + format_double(L) + " is outside [" +
                              format_double(report.L_window.lo) + ", " +
                              format_double(report.L_window.hi) +
                              (report.L_window.hi_open ? ")" : "]"));
  if (!report.rho_window.contains(rho))
    throw ExplicitOutOfWindow("rho = " + format_double(rho) + " is outside [" +
                              format_double(report.rho_window.lo) + ", " +
                              format_double(report.rho_window.hi) +
                              (report.rho_window.hi_open ? ")" : "]"));
  check_chosen(report, L, rho);
  return {L, rho};
}

Constants estimate_constants(const Expr& h_prime, const Expr& f_prime, const Expr& g,
                             const Expr& g_prime, double probe_interval, int n_probe) {
  if (!(probe_interval > 0) || !std::isfinite(probe_interval))
    throw ConfigError("probe interval must be positive and finite");
  if (n_probe < 2) throw ConfigError("probe grid needs at least 2 points");

  Constants c;
  c.K = grid_min_abs(h_prime, probe_interval, n_probe);
  c.alpha = grid_min_abs(f_prime, probe_interval, n_probe);
  c.beta = grid_max_abs(g_prime, probe_interval, n_probe);
  c.g_bound = grid_max_abs(g, probe_interval, n_probe);

  // Unboundedness sniff: a sup estimate that still grows when the window is
  // doubled a second time marks g as unbounded. The first doubling is not
  // compared, so a maximum that merely sits outside the base window (sin on
  // a window smaller than pi/2) does not trip the check.
  const double m2 = grid_max_abs(g, 2.0 * probe_interval, n_probe);
  const double m4 = grid_max_abs(g, 4.0 * probe_interval, n_probe);
  if (m4 > m2 * (1.0 + 1e-3) + 1e-12)
    throw UnboundedFunctionError("sup|g| estimate grows from " + format_double(m2) + " to " +
                                 format_double(m4) +
                                 " as the probe window doubles; g appears unbounded");
  return c;
}

namespace {

nlohmann::json window_to_json(const Window& w) {
  return {{"lo", w.lo}, {"hi", w.hi}, {"hi_open", w.hi_open}};
}

nlohmann::json constant_to_json(double value, Provenance p) {
  return {{"value", value}, {"provenance", p == Provenance::Declared ? "declared" : "estimated"}};
}

}  // namespace

nlohmann::json report_to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["case"] = r.solvability_case == SolvabilityCase::SmallAlpha ? "small_alpha" : "large_alpha";
  j["case_threshold"] = r.case_threshold;
  j["beta_bound"] = r.beta_bound;
  j["discriminant"] = r.discriminant;
  j["L_window"] = window_to_json(r.L_window);
  j["rho_window"] = window_to_json(r.rho_window);
  j["constants"] = {{"K", constant_to_json(r.constants.K, r.provenance_K)},
                    {"alpha", constant_to_json(r.constants.alpha, r.provenance_alpha)},
                    {"beta", constant_to_json(r.constants.beta, r.provenance_beta)},
                    {"g_bound", constant_to_json(r.constants.g_bound, r.provenance_g_bound)}};
  if (r.parameters_chosen) {
    j["chosen_L"] = r.chosen_L;
    j["chosen_rho"] = r.chosen_rho;
    j["lambda_factor"] = r.lambda_factor;
    j["psi_factor"] = r.psi_factor;
  }
  return j;
}

}  // namespace ifeq
