#pragma once

#include <utility>

#include "ifeq/expr.hpp"

#include "json.hpp"

namespace ifeq {

/// The constants of the solvability test: derivative floors of h and f,
/// derivative ceiling of g, and the sup bound of g.
struct Constants {
  double K = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double g_bound = 0.0;
};

enum class SolvabilityCase { SmallAlpha, LargeAlpha };
enum class Provenance { Declared, Estimated };
enum class ChoicePolicy { Midpoint, MinLMinRho };

/// [lo, hi] or [lo, hi) when the binding constraint is strict.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
  bool hi_open = false;

  bool contains(double v) const { return v >= lo && (hi_open ? v < hi : v <= hi); }
  bool empty() const { return hi_open ? lo >= hi : lo > hi; }
  /// Largest value available to the choice policies: open ends are shrunk
  /// by 1e-9 relative so that chosen values keep the strict inequalities.
  double usable_hi() const { return hi_open ? hi * (1.0 - 1e-9) : hi; }
  double midpoint() const { return 0.5 * (lo + usable_hi()); }
};

/// Outcome of validating the constants: which case applies, the admissible
/// windows for L and rho, the chosen values, and the two contraction factors.
struct ConditionReport {
  SolvabilityCase solvability_case = SolvabilityCase::LargeAlpha;
  double case_threshold = 0.0;  // 2(1 - 1/K)
  double discriminant = 0.0;    // alpha^2 K^2 - 4 beta
  double beta_bound = 0.0;      // the case-dependent admissibility bound
  Window L_window;
  Window rho_window;
  double chosen_L = 0.0;
  double chosen_rho = 0.0;
  double lambda_factor = 0.0;  // (L+1)/K, < 1 once chosen
  double psi_factor = 0.0;     // 2 rho / (alpha K), < 1 once chosen
  bool parameters_chosen = false;
  Constants constants;
  Provenance provenance_K = Provenance::Declared;
  Provenance provenance_alpha = Provenance::Declared;
  Provenance provenance_beta = Provenance::Declared;
  Provenance provenance_g_bound = Provenance::Declared;
};

/// Checks K > 1, alpha > 0, beta > 0, g_bound finite, classifies the case by
/// comparing alpha with 2(1 - 1/K), checks the matching beta bound, and
/// computes both admissible windows. Throws HypothesisViolation or
/// BetaTooLarge; an empty window (impossible when the bound holds) aborts
/// with InternalError.
ConditionReport validate(const Constants& c);

/// Fills chosen_L / chosen_rho and the contraction factors. Midpoint takes
/// the midpoint of each window, MinLMinRho the lower endpoints.
std::pair<double, double> choose_parameters(ConditionReport& report, ChoicePolicy policy);

/// Explicit choice; both values must lie in their windows.
std::pair<double, double> choose_parameters(ConditionReport& report, double L, double rho);

/// Grid estimates of the constants over n_probe uniform points on
/// [-probe_interval, probe_interval]: K from min|h'|, alpha from min|f'|,
/// beta from max|g'|, g_bound from max|g|. Finite-grid minima are estimates,
/// not proofs of the infima over the reals. Throws UnboundedFunctionError
/// when max|g| keeps growing as the probe window doubles.
Constants estimate_constants(const Expr& h_prime, const Expr& f_prime, const Expr& g,
                             const Expr& g_prime, double probe_interval, int n_probe);

nlohmann::json report_to_json(const ConditionReport& r);

}  // namespace ifeq
