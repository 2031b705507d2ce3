#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ifeq/conditions.hpp"
#include "ifeq/expr.hpp"
#include "ifeq/inverse.hpp"

namespace ifeq {

/// Raw contents of a problem file plus command-line overrides, before any
/// validation. Mirrors the file sections one to one.
struct ProblemConfig {
  // [functions]
  std::string h, f, g;
  std::optional<std::string> hp, fp, gp;
  // [constants]
  std::optional<double> K, alpha, beta, g_bound;
  // [domain]
  std::optional<double> interval_halfwidth;
  std::optional<int> grid_n;
  // [solver]
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<double> L, rho;
  std::optional<ChoicePolicy> policy;
};

/// Parses the sectioned key=value problem format:
///
///   [functions]             mandatory h, f, g; optional hp, fp, gp
///   h = "sin(x) + 4*x"      expression values are double-quoted
///   [constants]             optional K, alpha, beta, g_bound
///   [domain]                optional A, grid_n
///   [solver]                optional tol, max_iter, L, rho, policy
///
/// '#' starts a full-line comment. Unknown sections or keys, duplicate keys,
/// non-finite numbers, and missing mandatory keys are rejected (ConfigError
/// with a line number).
ProblemConfig parse_problem_file(std::istream& in);
ProblemConfig parse_problem_text(const std::string& text);
ProblemConfig load_problem_file(const std::string& path);

/// A fully assembled problem: expressions with derivatives, validated
/// constants with chosen (L, rho), monotone maps for h and f, and the
/// numerical domain settings.
struct ProblemSpec {
  Expr h, f, g;
  Expr h_prime, f_prime, g_prime;
  Constants constants;
  ConditionReport report;  // parameters chosen
  MonotoneMap h_map, f_map;
  double interval_halfwidth = 0.0;  // A
  int grid_n = 0;
  double inverse_tol = 1e-12;
  std::vector<std::string> warnings;  // declared/estimated disagreements
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

inline constexpr int kDefaultGridN = 4001;
inline constexpr double kDefaultInverseTol = 1e-12;

/// Runs the full assembly pipeline: parse the expressions, derive any
/// missing derivatives symbolically, estimate the constants on a probe grid
/// (declared values win; disagreements beyond 1e-6 relative are recorded as
/// warnings), validate, choose (L, rho), build the monotone maps, and size
/// the interval when no halfwidth is declared.
ProblemSpec assemble_problem(const ProblemConfig& cfg);

SolveOptions solve_options(const ProblemConfig& cfg);

}  // namespace ifeq
