#include "ifeq/problem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "ifeq/solver.hpp"

namespace ifeq {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw ConfigError("problem file line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& v, int line) {
  double value = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), value);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    fail_line(line, "expected a number, got '" + v + "'");
  if (!std::isfinite(value)) fail_line(line, "number must be finite: '" + v + "'");
  return value;
}

int parse_int(const std::string& v, int line) {
  int value = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), value);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    fail_line(line, "expected an integer, got '" + v + "'");
  return value;
}

std::string parse_quoted(const std::string& v, int line) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    fail_line(line, "expression values must be double-quoted, got " + v);
  return v.substr(1, v.size() - 2);
}

}  // namespace

ProblemConfig parse_problem_file(std::istream& in) {
  ProblemConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  bool saw_h = false, saw_f = false, saw_g = false;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail_line(line, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      if (section != "functions" && section != "constants" && section != "domain" &&
          section != "solver")
        fail_line(line, "unknown section [" + section + "]");
      continue;
    }

    std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail_line(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) fail_line(line, "expected 'key = value'");
    if (section.empty()) fail_line(line, "key '" + key + "' appears before any section");
    if (!seen.insert(section + "." + key).second) fail_line(line, "duplicate key '" + key + "'");

    if (section == "functions") {
      std::string expr = parse_quoted(value, line);
      if (key == "h") { cfg.h = expr; saw_h = true; }
      else if (key == "f") { cfg.f = expr; saw_f = true; }
      else if (key == "g") { cfg.g = expr; saw_g = true; }
      else if (key == "hp") cfg.hp = expr;
      else if (key == "fp") cfg.fp = expr;
      else if (key == "gp") cfg.gp = expr;
      else fail_line(line, "unknown key '" + key + "' in [functions]");
    } else if (section == "constants") {
      if (key == "K") cfg.K = parse_number(value, line);
      else if (key == "alpha") cfg.alpha = parse_number(value, line);
      else if (key == "beta") cfg.beta = parse_number(value, line);
      else if (key == "g_bound") cfg.g_bound = parse_number(value, line);
      else fail_line(line, "unknown key '" + key + "' in [constants]");
    } else if (section == "domain") {
      if (key == "A") cfg.interval_halfwidth = parse_number(value, line);
      else if (key == "grid_n") cfg.grid_n = parse_int(value, line);
      else fail_line(line, "unknown key '" + key + "' in [domain]");
    } else {  // solver
      if (key == "tol") cfg.tol = parse_number(value, line);
      else if (key == "max_iter") cfg.max_iter = parse_int(value, line);
      else if (key == "L") cfg.L = parse_number(value, line);
      else if (key == "rho") cfg.rho = parse_number(value, line);
      else if (key == "policy") {
        std::string p = value;
        if (p.size() >= 2 && p.front() == '"' && p.back() == '"') p = p.substr(1, p.size() - 2);
        if (p == "midpoint") cfg.policy = ChoicePolicy::Midpoint;
        else if (p == "min") cfg.policy = ChoicePolicy::MinLMinRho;
        else fail_line(line, "policy must be 'midpoint' or 'min', got '" + p + "'");
      } else fail_line(line, "unknown key '" + key + "' in [solver]");
    }
  }

  if (!saw_h || !saw_f || !saw_g)
    throw ConfigError("problem file must define h, f and g in [functions]");

  if (cfg.grid_n && *cfg.grid_n < 2) throw ConfigError("grid_n must be at least 2");
  if (cfg.max_iter && *cfg.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (cfg.tol && !(*cfg.tol > 0)) throw ConfigError("tol must be positive");
  if (cfg.interval_halfwidth && !(*cfg.interval_halfwidth > 0))
    throw ConfigError("A must be positive");
  return cfg;
}

ProblemConfig parse_problem_text(const std::string& text) {
  std::istringstream in(text);
  return parse_problem_file(in);
}

ProblemConfig load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read problem file: " + path);
  return parse_problem_file(in);
}

namespace {

struct MergedConstant {
  double value;
  Provenance provenance;
};

MergedConstant merge_constant(const char* name, std::optional<double> declared, double estimated,
                              std::vector<std::string>& warnings) {
  if (!declared) return {estimated, Provenance::Estimated};
  double scale = std::fmax(std::fmax(std::fabs(*declared), std::fabs(estimated)), 1e-300);
  if (std::fabs(*declared - estimated) > 1e-6 * scale)
    warnings.push_back(std::string(name) + ": declared " + format_double(*declared) +
                       " disagrees with probe estimate " + format_double(estimated) +
                       "; using the declared value");
  return {*declared, Provenance::Declared};
}

}  // namespace

ProblemSpec assemble_problem(const ProblemConfig& cfg) {
  ProblemSpec spec;
  spec.h = parse_expr(cfg.h);
  spec.f = parse_expr(cfg.f);
  spec.g = parse_expr(cfg.g);
  spec.h_prime = cfg.hp ? parse_expr(*cfg.hp) : spec.h.derivative();
  spec.f_prime = cfg.fp ? parse_expr(*cfg.fp) : spec.f.derivative();
  spec.g_prime = cfg.gp ? parse_expr(*cfg.gp) : spec.g.derivative();

  const double probe = cfg.interval_halfwidth.value_or(10.0);
  const int n_probe = 4001;
  Constants est =
      estimate_constants(spec.h_prime, spec.f_prime, spec.g, spec.g_prime, probe, n_probe);

  MergedConstant K = merge_constant("K", cfg.K, est.K, spec.warnings);
  MergedConstant alpha = merge_constant("alpha", cfg.alpha, est.alpha, spec.warnings);
  MergedConstant beta = merge_constant("beta", cfg.beta, est.beta, spec.warnings);
  MergedConstant g_bound = merge_constant("g_bound", cfg.g_bound, est.g_bound, spec.warnings);
  spec.constants = Constants{K.value, alpha.value, beta.value, g_bound.value};

  spec.report = validate(spec.constants);
  spec.report.provenance_K = K.provenance;
  spec.report.provenance_alpha = alpha.provenance;
  spec.report.provenance_beta = beta.provenance;
  spec.report.provenance_g_bound = g_bound.provenance;

  if (cfg.L.has_value() != cfg.rho.has_value())
    throw ConfigError("explicit L and rho must be given together");
  if (cfg.L) {
    choose_parameters(spec.report, *cfg.L, *cfg.rho);
  } else {
    choose_parameters(spec.report, cfg.policy.value_or(ChoicePolicy::Midpoint));
  }

  spec.h_map = make_monotone_map(spec.h, spec.h_prime, spec.constants.K, probe);
  spec.f_map = make_monotone_map(spec.f, spec.f_prime, spec.constants.alpha, probe);

  spec.inverse_tol = kDefaultInverseTol;
  spec.grid_n = cfg.grid_n.value_or(kDefaultGridN);
  spec.interval_halfwidth = cfg.interval_halfwidth.value_or(0.0);
  if (!cfg.interval_halfwidth)
    spec.interval_halfwidth =
        default_interval(spec.h_map, spec.constants.g_bound, spec.inverse_tol);
  return spec;
}

SolveOptions solve_options(const ProblemConfig& cfg) {
  SolveOptions o;
  o.tol = cfg.tol.value_or(1e-10);
  o.max_iter = cfg.max_iter.value_or(200);
  return o;
}

}  // namespace ifeq
