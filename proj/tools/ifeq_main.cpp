// Command-line front end: validate / solve / report.
//
// Exit codes are a stable contract: 0 success, 1 parse or configuration
// error, 2 solvability-condition failure, 3 iteration budget exhausted.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ifeq/problem.hpp"
#include "ifeq/solver.hpp"
#include "ifeq/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCondition = 2;
constexpr int kExitNoConvergence = 3;

void print_warnings(const ifeq::ProblemSpec& spec) {
  for (const auto& w : spec.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_validate(const std::string& path) {
  ifeq::ProblemConfig cfg = ifeq::load_problem_file(path);
  try {
    ifeq::ProblemSpec spec = ifeq::assemble_problem(cfg);
    print_warnings(spec);
    std::cout << ifeq::report_to_json(spec.report).dump(2) << "\n";
    return kExitOk;
  } catch (const ifeq::HypothesisViolation& e) {
    json j;
    j["error"] = {{"type", "hypothesis_violation"}, {"message", e.what()}};
    std::cout << j.dump(2) << "\n";
    return kExitCondition;
  } catch (const ifeq::BetaTooLarge& e) {
    json j;
    j["error"] = {{"type", "beta_too_large"},
                  {"message", e.what()},
                  {"bound", e.bound()},
                  {"beta", e.beta()}};
    std::cout << j.dump(2) << "\n";
    return kExitCondition;
  } catch (const ifeq::UnboundedFunctionError& e) {
    json j;
    j["error"] = {{"type", "unbounded_g"}, {"message", e.what()}};
    std::cout << j.dump(2) << "\n";
    return kExitCondition;
  } catch (const ifeq::ExplicitOutOfWindow& e) {
    json j;
    j["error"] = {{"type", "explicit_out_of_window"}, {"message", e.what()}};
    std::cout << j.dump(2) << "\n";
    return kExitCondition;
  }
}

struct SolveFlags {
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> grid_n;
  std::optional<double> interval;
  std::optional<double> L;
  std::optional<double> rho;
  std::string trace_path;
  std::string out_prefix = "out";
};

int cmd_solve(const std::string& path, const SolveFlags& flags) {
  ifeq::ProblemConfig cfg = ifeq::load_problem_file(path);
  // flags override file values, file values override defaults
  if (flags.tol) cfg.tol = flags.tol;
  if (flags.max_iter) cfg.max_iter = flags.max_iter;
  if (flags.grid_n) cfg.grid_n = flags.grid_n;
  if (flags.interval) cfg.interval_halfwidth = flags.interval;
  if (flags.L) cfg.L = flags.L;
  if (flags.rho) cfg.rho = flags.rho;

  ifeq::ProblemSpec spec;
  try {
    spec = ifeq::assemble_problem(cfg);
  } catch (const ifeq::HypothesisViolation& e) {
    std::cerr << "condition failure: " << e.what() << "\n";
    return kExitCondition;
  } catch (const ifeq::BetaTooLarge& e) {
    std::cerr << "condition failure: " << e.what() << "\n";
    return kExitCondition;
  } catch (const ifeq::UnboundedFunctionError& e) {
    std::cerr << "condition failure: " << e.what() << "\n";
    return kExitCondition;
  } catch (const ifeq::ExplicitOutOfWindow& e) {
    std::cerr << "condition failure: " << e.what() << "\n";
    return kExitCondition;
  }
  print_warnings(spec);

  const ifeq::SolveOptions opts = ifeq::solve_options(cfg);
  auto [phi0, deriv0] = ifeq::zero_seeds(spec);
  const ifeq::SolutionPair sol =
      ifeq::iterate_fiber(phi0, deriv0, spec, opts.tol, opts.max_iter);

  const auto write_grid = [](const ifeq::GridFunction& g, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw ifeq::ConfigError("cannot write " + file);
    ifeq::write_csv(g, out);
  };
  write_grid(sol.phi_star, flags.out_prefix + "_phi.csv");
  write_grid(sol.deriv_star, flags.out_prefix + "_Phi.csv");
  if (!flags.trace_path.empty()) {
    std::ofstream out(flags.trace_path);
    if (!out) throw ifeq::ConfigError("cannot write " + flags.trace_path);
    ifeq::write_trace_csv(sol.trace, out);
  }

  const ifeq::VerificationReport vr = ifeq::verify_solution(sol, spec);
  json doc;
  doc["problem"] = path;
  doc["iterations"] = static_cast<int>(sol.trace.steps.size());
  doc["stop_reason"] = sol.converged() ? "converged" : "max_iter";
  doc["condition_report"] = ifeq::report_to_json(sol.report);
  doc["verification"] = ifeq::verification_to_json(vr);

  const std::string rendered = doc.dump(2);
  std::cout << rendered << "\n";
  std::ofstream jout(flags.out_prefix + "_report.json");
  if (!jout) throw ifeq::ConfigError("cannot write " + flags.out_prefix + "_report.json");
  jout << rendered << "\n";

  return sol.converged() ? kExitOk : kExitNoConvergence;
}

std::vector<fs::path> resolve_artifacts(const std::string& path) {
  std::vector<fs::path> found;
  fs::path p(path);
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    for (const auto& entry : fs::directory_iterator(p)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 12 && name.ends_with("_report.json")) found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
  } else if (fs::is_regular_file(p, ec)) {
    found.push_back(p);
  } else if (fs::is_regular_file(path + "_report.json", ec)) {
    found.emplace_back(path + "_report.json");
  }
  if (found.empty())
    throw ifeq::MissingArtifactError("no report artifact found at '" + path +
                                     "' (expected a *_report.json from a prior solve)");
  return found;
}

void print_report_table(const fs::path& file, const json& doc) {
  const auto num = [](const json& j) -> double { return j.is_number() ? j.get<double>() : 0.0; };
  std::cout << "artifact: " << file.string() << "\n";
  if (doc.contains("problem")) std::cout << "problem:  " << doc["problem"].get<std::string>() << "\n";
  std::cout << std::left;
  if (doc.contains("condition_report")) {
    const json& cr = doc["condition_report"];
    std::cout << "  case            " << cr.value("case", std::string("?")) << "\n";
    std::cout << "  beta bound      " << num(cr["beta_bound"]) << "\n";
    if (cr.contains("L_window"))
      std::cout << "  L window        [" << num(cr["L_window"]["lo"]) << ", "
                << num(cr["L_window"]["hi"]) << (cr["L_window"]["hi_open"].get<bool>() ? ")" : "]")
                << "\n";
    if (cr.contains("rho_window"))
      std::cout << "  rho window      [" << num(cr["rho_window"]["lo"]) << ", "
                << num(cr["rho_window"]["hi"])
                << (cr["rho_window"]["hi_open"].get<bool>() ? ")" : "]") << "\n";
    if (cr.contains("chosen_L"))
      std::cout << "  chosen (L, rho) (" << num(cr["chosen_L"]) << ", " << num(cr["chosen_rho"])
                << ")\n";
    if (cr.contains("lambda_factor"))
      std::cout << "  factors         lambda " << num(cr["lambda_factor"]) << ", psi "
                << num(cr["psi_factor"]) << "\n";
  }
  if (doc.contains("iterations"))
    std::cout << "  iterations      " << doc["iterations"].get<int>() << " ("
              << doc.value("stop_reason", std::string("?")) << ")\n";
  if (doc.contains("verification")) {
    const json& v = doc["verification"];
    std::cout << "  residual        " << num(v["residual_sup"]) << " at x = "
              << num(v["residual_argmax"]) << " (" << v["residual_points"].get<int>()
              << " points)\n";
    std::cout << "  |phi' - Phi|    " << num(v["derivative_mismatch_sup"]) << "\n";
    if (v.contains("phi_error_bound"))
      std::cout << "  error bound     " << num(v["phi_error_bound"]) << "\n";
    std::cout << "  Lip(phi*)       " << num(v["lipschitz_of_solution"]) << "\n";
    std::cout << "  |Phi*|          " << num(v["derivative_bound"]) << "\n";
    std::cout << "  ratio           observed " << num(v["observed_ratio"]) << " vs factor "
              << num(v["theoretical_factor"]) << "\n";
  }
}

int cmd_report(const std::string& path, bool as_json) {
  const std::vector<fs::path> files = resolve_artifacts(path);
  if (as_json && files.size() > 1)
    throw ifeq::ConfigError("--json needs a single artifact, found " +
                            std::to_string(files.size()));
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ifeq::MissingArtifactError("cannot read " + file.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ifeq::ConfigError("cannot parse " + file.string() + ": " + e.what());
    }
    if (as_json) {
      std::cout << doc.dump(2) << "\n";
    } else {
      print_report_table(file, doc);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate C1 solutions of phi(phi(x)) = h(phi(f(x))) + g(x) by "
               "fiber-contraction iteration"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "check the solvability conditions of a problem file");
  validate->add_option("path", validate_path, "problem file")->required();

  std::string solve_path;
  SolveFlags flags;
  double tol_val = 0, interval_val = 0, L_val = 0, rho_val = 0;
  int max_iter_val = 0, grid_n_val = 0;
  CLI::App* solve = app.add_subcommand("solve", "solve a problem file and verify the result");
  solve->add_option("path", solve_path, "problem file")->required();
  auto* tol_opt = solve->add_option("--tol", tol_val, "joint sup-delta stopping tolerance");
  auto* max_iter_opt = solve->add_option("--max-iter", max_iter_val, "iteration budget");
  auto* grid_n_opt = solve->add_option("--grid-n", grid_n_val, "number of grid nodes");
  auto* interval_opt =
      solve->add_option("--interval", interval_val, "interval halfwidth A");
  auto* L_opt = solve->add_option("--L", L_val, "explicit Lipschitz class constant");
  auto* rho_opt = solve->add_option("--rho", rho_val, "explicit derivative bound");
  solve->add_option("--trace", flags.trace_path, "write the iteration trace CSV here");
  solve->add_option("--out", flags.out_prefix, "output prefix for phi/Phi/report files")
      ->capture_default_str();

  std::string report_path;
  bool report_json = false;
  CLI::App* report =
      app.add_subcommand("report", "summarize the artifacts of a prior solve");
  report->add_option("path", report_path, "report file, output prefix, or directory")
      ->required();
  report->add_flag("--json", report_json, "re-emit the report JSON unchanged");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion" ? kExitOk
                                                                             : kExitConfig;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_path);
    if (solve->parsed()) {
      if (*tol_opt) flags.tol = tol_val;
      if (*max_iter_opt) flags.max_iter = max_iter_val;
      if (*grid_n_opt) flags.grid_n = grid_n_val;
      if (*interval_opt) flags.interval = interval_val;
      if (*L_opt) flags.L = L_val;
      if (*rho_opt) flags.rho = rho_val;
      return cmd_solve(solve_path, flags);
    }
    return cmd_report(report_path, report_json);
  } catch (const ifeq::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ifeq::MissingArtifactError& e) {
    std::cerr << "error: missing artifact: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ifeq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
