#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "ifeq/problem.hpp"
#include "ifeq/solver.hpp"
#include "ifeq/verify.hpp"

using namespace ifeq;

namespace {

ProblemSpec make_spec(const std::string& text) { return assemble_problem(parse_problem_text(text)); }

const std::string kTrivialText =
    "[functions]\nh=\"4*x\"\nf=\"5*x\"\ng=\"0\"\n"
    "[constants]\nK=4\nalpha=5\nbeta=0.5\ng_bound=0\n";

const std::string kExampleText =
    "[functions]\nh=\"sin(x) + 4*x\"\nf=\"exp(x) + 5*x\"\ng=\"cos(x)\"\n"
    "[constants]\nK=3\nalpha=5\nbeta=1\ng_bound=1\n"
    "[domain]\ngrid_n=2001\n"
    "[solver]\nL=1\nrho=1\n";

// Independent high-precision root of forward(t) = y by long double bisection.
long double bisect_root(long double (*forward)(long double), long double y, long double lo,
                        long double hi) {
  for (int i = 0; i < 200; ++i) {
    long double mid = 0.5L * (lo + hi);
    if (forward(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5L * (lo + hi);
}

long double example_h_forward(long double t) { return sinl(t) + 4.0L * t; }

}  // namespace

TEST_CASE("lambda on the linear problem") {
  ProblemSpec spec = make_spec(kTrivialText + "[domain]\ngrid_n=101\n");
  SolverWorkspace ws(spec);

  auto [zero, zero_deriv] = zero_seeds(spec);
  GridFunction out = apply_lambda(zero, ws);
  for (double v : out.values()) CHECK(v == 0.0);

  // constant c maps to c/4: h^{-1}(phi(phi(u))) = c/4
  GridFunction c = make_grid(spec.interval_halfwidth, spec.grid_n, [](double) { return 0.8; });
  GridFunction out_c = apply_lambda(c, ws);
  for (double v : out_c.values()) CHECK(v == doctest::Approx(0.2).epsilon(1e-11));
}

TEST_CASE("lambda on the worked example against a bisection oracle") {
  ProblemSpec spec = make_spec(kExampleText);
  SolverWorkspace ws(spec);
  auto [zero, zero_deriv] = zero_seeds(spec);
  GridFunction out = apply_lambda(zero, ws);

  // (Lambda 0)(1) = h^{-1}(-cos(f^{-1}(1))) = h^{-1}(-1) since f^{-1}(1) = 0
  long double oracle = bisect_root(example_h_forward, -1.0L, -1.0L, 0.0L);
  CHECK(out(1.0) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-10));
  // the value the paper-derived formula gives at x = 1 is about -0.2003
  CHECK(out(1.0) == doctest::Approx(-0.200259).epsilon(1e-4));
}

TEST_CASE("psi on linear problems") {
  ProblemSpec spec = make_spec(kTrivialText + "[domain]\ngrid_n=101\n");
  SolverWorkspace ws(spec);
  auto [zero, zero_deriv] = zero_seeds(spec);
  GridFunction out = apply_psi(zero, zero_deriv, ws);
  for (double v : out.values()) CHECK(v == 0.0);

  // h=4x, f=5x, g=sin x: Psi(0, 0)(x) = (1/4)(0 - cos(x/5))(1/5) = -cos(x/5)/20
  ProblemSpec spec2 = make_spec(
      "[functions]\nh=\"4*x\"\nf=\"5*x\"\ng=\"sin(x)\"\n"
      "[constants]\nK=4\nalpha=5\nbeta=1\ng_bound=1\n"
      "[domain]\ngrid_n=101\n");
  SolverWorkspace ws2(spec2);
  auto [z2, zd2] = zero_seeds(spec2);
  GridFunction psi = apply_psi(z2, zd2, ws2);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double x = psi.nodes()[i];
    CHECK(psi.values()[i] ==
          doctest::Approx(-std::cos(x / 5.0) / 20.0).epsilon(1e-11));
  }
}

TEST_CASE("the fused step equals lambda and psi exactly") {
  ProblemSpec spec = make_spec(kExampleText);
  SolverWorkspace ws(spec);
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> amp(-0.8, 0.8);
  double a = amp(rng), b = amp(rng);
  GridFunction phi = make_grid(spec.interval_halfwidth, spec.grid_n,
                               [&](double x) { return a * std::sin(0.4 * x); });
  GridFunction deriv = make_grid(spec.interval_halfwidth, spec.grid_n,
                                 [&](double x) { return b * std::cos(0.4 * x); });
  auto [lam, psi] = gamma_step(phi, deriv, ws);
  GridFunction lam2 = apply_lambda(phi, ws);
  GridFunction psi2 = apply_psi(phi, deriv, ws);
  CHECK(lam.values() == lam2.values());
  CHECK(psi.values() == psi2.values());
}

TEST_CASE("chain rule: psi of an exact derivative matches differencing lambda") {
  ProblemSpec spec = make_spec(kExampleText);
  SolverWorkspace ws(spec);
  const double w = 0.45;
  GridFunction phi = make_grid(spec.interval_halfwidth, spec.grid_n,
                               [&](double x) { return 0.6 * std::sin(w * x); });
  GridFunction deriv = make_grid(spec.interval_halfwidth, spec.grid_n,
                                 [&](double x) { return 0.6 * w * std::cos(w * x); });
  GridFunction lam = apply_lambda(phi, ws);
  GridFunction psi = apply_psi(phi, deriv, ws);

  const double spacing = 2.0 * spec.interval_halfwidth / (spec.grid_n - 1);
  const double step = 10.0 * spacing;
  double worst = 0.0;
  for (int i = 0; i < 801; ++i) {
    double x = -0.9 * spec.interval_halfwidth + i * (1.8 * spec.interval_halfwidth / 800.0);
    double fd = (lam(x + step) - lam(x - step)) / (2.0 * step);
    worst = std::fmax(worst, std::fabs(fd - psi(x)));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("iterate_fiber hits the linear fixed point in one step") {
  ProblemSpec spec = make_spec(kTrivialText + "[domain]\ngrid_n=101\n");
  auto [phi0, deriv0] = zero_seeds(spec);
  SolutionPair sol = iterate_fiber(phi0, deriv0, spec, 1e-10, 50);
  CHECK(sol.converged());
  CHECK(sol.trace.steps.size() == 1);
  CHECK(sol.trace.steps[0].delta_phi == 0.0);
  CHECK(sol.trace.steps[0].delta_deriv == 0.0);
  CHECK(sol.trace.steps[0].residual == 0.0);
  CHECK(bound_estimate(sol.phi_star) == 0.0);
}

TEST_CASE("iteration budget of one returns a one-row partial trace") {
  ProblemSpec spec = make_spec(kExampleText);
  auto [phi0, deriv0] = zero_seeds(spec);
  SolutionPair sol = iterate_fiber(phi0, deriv0, spec, 1e-10, 1);
  CHECK(!sol.converged());
  CHECK(sol.trace.stop == StopReason::MaxIterExceeded);
  CHECK(sol.trace.steps.size() == 1);
  CHECK(sol.trace.steps[0].delta_phi > 0.0);
}

TEST_CASE("worked example converges and satisfies the class invariants") {
  ProblemSpec spec = make_spec(kExampleText);
  auto [phi0, deriv0] = zero_seeds(spec);
  SolutionPair sol = iterate_fiber(phi0, deriv0, spec, 1e-10, 100);
  CHECK(sol.converged());
  CHECK(sol.trace.steps.size() <= 100);
  CHECK(lipschitz_estimate(sol.phi_star) <= spec.report.chosen_L * (1.0 + 1e-9));
  CHECK(bound_estimate(sol.deriv_star) <= spec.report.chosen_rho * (1.0 + 1e-9));
  // deltas eventually decay at least at the theoretical rate (with slack)
  const double factor =
      std::fmax(sol.report.lambda_factor, sol.report.psi_factor) + 0.05;
  for (std::size_t i = 5; i + 1 < sol.trace.steps.size(); ++i) {
    if (sol.trace.steps[i].delta_phi < 1e-13) continue;
    CHECK(sol.trace.steps[i + 1].delta_phi <= factor * sol.trace.steps[i].delta_phi);
  }
}

TEST_CASE("psi is continuous in its first argument") {
  // perturb phi by eps * eta with |eta| = 1 and watch Psi(phi_eps, Phi0)
  // approach Psi(phi0, Phi0) monotonically as eps shrinks
  ProblemSpec spec = make_spec(kExampleText);
  SolverWorkspace ws(spec);
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> amp(0.2, 0.7);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = amp(rng), w = amp(rng);
    GridFunction phi0 = make_grid(spec.interval_halfwidth, spec.grid_n,
                                  [&](double x) { return a * std::sin(w * x); });
    GridFunction deriv0 = make_grid(spec.interval_halfwidth, spec.grid_n,
                                    [&](double x) { return 0.5 * std::cos(w * x); });
    GridFunction base = apply_psi(phi0, deriv0, ws);
    double prev = -1.0;
    double first = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      GridFunction phi_eps =
          make_grid(spec.interval_halfwidth, spec.grid_n,
                    [&](double x) { return a * std::sin(w * x) + eps * std::cos(x); });
      double d = sup_dist(apply_psi(phi_eps, deriv0, ws), base);
      if (prev >= 0.0) CHECK(d <= prev);
      if (prev < 0.0) first = d;
      prev = d;
    }
    CHECK(prev <= 0.2 * first);  // heading to 0, not to a plateau
    CHECK(prev <= 1e-3);
  }
}

TEST_CASE("the small-alpha fixture solves with a fully faithful core window") {
  ProblemConfig cfg = load_problem_file(std::string(IFEQ_FIXTURE_DIR) + "/small_alpha.problem");
  // f' ~ 1 spaces the collocation preimages at the full grid step, so the
  // residual floor is ~(2A/n)^2/8; 16001 nodes puts it well under 1e-6
  cfg.grid_n = 16001;
  ProblemSpec spec = assemble_problem(cfg);
  CHECK(spec.report.solvability_case == SolvabilityCase::SmallAlpha);
  CHECK(!spec.report.L_window.hi_open);  // the closed endpoint binds here
  CHECK(spec.report.rho_window.hi_open);

  auto [phi0, deriv0] = zero_seeds(spec);
  SolutionPair sol = iterate_fiber(phi0, deriv0, spec, 1e-10, 200);
  CHECK(sol.converged());
  ResidualResult r = residual(sol.phi_star, spec, 501);
  CHECK(r.sup <= 1e-6);
  CHECK(r.points_used == 501);  // f is near the identity: nothing is skipped
  CHECK(lipschitz_estimate(sol.phi_star) <= spec.report.chosen_L * (1.0 + 1e-9));
  CHECK(bound_estimate(sol.deriv_star) <= spec.report.chosen_rho * (1.0 + 1e-9));
}

TEST_CASE("membership drift is detected for an out-of-class configuration") {
  ProblemSpec spec = make_spec(kExampleText);
  spec.report.chosen_L = 0.01;  // far below the self-mapping window
  auto [phi0, deriv0] = zero_seeds(spec);
  CHECK_THROWS_AS(iterate_fiber(phi0, deriv0, spec, 1e-10, 10), MembershipDrift);
}

TEST_CASE("seeds are validated against the class") {
  ProblemSpec spec = make_spec(kExampleText);
  GridFunction steep = make_grid(spec.interval_halfwidth, spec.grid_n,
                                 [](double x) { return 3.0 * x; });  // Lip 3 > L = 1
  auto [phi0, deriv0] = zero_seeds(spec);
  CHECK_THROWS_AS(iterate_fiber(steep, deriv0, spec, 1e-10, 10), ConfigError);
  GridFunction big = make_grid(spec.interval_halfwidth, spec.grid_n,
                               [](double) { return 2.0; });  // bound 2 > rho = 1
  CHECK_THROWS_AS(iterate_fiber(phi0, big, spec, 1e-10, 10), ConfigError);
  GridFunction off_grid = make_grid(spec.interval_halfwidth, 51, [](double) { return 0.0; });
  CHECK_THROWS_AS(iterate_fiber(off_grid, off_grid, spec, 1e-10, 10), ConfigError);
}

TEST_CASE("default interval sizing") {
  ProblemSpec wex = make_spec(kExampleText);
  // the fixed point of b <- |h^{-1}(b + 1)| stays below g_bound/(K-1) = 0.5,
  // so the floor of 10 governs
  CHECK(default_interval(wex) == 10.0);

  ProblemSpec trivial = make_spec(kTrivialText);
  CHECK(default_interval(trivial) == 10.0);

  // large forcing with a small derivative ceiling: the recursion oracle is
  // long double bisection of h = 4x + sin x
  ProblemSpec big = make_spec(
      "[functions]\nh=\"4*x + sin(x)\"\nf=\"5*x\"\ng=\"100*cos(x/100)\"\n"
      "[constants]\nK=3\nalpha=5\nbeta=1\ng_bound=100\n");
  auto forward = [](long double t) { return 4.0L * t + sinl(t); };
  long double b = 0.0L;
  for (int k = 0; k < 200; ++k) {
    long double target = b + 100.0L;
    long double lo = 0.0L, hi = 100.0L;
    for (int i = 0; i < 200; ++i) {
      long double mid = 0.5L * (lo + hi);
      (forward(mid) < target ? lo : hi) = mid;
    }
    long double next = 0.5L * (lo + hi);  // the map is odd, both signs agree
    if (fabsl(next - b) < 1e-9L) { b = next; break; }
    b = next;
  }
  double expected = std::fmax(10.0, 2.0 * static_cast<double>(b));
  CHECK(default_interval(big) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(static_cast<double>(b) <= 100.0 / (3.0 - 1.0));  // b* <= g_bound/(K-1)
}

TEST_CASE("trace csv format") {
  IterationTrace t;
  t.steps.push_back({1, 0.5, 0.25, 0.125, 0.001});
  t.steps.push_back({2, 0.25, 0.125, 0.0625, 0.001});
  t.stop = StopReason::Converged;
  std::ostringstream out;
  write_trace_csv(t, out);
  std::string s = out.str();
  CHECK(s.rfind("n,delta_phi,delta_Phi,residual,seconds\n", 0) == 0);
  CHECK(s.find("1,0.5,0.25,0.125,") != std::string::npos);
}
