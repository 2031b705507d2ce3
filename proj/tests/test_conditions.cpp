#include "doctest.h"

#include <cmath>
#include <random>

#include "ifeq/conditions.hpp"

using namespace ifeq;

namespace {

const Constants kExampleConstants{3.0, 5.0, 1.0, 1.0};

// Window endpoints recomputed in extended precision:
// alpha*K/2 -+ sqrt(alpha^2 K^2 - 4 beta)/2.
long double window_lo_l(long double K, long double alpha, long double beta) {
  return 0.5L * alpha * K - 0.5L * sqrtl(alpha * alpha * K * K - 4.0L * beta);
}

}  // namespace

TEST_CASE("the worked example validates in the large-alpha case") {
  ConditionReport r = validate(kExampleConstants);
  CHECK(r.solvability_case == SolvabilityCase::LargeAlpha);
  CHECK(r.beta_bound == 26.0);  // (K-1)(alpha K - K + 1)
  CHECK(r.case_threshold == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(r.discriminant == doctest::Approx(221.0).epsilon(1e-15));

  const double lo = static_cast<double>(window_lo_l(3.0L, 5.0L, 1.0L));
  CHECK(r.L_window.lo == doctest::Approx(lo).epsilon(1e-14));
  CHECK(r.L_window.hi == 2.0);
  CHECK(r.L_window.hi_open);
  CHECK(r.rho_window.lo == doctest::Approx(lo).epsilon(1e-14));
  CHECK(r.rho_window.hi == 7.5);
  CHECK(r.rho_window.hi_open);
}

TEST_CASE("hypothesis violations are rejected") {
  CHECK_THROWS_AS(validate(Constants{1.0, 1.0, 0.1, 1.0}), HypothesisViolation);
  CHECK_THROWS_AS(validate(Constants{0.5, 1.0, 0.1, 1.0}), HypothesisViolation);
  CHECK_THROWS_AS(validate(Constants{3.0, -1.0, 0.1, 1.0}), HypothesisViolation);
  CHECK_THROWS_AS(validate(Constants{3.0, 5.0, 0.0, 1.0}), HypothesisViolation);
  CHECK_THROWS_AS(validate(Constants{3.0, 5.0, 1.0, std::nan("")}), HypothesisViolation);
}

TEST_CASE("the small-alpha beta bound") {
  // alpha = 0.5 < 2(1 - 1/1.5) = 2/3, bound = alpha^2 K^2 / 4 = 0.140625 < beta
  try {
    validate(Constants{1.5, 0.5, 0.2, 1.0});
    FAIL("expected BetaTooLarge");
  } catch (const BetaTooLarge& e) {
    CHECK(e.bound() == 0.140625);
    CHECK(e.beta() == 0.2);
  }
  // the same constants with beta inside the bound pass
  ConditionReport r = validate(Constants{1.5, 0.5, 0.1, 1.0});
  CHECK(r.solvability_case == SolvabilityCase::SmallAlpha);
}

TEST_CASE("midpoint policy on the worked example") {
  ConditionReport r = validate(kExampleConstants);
  auto [L, rho] = choose_parameters(r, ChoicePolicy::Midpoint);

  const long double lo = window_lo_l(3.0L, 5.0L, 1.0L);
  const long double l_mid = 0.5L * (lo + 2.0L * (1.0L - 1e-9L));
  const long double rho_mid = 0.5L * (lo + 7.5L * (1.0L - 1e-9L));
  CHECK(L == doctest::Approx(static_cast<double>(l_mid)).epsilon(1e-12));
  CHECK(rho == doctest::Approx(static_cast<double>(rho_mid)).epsilon(1e-12));
  CHECK(L == doctest::Approx(1.0335).epsilon(1e-4));
  CHECK(rho == doctest::Approx(3.7835).epsilon(1e-4));
  CHECK(r.lambda_factor < 1.0);
  CHECK(r.psi_factor < 1.0);
}

TEST_CASE("min policy picks the lower endpoints") {
  ConditionReport r = validate(kExampleConstants);
  auto [L, rho] = choose_parameters(r, ChoicePolicy::MinLMinRho);
  CHECK(L == r.L_window.lo);
  CHECK(rho == r.rho_window.lo);
  CHECK(r.lambda_factor == doctest::Approx((L + 1.0) / 3.0).epsilon(1e-15));
}

TEST_CASE("explicit choices are window-checked") {
  ConditionReport r = validate(kExampleConstants);
  auto [L, rho] = choose_parameters(r, 1.0, 1.0);
  CHECK(L == 1.0);
  CHECK(rho == 1.0);
  CHECK(r.lambda_factor == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.psi_factor == doctest::Approx(2.0 / 15.0).epsilon(1e-15));

  ConditionReport r2 = validate(kExampleConstants);
  CHECK_THROWS_AS(choose_parameters(r2, 2.5, 1.0), ExplicitOutOfWindow);  // L >= K-1
  CHECK_THROWS_AS(choose_parameters(r2, 2.0, 1.0), ExplicitOutOfWindow);  // open end
  CHECK_THROWS_AS(choose_parameters(r2, 1.0, 7.5), ExplicitOutOfWindow);  // rho end open
  CHECK_THROWS_AS(choose_parameters(r2, 0.01, 1.0), ExplicitOutOfWindow); // below self-map
}

TEST_CASE("the two beta bounds meet at the case boundary") {
  std::mt19937_64 rng(60601);
  std::uniform_real_distribution<double> Ks(1.0 + 1e-6, 10.0);
  for (int i = 0; i < 100; ++i) {
    double K = Ks(rng);
    double alpha = 2.0 * (1.0 - 1.0 / K);
    double small_bound = 0.25 * alpha * alpha * K * K;
    double large_bound = (K - 1.0) * (alpha * K - K + 1.0);
    CHECK(std::fabs(small_bound - large_bound) <=
          1e-12 * std::fmax(std::fabs(small_bound), std::fabs(large_bound)));
  }
}

TEST_CASE("every passing report has a positive discriminant and factors below 1") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> Ks(1.01, 8.0);
  std::uniform_real_distribution<double> alphas(0.05, 9.0);
  std::uniform_real_distribution<double> scale(0.05, 0.95);
  int passing = 0;
  for (int i = 0; i < 500; ++i) {
    double K = Ks(rng), alpha = alphas(rng);
    double threshold = 2.0 * (1.0 - 1.0 / K);
    double bound = alpha < threshold ? 0.25 * alpha * alpha * K * K
                                     : (K - 1.0) * (alpha * K - K + 1.0);
    Constants c{K, alpha, scale(rng) * bound, 1.0};
    if (!(c.beta > 0)) continue;
    ConditionReport r = validate(c);
    const double aK = alpha * K;
    CHECK(r.discriminant > 0.0);
    if (r.solvability_case == SolvabilityCase::LargeAlpha) {
      // the large-alpha bound sits below the small-alpha one
      CHECK(r.beta_bound <= 0.25 * aK * aK * (1 + 1e-12));
    }
    CHECK(!r.L_window.empty());
    CHECK(!r.rho_window.empty());
    auto [L, rho] = choose_parameters(r, ChoicePolicy::Midpoint);
    CHECK(r.lambda_factor < 1.0);
    CHECK(r.psi_factor < 1.0);
    // self-mapping and strictness bounds by direct substitution
    CHECK((L * L + c.beta) / aK <= L * (1 + 1e-12));
    CHECK(L < K - 1.0);
    CHECK((rho * rho + c.beta) / aK <= rho * (1 + 1e-12));
    CHECK(rho < 0.5 * aK);
    ++passing;
  }
  CHECK(passing > 400);
}

TEST_CASE("constant estimation on closed forms") {
  Expr hp = parse_expr("4");          // h = 4x
  Expr fp = parse_expr("5");          // f = 5x
  Expr g = parse_expr("cos(x)");
  Expr gp = parse_expr("-sin(x)");
  Constants c = estimate_constants(hp, fp, g, gp, 10.0, 4001);
  CHECK(c.K == 4.0);
  CHECK(c.alpha == 5.0);
  CHECK(c.beta == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(c.g_bound == 1.0);  // the probe grid contains 0, where cos is exactly 1

  Expr hp2 = parse_expr("cos(x) + 4");
  Constants c2 = estimate_constants(hp2, fp, g, gp, 10.0, 4001);
  CHECK(c2.K == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(c2.K >= 3.0);  // grid minimum cannot undershoot the true infimum
}

TEST_CASE("unbounded g is rejected at estimation time") {
  Expr one = parse_expr("1");
  CHECK_THROWS_AS(
      estimate_constants(one, one, parse_expr("x"), parse_expr("1"), 10.0, 1001),
      UnboundedFunctionError);
  CHECK_THROWS_AS(
      estimate_constants(one, one, parse_expr("cos(x) + 0.01*x"), parse_expr("1"), 10.0, 1001),
      UnboundedFunctionError);
  // bounded g whose maximum lies outside the base window must survive
  Constants c = estimate_constants(one, one, parse_expr("sin(x)"), parse_expr("cos(x)"), 1.0, 1001);
  CHECK(c.g_bound == doctest::Approx(std::sin(1.0)).epsilon(1e-12));
}

TEST_CASE("report json carries windows, factors and provenance") {
  ConditionReport r = validate(kExampleConstants);
  choose_parameters(r, 1.0, 1.0);
  r.provenance_alpha = Provenance::Estimated;
  nlohmann::json j = report_to_json(r);
  CHECK(j["case"] == "large_alpha");
  CHECK(j["beta_bound"] == 26.0);
  CHECK(j["L_window"]["hi_open"] == true);
  CHECK(j["chosen_L"] == 1.0);
  CHECK(j["constants"]["alpha"]["provenance"] == "estimated");
  CHECK(j["constants"]["K"]["provenance"] == "declared");
}
