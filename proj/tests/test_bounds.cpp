#include <doctest.h>

#include <cmath>
#include <string>

#include "ealign/bounds.hpp"
#include "ealign/errors.hpp"
#include "oracles.hpp"

using namespace ealign;
using doctest::Approx;

TEST_CASE("headline power-law bound: alpha 1/2, M 1, C0 1") {
  const BoundInputs in{1.0, 1.0, Kernel::power_law(0.5), 1.0, 0.0};
  const auto b = compute_beta(in);
  CHECK(b.regime == Regime::OptimizedAnalytic);
  CHECK(b.beta == 16.0);
  CHECK(*b.kStar == 8.0);
  CHECK(*b.k0 == 4.0);
  REQUIRE(b.betaNumeric);
  CHECK(std::fabs(*b.betaNumeric - 16.0) / 16.0 <= 1e-6);

  const auto m = minimize_g(in);
  CHECK(m.kStar == Approx(8.0).epsilon(1e-4));
  CHECK(m.k0 == Approx(4.0).epsilon(1e-9));
  CHECK(*compute_k0(in) == Approx(4.0).epsilon(1e-9));

  // I(k) = 4/k for k >= 2 sqrt 2, so g(k) = k^2 / (k - 4)
  CHECK(g_of_k(in, 8.0) == Approx(16.0).epsilon(1e-14));
  CHECK(g_of_k(in, 16.0) == Approx(64.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(g_of_k(in, 3.9), InadmissibleError);
}

TEST_CASE("analytic and numeric beta agree over the grid") {
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9})
    for (double c0 : {0.2, 0.5, 1.0})
      for (double M : {1.0, 3.0}) {
        CAPTURE(alpha);
        CAPTURE(c0);
        CAPTURE(M);
        std::string why;
        const auto a = beta_analytic_powerlaw(alpha, M, c0, &why);
        REQUIRE_MESSAGE(a, why);
        const auto n = minimize_g({M, c0, Kernel::power_law(alpha), 0.0, 0.0});
        CHECK(std::fabs(n.beta - a->beta) / a->beta <= 1e-6);
        CHECK(std::fabs(n.k0 - a->k0) / a->k0 <= 1e-9);
      }
}

TEST_CASE("analytic power-law path flags the cases it cannot handle") {
  std::string why;
  // ||psi||_1 = 2^alpha / (1 - alpha) = 2 sqrt 2 for alpha = 1/2
  CHECK_FALSE(beta_analytic_powerlaw(0.5, 1.0, 3.0, &why));
  CHECK(why.find("C0") != std::string::npos);
  CHECK_THROWS_AS(beta_analytic_powerlaw(1.2, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(beta_analytic_powerlaw(0.5, 0.0, 1.0), ConfigError);
}

TEST_CASE("maximum principle when C0 exceeds the kernel mass") {
  const auto k = Kernel::power_law(0.5);
  const double l1 = oracle::powerlaw_l1(0.5);
  const BoundInputs in{2.0, 1.0001 * l1, k, 1.5, 4.0};
  const auto b = compute_beta(in);
  CHECK(b.regime == Regime::MaxPrinciple);
  CHECK(b.beta == 0.0);
  CHECK_FALSE(b.k0);
  CHECK_FALSE(compute_k0(in));
  CHECK_THROWS_AS(minimize_g(in), DomainError);
  const auto r = bound_report(in);
  CHECK(r.rhoBound == 1.5);
  CHECK(r.gamma == Approx(l1 * 1.5).epsilon(1e-14));
  // g is admissible everywhere, g(0) = 0
  CHECK(g_of_k(in, 0.0) == 0.0);
}

TEST_CASE("bounded kernels use the closed formulas bit for bit") {
  for (double sup : {0.3, 1.0, 2.5}) {
    const auto k = Kernel::constant(sup);
    for (double M : {1.0, 3.0})
      for (double c0 : {0.1, 0.2}) {
        const BoundInputs in{M, c0, k, M, 0.0};
        if (c0 > l1_norm(k)) continue;
        const auto r = bound_report(in);
        CHECK(r.regime == Regime::BoundedKernel);
        CHECK(r.beta == M * sup / c0);
        CHECK(r.gamma == M * sup);
      }
  }
  const auto tab = Kernel::tabulated({0.01, 0.03, 0.5}, {10.0, 0.5, 0.5});
  const BoundInputs in{1.0, 0.3, tab, 1.0, 0.0};
  const auto r = bound_report(in);
  CHECK(r.regime == Regime::BoundedKernel);
  CHECK(r.beta == 1.0 * 10.0 / 0.3);
  CHECK(r.gamma == 10.0);
  // the optimized infimum can only improve on the closed formula
  CHECK(minimize_g(in).beta <= r.beta * (1.0 + 1e-6));
}

TEST_CASE("gamma for the power law") {
  const auto k = Kernel::power_law(0.5);
  const BoundInputs in{1.0, 1.0, k, 2.0, 0.0};
  CHECK(compute_gamma(in, 16.0) == Approx(2.0 * std::sqrt(2.0) * 16.0).epsilon(1e-14));
  CHECK(compute_gamma(in, 1.0) == Approx(2.0 * std::sqrt(2.0) * 2.0).epsilon(1e-14));
}

TEST_CASE("rough and refined bounds dominate beta") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    const BoundInputs in{1.0, 0.5, Kernel::power_law(alpha), 1.0, 0.0};
    const double beta = compute_beta(in).beta;
    const double rough = rough_bound_step1(in);
    CHECK(rough >= beta);
    const double k0 = *compute_k0(in);
    for (double f : {1.01, 2.0, 10.0}) CHECK(refined_bound_step2(in, k0 * f) >= beta);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(compute_beta({0.0, 1.0, Kernel::power_law(0.5), 0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(compute_beta({1.0, -1.0, Kernel::power_law(0.5), 0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(compute_beta({1.0, 1.0, Kernel::power_law(0.5), -1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(g_of_k({1.0, 1.0, Kernel::power_law(0.5), 0.0, 0.0}, -1.0), DomainError);
}
