#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "iods/compare.hh"

using namespace iods;

TEST_CASE("exponential decay closed form", "[compare]") {
  auto mu = kld_exponential(0.8);
  REQUIRE(mu.eval(1, 0) == Catch::Approx(1.0));
  auto half = kld_exponential(0.5);
  REQUIRE(half.eval(8, 3) == Catch::Approx(1.0));
  /* semigroup law */
  REQUIRE(half.eval(half.eval(8, 1), 2) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(kld_exponential(1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(kld_exponential(0.0), std::invalid_argument);
}

TEST_CASE("linear decay closed form", "[compare]") {
  auto mu = kld_linear_decay(1.4);
  REQUIRE(mu.eval(1.4, 1) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(mu.eval(1.4, 0) == Catch::Approx(1.4));
  auto slow = kld_linear_decay(0.5);
  REQUIRE(slow.eval(slow.eval(2, 1), 1) == Catch::Approx(slow.eval(2, 2)));
  REQUIRE(slow.eval(2, 2) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(kld_linear_decay(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(kld_linear_decay(-1.0), std::invalid_argument);
}

TEST_CASE("decay axioms hold on the documented grid for the closed forms", "[compare]") {
  REQUIRE_FALSE(kld_exponential(0.5).check_kld_axioms().has_value());
  REQUIRE_FALSE(kld_exponential(0.97).check_kld_axioms().has_value());
  REQUIRE_FALSE(kld_linear_decay(1.4).check_kld_axioms().has_value());
  REQUIRE_FALSE(kld_linear_decay(0.1).check_kld_axioms().has_value());
  REQUIRE_FALSE(KldFunction::zero().check_kld_axioms().has_value());
}

TEST_CASE("randomized decay axiom suite", "[compare][props]") {
  /* randomized constructor parameters and spot points, plus combinator
   * outputs; failures would pinpoint a broken constructor */
  std::mt19937_64 rng(2026);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  int cases = 0;
  for (int i = 0; i < 250; ++i) {
    KldFunction mu = (i % 2 == 0) ? kld_exponential(0.05 + 0.9 * uni())
                                  : kld_linear_decay(0.05 + 3 * uni());
    for (int k = 0; k < 4; ++k) {
      double c = 10 * uni();
      int s = static_cast<int>(rng() % 12), t = static_cast<int>(rng() % 12);
      REQUIRE(mu.eval(c, 0) == Catch::Approx(c).margin(1e-9));
      REQUIRE(mu.eval(mu.eval(c, s), t) == Catch::Approx(mu.eval(c, s + t)).margin(1e-9));
      REQUIRE(mu.eval(c, s + 1) <= mu.eval(c, s) + 1e-9);
      cases++;
    }
  }
  REQUIRE(cases >= 1000);
}

TEST_CASE("gain functions and inverses", "[compare]") {
  auto id = KFunction::identity();
  REQUIRE(id.eval(3.5) == Catch::Approx(3.5));
  REQUIRE(id.inverse(3.5) == Catch::Approx(3.5));

  auto sq = KFunction::power(1.0, 2.0);
  REQUIRE(sq.eval(3.0) == Catch::Approx(9.0));
  REQUIRE(sq.inverse(9.0) == Catch::Approx(3.0));
  REQUIRE_FALSE(sq.check_k_axioms().has_value());

  /* c + min(c, kappa) as a table interpolant */
  double kappa = 0.05;
  auto robot_gain = KFunction::table({{kappa, 2 * kappa}}, 1.0);
  REQUIRE(robot_gain.eval(0.02) == Catch::Approx(0.04));
  REQUIRE(robot_gain.eval(0.05) == Catch::Approx(0.10));
  REQUIRE(robot_gain.eval(0.25) == Catch::Approx(0.30));
  REQUIRE(robot_gain.inverse(robot_gain.eval(0.17)) == Catch::Approx(0.17));
  REQUIRE(robot_gain.subadditive_on_grid());
  REQUIRE_FALSE(robot_gain.check_k_axioms().has_value());

  REQUIRE(KFunction::zero().is_zero());
  REQUIRE_FALSE(KFunction::zero().has_inverse());
}

TEST_CASE("doubling wrapper evaluates as 2 g(2c) for every tag", "[compare]") {
  std::vector<KFunction> gs = {KFunction::identity(), KFunction::linear(0.7),
                               KFunction::power(0.5, 2.0),
                               KFunction::table({{0.05, 0.1}}, 1.0)};
  for (const auto& g : gs) {
    auto a = g.amplified();
    for (double c : {0.0, 0.1, 0.5, 1.0, 3.7, 9.0})
      REQUIRE(a.eval(c) == Catch::Approx(2 * g.eval(2 * c)).margin(1e-12));
  }
}

TEST_CASE("shifted-gain split bound", "[compare]") {
  /* identity gain: amplified is 4c and the offset is its value at c' */
  auto [gp, sigma] = amplify_bound(kld_exponential(0.5), KFunction::identity(), 1.0);
  REQUIRE(gp.eval(1.0) == Catch::Approx(4.0));
  REQUIRE(sigma == Catch::Approx(4.0));

  auto [gp0, sigma0] = amplify_bound(kld_exponential(0.5), KFunction::power(2.0, 3.0), 0.0);
  REQUIRE(sigma0 == Catch::Approx(0.0).margin(1e-15));

  /* defining inequality on the documented grid */
  std::vector<KFunction> gammas = {KFunction::identity(), KFunction::power(1.0, 2.0),
                                   KFunction::table({{0.05, 0.1}}, 1.0)};
  std::vector<KldFunction> mus = {kld_exponential(0.5), kld_linear_decay(1.0),
                                  KldFunction::zero()};
  for (const auto& gamma : gammas)
    for (const auto& mu : mus)
      for (double cp : {0.0, 0.3, 1.0}) {
        auto [g2, s2] = amplify_bound(mu, gamma, cp);
        for (double c : axiom_c_grid())
          for (int t : {0, 1, 2, 5, 20})
            REQUIRE(mu.eval(gamma.eval(c + cp), t) <= mu.eval(g2.eval(c), t) + s2 + kAxiomTol);
      }
}

TEST_CASE("gain-conjugated decay", "[compare]") {
  auto mu = kld_exponential(0.5);

  /* identity gain leaves the decay unchanged on the grid */
  auto same = transform_kld(mu, KFunction::identity());
  for (double c : axiom_c_grid())
    for (int t : {0, 1, 3, 10})
      REQUIRE(same.eval(c, t) == Catch::Approx(mu.eval(c, t)).margin(1e-9));

  /* squared gain, frozen spot value */
  auto sq = KFunction::power(1.0, 2.0);
  auto mup = transform_kld(mu, sq);
  REQUIRE(mup.eval(sq.eval(2.0), 1) == Catch::Approx(1.0).margin(1e-9));

  /* defining equality and the identity axiom on the grid */
  for (double c : axiom_c_grid()) {
    REQUIRE(mup.eval(sq.eval(c), 0) == Catch::Approx(sq.eval(c)).margin(1e-9));
    for (int t : {1, 2, 7, 20})
      REQUIRE(mup.eval(sq.eval(c), t) == Catch::Approx(sq.eval(mu.eval(c, t))).margin(1e-9));
  }

  REQUIRE_THROWS_AS(transform_kld(mu, KFunction::zero()), std::invalid_argument);
}

TEST_CASE("running-maximum sum bound", "[compare]") {
  auto a = kld_exponential(0.5);
  auto same = max_sum_bound(a, a);
  /* g(c) = max(2*0.5c, 2*0.5c) = c, so the bound is the constant orbit */
  for (double c : {0.0, 0.5, 2.0, 9.0})
    for (int t : {0, 1, 5})
      REQUIRE(same.eval(c, t) == Catch::Approx(c).margin(1e-12));

  auto z = max_sum_bound(KldFunction::zero(), KldFunction::zero());
  REQUIRE(z.eval(3.0, 2) <= 3.0 + 1e-12);

  /* mixed families: the defining inequality on the grid */
  auto b = kld_linear_decay(1.0);
  auto m = max_sum_bound(a, b);
  REQUIRE(a.eval(1, 0) + b.eval(1, 0) <= m.eval(2, 0) + 1e-12);
  for (double c : axiom_c_grid())
    for (int t : {0, 1, 2, 5, 10, 20}) {
      double lhs_a = 0, lhs_b = 0, rhs = 0;
      for (int tp = 0; tp <= t; ++tp) {
        lhs_a = std::max(lhs_a, a.eval(c, tp));
        lhs_b = std::max(lhs_b, b.eval(c, tp));
        rhs = std::max(rhs, m.eval(2 * c, tp));
      }
      REQUIRE(lhs_a + lhs_b <= rhs + kAxiomTol);
    }
}

TEST_CASE("certificate transport across a uniform slack", "[compare]") {
  /* zero slack keeps the offset exactly */
  PiodsCertificate c0{KFunction::power(3.0, 1.5), kld_exponential(0.7), 0.25};
  auto t0 = transport_aiosr(c0, 0.0);
  REQUIRE(t0.rho == Catch::Approx(0.25).margin(0.0));

  PiodsCertificate c1{KFunction::identity(), kld_exponential(0.5), 0.0};
  auto t1 = transport_aiosr(c1, 0.1);
  REQUIRE(t1.gamma.eval(1.0) == Catch::Approx(4.0));
  REQUIRE(t1.rho == Catch::Approx(0.5));

  PiodsCertificate c2{KFunction::identity(), kld_linear_decay(1.0), 0.2};
  auto t2 = transport_aiosr(c2, 1.0);
  REQUIRE(t2.rho == Catch::Approx(5.2));

  REQUIRE_THROWS_AS(transport_aiosr(c1, -0.5), std::invalid_argument);
}

TEST_CASE("iterated decay functions respect the horizon cap", "[compare]") {
  auto mu = KldFunction::iterated([](double c) { return 0.9 * c; }, 100);
  REQUIRE(mu.eval(1.0, 100) == Catch::Approx(std::pow(0.9, 100)));
  REQUIRE_THROWS_AS(mu.eval(1.0, 101), std::domain_error);
}
