#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "iods/monitor.hh"

using namespace iods;

TEST_CASE("zero input costs reduce the bound to the offset", "[monitor]") {
  CostTrace tr;
  tr.I.assign(10, 0.0);
  tr.O.assign(10, 0.1);
  PiodsCertificate cert{KFunction::identity(), kld_exponential(0.5), 0.25};
  auto rep = eval_piods(tr, cert);
  for (double v : rep.rhs) REQUIRE(v == Catch::Approx(0.25));
  REQUIRE(rep.holds);
  REQUIRE(rep.min_margin == Catch::Approx(0.15));
}

TEST_CASE("single spike decays geometrically", "[monitor]") {
  CostTrace tr;
  tr.I.assign(6, 0.0);
  tr.I[3] = 1.0;
  tr.O.assign(6, 0.0);
  PiodsCertificate cert{KFunction::identity(), kld_exponential(0.5), 0.0};
  auto rep = eval_piods(tr, cert);
  REQUIRE(rep.rhs[5] == Catch::Approx(0.25));
  REQUIRE(rep.rhs[3] == Catch::Approx(1.0));
  REQUIRE(rep.rhs[4] == Catch::Approx(0.5));
}

TEST_CASE("incremental recursions match the frozen sequences", "[monitor]") {
  IncrementalBound exp_inc(kld_exponential(0.5), KFunction::identity(), 0.0);
  std::vector<double> got;
  for (double i : {1.0, 0.0, 0.0}) got.push_back(exp_inc.push(i));
  REQUIRE(got == std::vector<double>{1.0, 0.5, 0.25});

  IncrementalBound lin_inc(kld_linear_decay(1.4), KFunction::linear(1.4), 0.0);
  got.clear();
  for (double i : {0.0, 1.0, 0.0}) got.push_back(lin_inc.push(i));
  REQUIRE(got[0] == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(got[1] == Catch::Approx(1.4));
  REQUIRE(got[2] == Catch::Approx(0.0).margin(1e-15));

  IncrementalBound zero_inc(kld_linear_decay(0.7), KFunction::identity(), 0.0);
  for (double v : std::vector<double>(5, 0.0)) REQUIRE(zero_inc.push(v) == 0.0);
}

TEST_CASE("incremental bound equals brute force on random traces", "[monitor][props]") {
  std::mt19937_64 rng(1234);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int tag = 0; tag < 2; ++tag) {
    for (int trial = 0; trial < 10000; ++trial) {
      KldFunction mu = tag == 0 ? kld_exponential(0.05 + 0.9 * uni())
                                : kld_linear_decay(0.05 + 2 * uni());
      KFunction gamma = KFunction::linear(0.1 + 3 * uni());
      double rho = uni();
      PiodsCertificate cert{gamma, mu, rho};
      CostTrace tr;
      int T = 5 + static_cast<int>(rng() % 25);
      for (int t = 0; t < T; ++t) {
        tr.I.push_back(5 * uni() * (rng() % 3 == 0 ? 1.0 : 0.0));
        tr.O.push_back(uni());
      }
      auto fast = eval_piods(tr, cert);
      auto slow = piods_rhs_bruteforce(tr.I, cert);
      for (int t = 0; t < T; ++t)
        REQUIRE(fast.rhs[static_cast<std::size_t>(t)] ==
                Catch::Approx(slow[static_cast<std::size_t>(t)]).margin(1e-12));
    }
  }
}

TEST_CASE("verdicts are monotone in the certificate parameters", "[monitor][props]") {
  std::mt19937_64 rng(4321);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 500; ++trial) {
    CostTrace tr;
    for (int t = 0; t < 15; ++t) {
      tr.I.push_back(2 * uni());
      tr.O.push_back(2 * uni());
    }
    double s = 0.2 + 2 * uni(), rho = uni();
    KldFunction mu = kld_exponential(0.5);
    bool base = eval_piods(tr, {KFunction::linear(s), mu, rho}).holds;
    if (base) {
      REQUIRE(eval_piods(tr, {KFunction::linear(s + 1), mu, rho}).holds);
      REQUIRE(eval_piods(tr, {KFunction::linear(s), mu, rho + 1}).holds);
    }
  }
}

TEST_CASE("offset fitting is exact", "[monitor]") {
  CostTrace one;
  one.I = {0.0};
  one.O = {1.0};
  REQUIRE(fit_rho({one}, KFunction::identity(), kld_exponential(0.5)) == Catch::Approx(1.0));

  std::mt19937_64 rng(55);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 200; ++trial) {
    KFunction gamma = KFunction::linear(0.5 + uni());
    KldFunction mu = kld_exponential(0.3 + 0.5 * uni());
    std::vector<CostTrace> traces;
    for (int k = 0; k < 3; ++k) {
      CostTrace tr;
      for (int t = 0; t < 12; ++t) {
        tr.I.push_back(2 * uni());
        tr.O.push_back(2 * uni());
      }
      traces.push_back(tr);
    }
    double rho = fit_rho(traces, gamma, mu);
    bool all = true;
    for (const auto& tr : traces)
      all = all && eval_piods(tr, {gamma, mu, rho}, 1e-12).holds;
    REQUIRE(all);
    if (rho > 1e-9) {
      bool tight = false;
      for (const auto& tr : traces)
        if (!eval_piods(tr, {gamma, mu, rho - 1e-9}, 0.0).holds) tight = true;
      REQUIRE(tight);
    }
    /* traces that already satisfy a certificate fit at most its offset */
    PiodsCertificate slack{gamma, mu, rho + 0.5};
    for (const auto& tr : traces) REQUIRE(eval_piods(tr, slack).holds);
    REQUIRE(fit_rho(traces, gamma, mu) <= slack.rho);
  }
}

TEST_CASE("scalar gain fitting by bisection", "[monitor]") {
  std::mt19937_64 rng(56);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 100; ++trial) {
    double true_gain = 0.5 + 2 * uni();
    KldFunction mu = kld_exponential(0.5);
    /* generate traces exactly on the known certificate's bound */
    std::vector<CostTrace> traces;
    for (int k = 0; k < 3; ++k) {
      CostTrace tr;
      IncrementalBound inc(mu, KFunction::linear(true_gain), 0.0);
      for (int t = 0; t < 10; ++t) {
        double i = 2 * uni();
        tr.I.push_back(i);
        tr.O.push_back(inc.push(i));
      }
      traces.push_back(tr);
    }
    auto fitted = fit_gamma(traces, mu, 0.0);
    REQUIRE(fitted.has_value());
    REQUIRE(*fitted <= true_gain + 1e-5);
    for (const auto& tr : traces)
      REQUIRE(eval_piods(tr, {*fitted > 0 ? KFunction::linear(*fitted) : KFunction::zero(), mu,
                              0.0},
                         1e-5)
                  .holds);
  }

  /* infeasible: positive output with zero input never fits a scalar gain */
  CostTrace bad;
  bad.I = {0.0};
  bad.O = {1.0};
  REQUIRE_FALSE(fit_gamma({bad}, kld_exponential(0.5), 0.0).has_value());
}

TEST_CASE("monitors reject unsupported decay families gracefully", "[monitor]") {
  auto it = KldFunction::iterated([](double c) { return 0.5 * c; });
  PiodsCertificate cert{KFunction::identity(), it, 0.0};
  CostTrace tr;
  tr.I = {1.0, 0.0};
  tr.O = {0.5, 0.5};
  /* falls back to brute force */
  auto rep = eval_piods(tr, cert);
  REQUIRE(rep.rhs[0] == Catch::Approx(1.0));
  REQUIRE(rep.rhs[1] == Catch::Approx(0.5));
}
