#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "iods/abstraction.hh"
#include "iods/checkers.hh"
#include "iods/scenarios.hh"
#include "iods/transport.hh"

using namespace iods;

namespace {

CostedSystem costed(FiniteSystem s) {
  CostedSystem cs;
  cs.sys = std::move(s);
  return cs;
}

/* identity relation tuples on one system */
ExplicitRelation identity_relation(const FiniteSystem& s) {
  ExplicitRelation r;
  for (int x = 0; x < static_cast<int>(s.n_states()); ++x)
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u) r.tuples.push_back({x, x, u, u});
  return r;
}

CostedSystem e1_abstraction(AbstractionResult* out_ar = nullptr) {
  SwitchedAffinePlant p;
  p.modes = {{"f", {{0.6}}, {0.0}}};
  p.domain = Box({-1}, {1});
  p.norm = Norm::Inf;
  p.initial_box = p.domain;
  GridSpec g(p.domain, {0.2}, 0.2, Norm::Inf);
  auto ar = abstract_plant(p, g, std::nullopt, 0.2);
  if (out_ar) *out_ar = ar;
  return ar.abs;
}

}  // namespace

TEST_CASE("exact simulation: identity relation on a system", "[relations]") {
  CostedSystem cs = dropout_automaton();
  auto v = check_sr(cs, cs, identity_relation(cs.sys));
  REQUIRE(v.holds);
  REQUIRE(v.exhaustive);
}

TEST_CASE("exact simulation: missing initial match fails clause 1", "[relations]") {
  CostedSystem cs = dropout_automaton();
  ExplicitRelation r = identity_relation(cs.sys);
  /* drop every tuple that relates a1 (an initial state) */
  ExplicitRelation r2;
  for (auto& t : r.tuples)
    if (t[1] != 1) r2.tuples.push_back(t);
  auto v = check_sr(cs, cs, r2);
  REQUIRE_FALSE(v.holds);
  REQUIRE(v.ce->clause == "initial");
}

TEST_CASE("exact simulation: one-state full abstraction of the dropout automaton",
          "[relations]") {
  CostedSystem con = dropout_automaton();
  CostedSystem hat = costed(SystemBuilder()
                                .state("m", {}, {0})
                                .mark_initial("m")
                                .disturbance("bot", {}, {0})
                                .disturbance("drop", {}, {1})
                                .arc("m", "bot", "m")
                                .arc("m", "drop", "m")
                                .build());
  ExplicitRelation full;
  for (int x = 0; x < 2; ++x)
    for (int u = 0; u < 2; ++u)
      for (int hu = 0; hu < 2; ++hu) full.tuples.push_back({0, x, hu, u});
  auto v = check_sr(con, hat, full);
  REQUIRE(v.holds);
}

TEST_CASE("input-output refinement with uniform slack", "[relations]") {
  CostedSystem con = dropout_automaton();
  CostedSystem hat = con;
  ExplicitRelation rel = identity_relation(con.sys);

  auto v0 = check_iosr(con, hat, rel, 0.0);
  REQUIRE(v0.holds);

  /* concrete output 1 against abstract 0 needs slack 1 */
  con.O = CostModel::disc_indicator(0, {1.0, 1.0});
  hat.O = CostModel::zero();
  REQUIRE_FALSE(check_iosr(con, hat, rel, 0.0).holds);
  REQUIRE(check_iosr(con, hat, rel, 0.0).ce->clause == "cost-O");
  REQUIRE(check_iosr(con, hat, rel, 1.0).holds);
}

TEST_CASE("no uniform-slack relation survives unbounded outputs", "[relations]") {
  /* a truncated witness set from an unbounded state space: output cost
   * grows linearly with the state, the single abstract state cannot bound
   * it by any fixed slack */
  SystemBuilder b;
  int n = 12;
  for (int i = 0; i < n; ++i) b.state("x" + std::to_string(i), {static_cast<double>(i)}, {});
  b.mark_initial("x0").input("bot");
  for (int i = 0; i < n; ++i) b.arc("x" + std::to_string(i), "bot", "x" + std::to_string(std::min(i + 1, n - 1)));
  CostedSystem con = costed(b.build());
  con.O = CostModel::dist_to_box(Box({0}, {1}), Norm::Inf); /* grows with the state */
  CostedSystem hat = costed(SystemBuilder().state("m", {}, {0}).mark_initial("m").input("bot")
                                .arc("m", "bot", "m").build());
  ExplicitRelation rel;
  for (int i = 0; i < n; ++i) rel.tuples.push_back({0, i, 0, 0});
  for (double eps : {0.0, 1.0, 5.0}) {
    auto v = check_iosr(con, hat, rel, eps);
    REQUIRE_FALSE(v.holds);
    REQUIRE(v.ce->clause == "cost-O");
  }
}

TEST_CASE("plain contractive check fails when kappa misses initial coverage", "[relations]") {
  AbstractionResult ar;
  CostedSystem hat = e1_abstraction(&ar);
  HybridPlant hp;
  hp.plant.modes = {{"f", {{0.6}}, {0.0}}};
  hp.plant.domain = Box({-1}, {1});
  hp.plant.norm = Norm::Inf;
  hp.plant.initial_box = hp.plant.domain;
  SamplingSpec spec;
  spec.state_box = hp.plant.domain;
  spec.resolution = {0.05};
  spec.disturbance_samples = {{0.0}};
  SampledHybridSide side(hp, spec);

  auto prof = ar.profile;
  prof.kappa = 0.05; /* below the grid half-spacing */
  auto v = check_acsr(side, hat, prof, nullptr);
  REQUIRE_FALSE(v.holds);
  REQUIRE(v.ce->clause == "initial");
}

TEST_CASE("plain contractive check rejects an understated contraction", "[relations]") {
  AbstractionResult ar;
  CostedSystem hat = e1_abstraction(&ar);
  HybridPlant hp;
  hp.plant.modes = {{"f", {{0.6}}, {0.0}}};
  hp.plant.domain = Box({-1}, {1});
  hp.plant.norm = Norm::Inf;
  hp.plant.initial_box = hp.plant.domain;
  SamplingSpec spec;
  spec.state_box = Box({-6}, {6});
  spec.resolution = {0.05};
  spec.disturbance_samples = {{0.0}};
  SampledHybridSide side(hp, spec);

  auto prof = ar.profile;
  prof.beta = 0.5;
  auto v = check_acsr(side, hat, prof, nullptr);
  REQUIRE_FALSE(v.holds);
  REQUIRE(v.ce->clause == "successor");
}

TEST_CASE("alternating check: the degenerate exact case on identical systems", "[relations]") {
  CostedSystem cs = dropout_automaton();
  cs.sys.split_declared = true;
  RelationProfile ident;
  ident.orientation = Orientation::Alternating;
  ident.dx = StateDistance::ball(Norm::Inf);
  ident.pu = InputPairing::identity();
  ident.sd = InputDistance::zero();
  ident.kappa = 0;
  ident.beta = 0;
  ident.lambda = 0;
  auto v = check_acasr(cs, cs, ident, nullptr);
  REQUIRE(v.holds);
  REQUIRE(v.exhaustive);
}

TEST_CASE("alternating check requires the declared split and a valid contraction",
          "[relations]") {
  CostedSystem cs = dropout_automaton();
  RelationProfile ident;
  ident.orientation = Orientation::Alternating;
  ident.dx = StateDistance::ball(Norm::Inf);
  ident.pu = InputPairing::identity();
  ident.sd = InputDistance::zero();
  REQUIRE_THROWS_AS(check_acasr(cs, cs, ident, nullptr), std::invalid_argument);

  cs.sys.split_declared = true;
  ident.beta = 1.0;
  REQUIRE_THROWS_AS(check_acasr(cs, cs, ident, nullptr), std::invalid_argument);
  ident.beta = 0;
  ident.orientation = Orientation::Plain;
  REQUIRE_THROWS_AS(check_acasr(cs, cs, ident, nullptr), std::invalid_argument);
}

TEST_CASE("ball membership is monotone in the radius", "[relations][props]") {
  std::mt19937_64 rng(31);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  StateDistance dx = StateDistance::ball(Norm::Inf);
  for (int i = 0; i < 1000; ++i) {
    Vec a = {4 * uni() - 2, 4 * uni() - 2};
    Vec b = {4 * uni() - 2, 4 * uni() - 2};
    double d = dx.eval(a, {}, b, {});
    double eps = 3 * uni();
    double epsp = eps + 2 * uni();
    if (d <= eps) REQUIRE(d <= epsp);
  }
}

TEST_CASE("maximal exact alternating relation", "[relations]") {
  CostedSystem cs = dropout_automaton();
  cs.sys.split_declared = true;

  SECTION("identical systems keep the diagonal") {
    auto rel = max_asr(cs, cs);
    auto pairs = rel.state_pairs();
    REQUIRE(pairs.count({0, 0}));
    REQUIRE(pairs.count({1, 1}));
    auto v = check_asr(cs, cs, rel);
    REQUIRE(v.holds);
  }

  SECTION("merging abstraction keeps the full product") {
    CostedSystem hat = costed(SystemBuilder()
                                  .state("m", {}, {0})
                                  .mark_initial("m")
                                  .disturbance("bot", {}, {0})
                                  .disturbance("drop", {}, {1})
                                  .arc("m", "bot", "m")
                                  .arc("m", "drop", "m")
                                  .build());
    hat.sys.split_declared = true;
    auto rel = max_asr(hat, cs);
    auto pairs = rel.state_pairs();
    REQUIRE(pairs.count({0, 0}));
    REQUIRE(pairs.count({0, 1}));
    auto v = check_asr(hat, cs, rel);
    REQUIRE(v.holds);
  }

  SECTION("disjoint realizable control structure yields the empty relation") {
    /* the abstract side can always move, the concrete side blocks on every
     * control, so no pair survives */
    CostedSystem hat = costed(SystemBuilder()
                                  .state("m", {}, {0})
                                  .mark_initial("m")
                                  .control("go", {}, {0})
                                  .disturbance("bot", {}, {0})
                                  .arc("m", "go|bot", "m")
                                  .build());
    hat.sys.split_declared = true;
    CostedSystem con = costed(SystemBuilder()
                                  .state("c", {}, {0})
                                  .mark_initial("c")
                                  .control("go", {}, {0})
                                  .disturbance("bot", {}, {0})
                                  .build());
    con.sys.split_declared = true;
    auto rel = max_asr(hat, con);
    REQUIRE(rel.tuples.empty());
  }
}

TEST_CASE("trace matching follows the recursion", "[relations]") {
  AbstractionResult ar;
  CostedSystem hat = e1_abstraction(&ar);

  auto make_steps = [&](const std::vector<double>& nus, double x0) {
    std::vector<ConcreteStep> steps;
    double x = x0;
    for (double nu : nus) {
      steps.push_back({{x}, {}, {"", {}, {}}, {"", {nu}, {}}});
      x = 0.6 * x + nu;
    }
    return steps;
  };

  SECTION("zero disturbance: geometric eps sequence") {
    auto steps = make_steps(std::vector<double>(10, 0.0), 0.73);
    auto m = match_trace(hat, ar.profile, steps);
    REQUIRE(m.ok);
    REQUIRE(m.eps[0] == Catch::Approx(0.2));
    REQUIRE(m.eps[1] == Catch::Approx(0.32));
    for (std::size_t t = 0; t < m.eps.size(); ++t) {
      double closed_form = 0.2 * (1 - std::pow(0.6, t + 1)) / 0.4;
      REQUIRE(m.eps[t] == Catch::Approx(closed_form).margin(1e-12));
      REQUIRE(m.eps[t] <= 0.5 + 1e-12);
    }
  }

  SECTION("single unit disturbance") {
    auto steps = make_steps({1.0, 0.0, 0.0}, 0.0);
    auto m = match_trace(hat, ar.profile, steps);
    REQUIRE(m.ok);
    REQUIRE(m.eps[0] == Catch::Approx(0.2));
    REQUIRE(m.eps[1] == Catch::Approx(1.32));
  }
}

TEST_CASE("checker soundness: matched traces never fail after a passing check",
          "[relations][props]") {
  AbstractionResult ar;
  CostedSystem hat = e1_abstraction(&ar);
  std::mt19937_64 rng(404);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  ContractionBounds cb = gamma_bounds(ar.profile, 0.8);

  for (int run = 0; run < 1000; ++run) {
    std::vector<ConcreteStep> steps;
    double x = -1 + 2 * uni();
    std::vector<double> sds;
    for (int t = 0; t < 25; ++t) {
      double nu = (2 * uni() - 1);
      steps.push_back({{x}, {}, {"", {}, {}}, {"", {nu}, {}}});
      x = 0.6 * x + nu;
    }
    auto m = match_trace(hat, ar.profile, steps);
    REQUIRE(m.ok);
    /* the closed-form bound on the recursion */
    for (std::size_t t = 0; t < m.eps.size(); ++t) {
      double bound = cb.kappa_delta;
      double running = 0;
      for (std::size_t tp = 0; tp < t; ++tp) {
        int dt = static_cast<int>(t - 1 - tp);
        running = std::max(running, cb.mu_delta.eval(cb.gamma_delta * m.sd[tp], dt));
      }
      bound += running;
      REQUIRE(m.eps[t] <= bound + 1e-9);
    }
  }
}

TEST_CASE("trace matching on jittered finite copies", "[relations][props]") {
  std::mt19937_64 rng(77);
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + static_cast<int>(rng() % 3);
    double kappa = 1.0; /* dominates the coordinate spread */
    SystemBuilder hb, cb;
    std::vector<double> coords;
    for (int i = 0; i < n; ++i) coords.push_back(0.4 * uni());
    for (int i = 0; i < n; ++i) {
      hb.state("h" + std::to_string(i), {coords[i]}, {});
      cb.state("c" + std::to_string(i), {coords[i] + 0.2 * (uni() - 0.5)}, {});
    }
    hb.mark_initial("h0");
    cb.mark_initial("c0");
    hb.input("bot");
    cb.input("bot");
    FiniteSystem hs = hb.build(), csys = cb.build();
    for (int x = 0; x < n; ++x) {
      std::vector<int> succ = {static_cast<int>(rng() % n)};
      hs.set_succ(x, 0, succ);
      csys.set_succ(x, 0, succ);
    }
    CostedSystem hat = costed(hs), con = costed(csys);
    RelationProfile p;
    p.orientation = Orientation::Plain;
    p.dx = StateDistance::ball(Norm::Inf);
    p.pu = InputPairing::all_with_bot();
    p.sd = InputDistance::disturbance_gap(Norm::Inf);
    p.kappa = kappa;
    p.beta = 0.5;
    p.lambda = 1.0;
    auto v = check_acsr(con, hat, p, nullptr);
    REQUIRE(v.holds);
    for (int runs = 0; runs < 25; ++runs) {
      Behavior b;
      int x = 0;
      auto pol = StepPolicy::uniform(rng());
      for (int t = 0; t < 10; ++t) {
        b.xs.push_back(x);
        b.us.push_back(0);
        x = step(con.sys, x, 0, pol);
      }
      auto m = match_trace(hat, p, con, b);
      REQUIRE(m.ok);
    }
  }
}

TEST_CASE("contraction bound constants", "[relations]") {
  RelationProfile p;
  p.kappa = 0.2;
  p.beta = 0.6;
  p.lambda = 1.0;
  auto cb = gamma_bounds(p, 0.8);
  REQUIRE(cb.kappa_delta == Catch::Approx(0.5));
  REQUIRE(cb.gamma_delta == Catch::Approx(5.0));
  REQUIRE(cb.mu_delta.eval(2.0, 1) == Catch::Approx(1.6));

  p.kappa = 0.05;
  p.beta = 0.8;
  REQUIRE(gamma_bounds(p, 0.9).kappa_delta == Catch::Approx(0.25));

  p.kappa = 0.25e-3 / std::sqrt(2.0);
  p.beta = 0.997;
  REQUIRE(gamma_bounds(p, 0.9985).kappa_delta == Catch::Approx(0.0589255).margin(1e-6));

  REQUIRE_THROWS_AS(gamma_bounds(p, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(gamma_bounds(p, 1.0), std::invalid_argument);
}

TEST_CASE("input mismatch function", "[relations]") {
  SECTION("structural split: the disturbance norm") {
    RelationProfile p;
    p.pu = InputPairing::control_equal();
    p.sd = InputDistance::disturbance_gap(Norm::Two);
    auto f = mismatch_gamma(p);
    REQUIRE(f.eval_dcoords({3.0, 4.0}) == Catch::Approx(5.0));
    REQUIRE(f.eval_dcoords({0.0, 0.0}) == 0.0);
  }
  SECTION("explicit pairing table: brute-force maximum") {
    CostedSystem con = dropout_automaton();
    CostedSystem hat = dropout_automaton();
    /* give the concrete disturbances coordinates to measure */
    con.sys.disturbances[0].coords = {0.0};
    con.sys.disturbances[1].coords = {2.0};
    hat.sys.disturbances[0].coords = {0.0};
    hat.sys.disturbances[1].coords = {0.5};
    RelationProfile p;
    p.sd = InputDistance::disturbance_gap(Norm::Inf);
    p.pu = InputPairing::explicit_pairs({{0, 0}, {1, 1}, {0, 1}});
    auto f = mismatch_gamma(p, &hat, &con);
    /* oracle: max over paired abstract inputs of the gap */
    double expect_u1 = std::max(std::abs(2.0 - 0.5), std::abs(2.0 - 0.0));
    REQUIRE(f.eval_flat(1) == Catch::Approx(expect_u1));
    REQUIRE(f.eval_flat(0) == Catch::Approx(0.0));
  }
}

TEST_CASE("transport across exact and contractive relations", "[relations]") {
  PiodsCertificate cert{KFunction::identity(), kld_exponential(0.5), 0.125};
  auto same = transport_sr(cert);
  REQUIRE(same.rho == cert.rho);
  REQUIRE(same.gamma.eval(2.0) == cert.gamma.eval(2.0));

  RelationProfile p;
  p.kappa = 0.2;
  p.beta = 0.6;
  p.lambda = 1.0;
  CostGains gains{KFunction::zero(), KFunction::identity()};

  SECTION("zero traces collapse to the constant") {
    PiodsCertificate zero_cert{KFunction::zero(), KldFunction::zero(), 0.0};
    auto bound = transport_acsr(zero_cert, p, gains, 0.8, true);
    std::vector<double> I(6, 0.0), G(6, 0.0);
    auto rhs = bound.rhs(I, G);
    for (double v : rhs) REQUIRE(v == Catch::Approx(0.5));
  }

  SECTION("the scalar-example reduction") {
    PiodsCertificate zero_cert{KFunction::zero(), KldFunction::zero(), 0.0};
    auto bound = transport_acsr(zero_cert, p, gains, 0.8, true);
    std::vector<double> I = {0, 1, 0, 0};
    std::vector<double> G = {0, 1, 0, 0};
    auto rhs = bound.rhs(I, G);
    /* max_{t'} (0.8)^(t-t') * 5 |nu| + 0.5, by hand */
    REQUIRE(rhs[0] == Catch::Approx(0.5));
    REQUIRE(rhs[1] == Catch::Approx(5.0 + 0.5));
    REQUIRE(rhs[2] == Catch::Approx(4.0 + 0.5));
    REQUIRE(rhs[3] == Catch::Approx(3.2 + 0.5));
  }

  SECTION("preconditions are enforced by name") {
    PiodsCertificate zero_cert{KFunction::zero(), KldFunction::zero(), 0.0};
    REQUIRE_THROWS_WITH(transport_acsr(zero_cert, p, gains, 0.8, false),
                        Catch::Matchers::ContainsSubstring("input cost"));
    CostGains bad{KFunction::zero(), KFunction::power(1.0, 2.0)}; /* superadditive */
    REQUIRE_THROWS_WITH(transport_acsr(zero_cert, p, bad, 0.8, true),
                        Catch::Matchers::ContainsSubstring("subadditive"));
  }
}

TEST_CASE("verdicts and counterexamples are thread-count independent", "[relations]") {
  AbstractionResult ar;
  CostedSystem hat = e1_abstraction(&ar);
  HybridPlant hp;
  hp.plant.modes = {{"f", {{0.6}}, {0.0}}};
  hp.plant.domain = Box({-1}, {1});
  hp.plant.norm = Norm::Inf;
  hp.plant.initial_box = hp.plant.domain;
  SamplingSpec spec;
  spec.state_box = Box({-6}, {6});
  spec.resolution = {0.05};
  spec.disturbance_samples = {{0.0}, {0.7}};
  SampledHybridSide side(hp, spec);
  auto prof = ar.profile;
  prof.beta = 0.5;

  int saved = thread_count();
  thread_count() = 1;
  auto v1 = check_acsr(side, hat, prof, nullptr);
  thread_count() = 4;
  auto v4 = check_acsr(side, hat, prof, nullptr);
  thread_count() = saved;
  REQUIRE(v1.holds == v4.holds);
  REQUIRE(v1.ce->con_state == v4.ce->con_state);
  REQUIRE(v1.ce->hat_state == v4.ce->hat_state);
  REQUIRE(v1.ce->clause == v4.ce->clause);
}
