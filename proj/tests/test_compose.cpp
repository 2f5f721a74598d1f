#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "iods/compose.hh"
#include "iods/scenarios.hh"

using namespace iods;

namespace {

CostedSystem costed(FiniteSystem s) {
  CostedSystem cs;
  cs.sys = std::move(s);
  return cs;
}

/* seeded random finite system with scalar state coordinates */
CostedSystem random_costed(std::mt19937_64& rng, int n_states, int n_controls, int n_dists) {
  auto uni = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  SystemBuilder b;
  for (int i = 0; i < n_states; ++i)
    b.state("s" + std::to_string(i), {std::round(uni() * 10) / 10}, {i});
  b.mark_initial("s0");
  for (int c = 0; c < n_controls; ++c) b.control("c" + std::to_string(c), {}, {c});
  for (int d = 0; d < n_dists; ++d) b.disturbance("d" + std::to_string(d), {0.1 * d}, {d});
  FiniteSystem s = b.build();
  s.split_declared = true;
  for (int x = 0; x < n_states; ++x)
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u)
      s.set_succ(x, u, {static_cast<int>(rng() % n_states)});
  return costed(std::move(s));
}

}  // namespace

TEST_CASE("full product composition allows every joint step", "[compose]") {
  CostedSystem a = dropout_automaton();
  CostedSystem b = reference_cycle();
  ComposedSystem c = compose(a, b, Synchronizer::full_product());
  REQUIRE(c.cs.sys.n_states() == a.sys.n_states() * b.sys.n_states());
  /* oracle: independent products of the component successor sets */
  for (std::size_t x = 0; x < c.cs.sys.n_states(); ++x) {
    auto [l, r] = c.state_factors[x];
    for (int u = 0; u < static_cast<int>(c.cs.sys.n_inputs()); ++u) {
      auto [lc, rc] = c.control_factors[c.cs.sys.control_of(u)];
      auto [ld, rd] = c.dist_factors[c.cs.sys.disturbance_of(u)];
      std::size_t expect = a.sys.succ(l, a.sys.input_id(lc, ld)).size() *
                           b.sys.succ(r, b.sys.input_id(rc, rd)).size();
      REQUIRE(c.cs.sys.succ(static_cast<int>(x), u).size() == expect);
    }
  }
}

TEST_CASE("zero-control rule forbids nonzero controls in the flagged state", "[compose]") {
  /* a tiny plant-like left system with a zero and a nonzero control */
  SystemBuilder b;
  b.state("p0", {0.0}, {}).state("p1", {1.0}, {}).mark_initial("p0");
  b.control("u0", {0.0}, {0}).control("u1", {1.0}, {0});
  b.disturbance("bot", {0.0}, {});
  FiniteSystem left = b.build();
  left.split_declared = true;
  for (int x = 0; x < 2; ++x)
    for (int u = 0; u < 2; ++u) left.set_succ(x, u, {u});

  CostedSystem l = costed(std::move(left));
  CostedSystem r = dropout_automaton();
  ComposedSystem c = compose(l, r, Synchronizer::zero_control_when(1));

  for (std::size_t x = 0; x < c.cs.sys.n_states(); ++x) {
    auto [lx, rx] = c.state_factors[x];
    auto ctrls = c.cs.sys.enabled_controls(static_cast<int>(x));
    if (rx == 1) {
      /* only the zero control remains */
      for (int cc : ctrls) {
        auto [lc, rc] = c.control_factors[cc];
        REQUIRE(l.sys.controls[lc].coords[0] == 0.0);
      }
      REQUIRE_FALSE(ctrls.empty());
    } else {
      REQUIRE(ctrls.size() == 2);
    }
  }
}

TEST_CASE("contractive-profile composition restricts successors by the realized distance",
          "[compose]") {
  /* two copies of a gridded scalar system, composed along a contractive
   * profile; the oracle enumerates the rule directly for one pair */
  auto grid_system = [&](double spacing, double radius) {
    SystemBuilder b;
    int n = static_cast<int>(std::round(2.0 / spacing)) + 1;
    for (int i = 0; i < n; ++i) {
      double x = -1 + i * spacing;
      b.state("g" + std::to_string(i), {x}, {});
    }
    for (int i = 0; i < n; ++i) b.mark_initial("g" + std::to_string(i));
    b.input("bot");
    FiniteSystem s = b.build();
    for (int i = 0; i < n; ++i) {
      double cx = 0.6 * s.states[i].coords[0];
      std::vector<int> succ;
      for (int j = 0; j < n; ++j)
        if (std::abs(s.states[j].coords[0] - cx) <= radius + 1e-12) succ.push_back(j);
      s.set_succ(i, 0, succ);
    }
    return costed(std::move(s));
  };

  CostedSystem coarse = grid_system(0.4, 0.2); /* the left (abstract-like) side */
  CostedSystem fine = grid_system(0.1, 0.05);

  RelationProfile p;
  p.orientation = Orientation::Alternating;
  p.dx = StateDistance::ball(Norm::Inf);
  p.pu = InputPairing::all_with_bot();
  p.sd = InputDistance::disturbance_gap(Norm::Inf);
  p.kappa = 0.2;
  p.beta = 0.6;
  p.lambda = 1.0;

  ComposedSystem c = compose(coarse, fine, Synchronizer::with_profile(p));

  /* oracle for the pair (0.6, 0.7): e = 0.1, allowed joint successors are
   * exactly the component products within 0.2 + 0.6*0.1 */
  int l = -1, r = -1;
  for (std::size_t i = 0; i < coarse.sys.n_states(); ++i)
    if (coarse.sys.states[i].coords[0] == Catch::Approx(0.6)) l = static_cast<int>(i);
  for (std::size_t i = 0; i < fine.sys.n_states(); ++i)
    if (fine.sys.states[i].coords[0] == Catch::Approx(0.7)) r = static_cast<int>(i);
  int id = c.find_state(l, r);
  REQUIRE(id >= 0);
  std::set<std::pair<double, double>> expect;
  for (int ly : coarse.sys.succ(l, 0))
    for (int ry : fine.sys.succ(r, 0)) {
      double a = coarse.sys.states[ly].coords[0];
      double b2 = fine.sys.states[ry].coords[0];
      if (std::abs(a - b2) <= 0.2 + 0.06 + 1e-12) expect.insert({a, b2});
    }
  std::set<std::pair<double, double>> got;
  for (int y : c.cs.sys.succ(id, 0)) {
    auto [ly, ry] = c.state_factors[y];
    got.insert({coarse.sys.states[ly].coords[0], fine.sys.states[ry].coords[0]});
  }
  REQUIRE(got == expect);
  REQUIRE_FALSE(got.empty());
}

TEST_CASE("tightening the synchronizer radius never adds transitions", "[compose]") {
  CostedSystem a = dropout_automaton();
  a.sys.states[0].coords = {0.0};
  a.sys.states[1].coords = {1.0};
  CostedSystem b = dropout_automaton();
  b.sys.states[0].coords = {0.1};
  b.sys.states[1].coords = {0.9};

  RelationProfile p;
  p.orientation = Orientation::Alternating;
  p.dx = StateDistance::ball(Norm::Inf);
  /* override the disc guard: compare coords only */
  p.dx.hat_idx = {0};
  p.dx.con_idx = {0};
  p.pu = InputPairing::identity();
  p.sd = InputDistance::zero();
  p.kappa = 0.5;
  p.beta = 0.5;
  p.lambda = 0;

  auto count = [&](double kappa) {
    auto pp = p;
    pp.kappa = kappa;
    ComposedSystem c = compose(a, b, Synchronizer::with_profile(pp));
    std::size_t n = 0;
    for (std::size_t x = 0; x < c.cs.sys.n_states(); ++x)
      for (int u = 0; u < static_cast<int>(c.cs.sys.n_inputs()); ++u)
        n += c.cs.sys.succ(static_cast<int>(x), u).size();
    return n;
  };
  REQUIRE(count(0.2) <= count(0.5));
}

TEST_CASE("composition preserves the behavior invariant under projection", "[compose][props]") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    CostedSystem a = random_costed(rng, 3, 2, 2);
    CostedSystem b = random_costed(rng, 3, 1, 2);
    ComposedSystem c = compose(a, b, Synchronizer::full_product());
    if (c.cs.sys.n_states() == 0) continue;
    auto pol = StepPolicy::uniform(rng());
    Behavior comp, la, rb;
    int x = c.cs.sys.initial.empty() ? -1 : c.cs.sys.initial[0];
    if (x < 0) continue;
    for (int t = 0; t < 10; ++t) {
      auto enabled = c.cs.sys.enabled_inputs(x);
      if (enabled.empty()) break;
      int u = enabled[rng() % enabled.size()];
      comp.xs.push_back(x);
      comp.us.push_back(u);
      la.xs.push_back(c.state_factors[x][0]);
      rb.xs.push_back(c.state_factors[x][1]);
      auto [lc, rc] = c.control_factors[c.cs.sys.control_of(u)];
      auto [ld, rd] = c.dist_factors[c.cs.sys.disturbance_of(u)];
      la.us.push_back(a.sys.input_id(lc, ld));
      rb.us.push_back(b.sys.input_id(rc, rd));
      x = step(c.cs.sys, x, u, pol);
    }
    REQUIRE_FALSE(validate_behavior(c.cs.sys, comp).has_value());
    REQUIRE_FALSE(validate_behavior(a.sys, la).has_value());
    REQUIRE_FALSE(validate_behavior(b.sys, rb).has_value());
  }
}

TEST_CASE("reference attachment", "[compose]") {
  CostedSystem ref = reference_cycle();
  /* the cycle advances deterministically */
  for (int i = 0; i < 8; ++i) {
    auto s = ref.sys.succ(i, 0);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0] == (i + 1) % 8);
  }

  CostedSystem one = dropout_automaton();
  ComposedSystem c = attach_reference(one, ref);
  REQUIRE(reachable_states(c.cs.sys).size() == reachable_states(one.sys).size() * 8);

  /* single-state reference leaves the reachable count unchanged */
  CostedSystem unit = costed(SystemBuilder().state("r", {}, {0}).mark_initial("r")
                                 .disturbance("eps").arc("r", "eps", "r").build());
  ComposedSystem cu = attach_reference(one, unit);
  REQUIRE(reachable_states(cu.cs.sys).size() == reachable_states(one.sys).size());

  /* the tracking cost at the aligned start is zero */
  CostModel O = CostModel::block_distance(0, 2, 2, Norm::Inf, 0.0);
  Vec at_start = {0.0, 0.0, 0.0, 0.0};
  REQUIRE(O.eval_point(at_start, {}, {}) == 0.0);

  REQUIRE_THROWS_AS(attach_reference(one, dropout_automaton()), std::invalid_argument);
}

TEST_CASE("structural lifting across the channel rule", "[compose]") {
  /* identical components related by identity profiles: the lifted
   * synchronizer mirrors the concrete one and the composite passes the
   * alternating check */
  std::mt19937_64 rng(9);
  CostedSystem plantish = random_costed(rng, 3, 2, 2);
  plantish.sys.controls[0].coords = {0.0};
  plantish.sys.controls[1].coords = {1.0};
  CostedSystem drop = dropout_automaton();

  RelationProfile ident;
  ident.orientation = Orientation::Alternating;
  ident.dx = StateDistance::ball(Norm::Inf);
  ident.pu = InputPairing::identity();
  ident.sd = InputDistance::zero();
  ident.kappa = 0;
  ident.beta = 0;
  ident.lambda = 0;

  auto lift = lift_interconnection(Synchronizer::zero_control_when(1), ident, plantish, ident,
                                   drop);
  REQUIRE(lift.assumption_validated);
  REQUIRE(lift.hat_sync.kind == Synchronizer::Kind::ZeroControlWhen);
  REQUIRE(lift.composite.kappa == 0.0);
  REQUIRE(lift.composite.beta == 0.0);

  ComposedSystem chat = compose(plantish, drop, lift.hat_sync);
  ComposedSystem ccon = compose(plantish, drop, Synchronizer::zero_control_when(1));
  chat.cs.sys.split_declared = true;
  ccon.cs.sys.split_declared = true;
  auto v = check_acasr(ccon.cs, chat.cs, lift.composite, nullptr);
  INFO(v.describe());
  REQUIRE(v.holds);
}

TEST_CASE("mechanical lifting on random finite components", "[compose][props]") {
  std::mt19937_64 rng(2027);
  int built = 0;
  for (int trial = 0; trial < 1000 && built < 1000; ++trial) {
    CostedSystem s1 = random_costed(rng, 2 + static_cast<int>(rng() % 3), 2, 2);
    CostedSystem s2 = random_costed(rng, 2 + static_cast<int>(rng() % 2), 1, 2);

    RelationProfile ident;
    ident.orientation = Orientation::Alternating;
    ident.dx = StateDistance::ball(Norm::Inf);
    ident.pu = InputPairing::identity();
    ident.sd = InputDistance::zero();
    ident.kappa = 0;
    ident.beta = 0;
    ident.lambda = 0;

    /* random synchronizer: each state pair allows a random nonempty set of
     * joint inputs, which makes the compatibility assumption hold for
     * identity relations */
    std::vector<std::array<int, 4>> tuples;
    for (int x1 = 0; x1 < static_cast<int>(s1.sys.n_states()); ++x1)
      for (int x2 = 0; x2 < static_cast<int>(s2.sys.n_states()); ++x2)
        for (int u1 = 0; u1 < static_cast<int>(s1.sys.n_inputs()); ++u1)
          for (int u2 = 0; u2 < static_cast<int>(s2.sys.n_inputs()); ++u2)
            if (rng() % 3 != 0) tuples.push_back({x1, x2, u1, u2});
    if (tuples.empty()) continue;
    Synchronizer h = Synchronizer::explicit_tuples(tuples);

    LiftResult lift;
    try {
      lift = lift_interconnection_finite(h, ident, s1, s1, ident, s2, s2);
    } catch (const std::invalid_argument&) {
      continue; /* assumption genuinely violated for this draw */
    }
    ComposedSystem chat = compose(s1, s2, lift.hat_sync);
    ComposedSystem ccon = compose(s1, s2, h);
    chat.cs.sys.split_declared = true;
    ccon.cs.sys.split_declared = true;
    if (ccon.cs.sys.n_states() == 0) continue;
    auto v = check_acasr(ccon.cs, chat.cs, lift.composite, nullptr);
    INFO(v.describe());
    REQUIRE(v.holds);
    built++;
  }
  REQUIRE(built >= 200);
}
