/*
 * scenarios.hh
 *
 * The three bundled case studies, runnable end to end: a scalar
 * contractive system with an invariance cost, the sampled DC-DC boost
 * converter with an invariance controller, and a planar robot tracking a
 * reference cycle over a lossy control channel. Each runner builds the
 * models, the abstraction and its relation, synthesizes and refines where
 * applicable, simulates seeded disturbed runs, monitors the transported
 * bound, and renders a deterministic text report.
 */
#ifndef IODS_SCENARIOS_HH_
#define IODS_SCENARIOS_HH_

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "iods/abstraction.hh"
#include "iods/checkers.hh"
#include "iods/compose.hh"
#include "iods/monitor.hh"
#include "iods/refine.hh"
#include "iods/synthesis.hh"
#include "iods/transport.hh"

namespace iods {

struct ScenarioOptions {
  double scale = 1.0;
  std::uint64_t seed = 20260809;
  int runs = 1000;
  int horizon = 50;
};

namespace detail {
inline double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}
}  // namespace detail

/* ------------------------------------------------------------------ */
/* scalar contractive system                                           */
/* ------------------------------------------------------------------ */

struct E1Result {
  HybridPlant hybrid;
  AbstractionResult abs;
  RelationVerdict acsr;
  ContractionBounds bounds;
  PiodsCertificate cert;
  int runs = 0, runs_passed = 0;
  double min_margin = kInf;
  double elapsed_s = 0;
  bool pass = false;
  std::string report;
};

inline E1Result run_example_e1(const ScenarioOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  E1Result r;

  SwitchedAffinePlant plant;
  plant.modes = {{"f", {{0.6}}, {0.0}}};
  plant.domain = Box({-1}, {1});
  plant.norm = Norm::Inf;
  plant.initial_box = plant.domain;
  plant.disturbance_bound = 1.0;

  r.hybrid.plant = plant;
  r.hybrid.I = CostModel::disturbance_norm(Norm::Inf);
  r.hybrid.O = CostModel::dist_to_box(plant.domain, Norm::Inf);

  double kappa = 0.2 * opt.scale;
  GridSpec grid(plant.domain, {kappa}, kappa, Norm::Inf);
  r.abs = abstract_plant(plant, grid, std::nullopt, kappa);

  SamplingSpec spec;
  spec.state_box = plant.domain.inflated(1.0);
  spec.resolution = {kappa / 2};
  spec.disturbance_samples = {{0.0}, {1.0}, {-1.0}, {0.5}, {-0.5}};
  {
    std::mt19937_64 rng(opt.seed);
    for (int i = 0; i < 8; ++i)
      spec.disturbance_samples.push_back({2 * detail::uniform(rng) - 1});
  }
  SampledHybridSide side(r.hybrid, spec);
  CostGains gains{KFunction::zero(), KFunction::identity()};
  r.acsr = check_acsr(side, r.abs.abs, r.abs.profile, &gains);

  const double beta_prime = 0.8;
  r.bounds = gamma_bounds(r.abs.profile, beta_prime);
  r.cert = {KFunction::linear(r.bounds.gamma_delta), r.bounds.mu_delta, r.bounds.kappa_delta};

  /* seeded disturbed open-loop runs, monitored against the transported
   * inequality */
  std::mt19937_64 rng(opt.seed + 1);
  r.runs = opt.runs;
  for (int run = 0; run < opt.runs; ++run) {
    double x = -1 + 2 * detail::uniform(rng);
    CostTrace tr;
    for (int t = 0; t < opt.horizon; ++t) {
      double nu = 2 * detail::uniform(rng) - 1;
      tr.I.push_back(std::abs(nu));
      tr.O.push_back(dist_to_box({x}, plant.domain, Norm::Inf));
      x = 0.6 * x + nu;
    }
    auto rep = eval_piods(tr, r.cert);
    r.min_margin = std::min(r.min_margin, rep.min_margin);
    if (rep.holds) r.runs_passed++;
  }
  r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = r.acsr.holds && r.runs_passed == r.runs && r.abs.abs.sys.n_states() > 0;

  std::ostringstream os;
  os << "scalar contractive system (scale " << detail::fmt(opt.scale) << ")\n";
  os << "  abstraction: " << r.abs.abs.sys.n_states() << " states, contraction beta = "
     << detail::fmt(r.abs.contraction) << ", kappa = " << detail::fmt(kappa) << "\n";
  os << "  relation check: " << r.acsr.describe() << "\n";
  os << "  bound constants: kappa_delta = " << detail::fmt(r.bounds.kappa_delta)
     << ", gamma_delta = " << detail::fmt(r.bounds.gamma_delta) << " (beta' = "
     << detail::fmt(beta_prime) << ")\n";
  os << "  inequality: |x_t|_D <= max_{t'<=t} (0.8)^(t-t') * " << detail::fmt(r.bounds.gamma_delta)
     << " |nu_t'| + " << detail::fmt(r.bounds.kappa_delta) << "\n";
  os << "  monitored runs: " << r.runs_passed << "/" << r.runs
     << " passed, min margin = " << detail::fmt(r.min_margin) << "\n";
  os << "  verdict: " << (r.pass ? "PASS" : "FAIL") << " (" << detail::fmt(r.elapsed_s) << " s)\n";
  r.report = os.str();
  return r;
}

/* ------------------------------------------------------------------ */
/* DC-DC boost converter                                               */
/* ------------------------------------------------------------------ */

struct BoostResult {
  HybridPlant hybrid;
  AbstractionResult abs;
  double norm_A1 = 0, norm_A2 = 0;
  double kappa = 0, kappa_delta = 0;
  RelationVerdict acasr;
  SynthesisResult game;
  int dropped_initials = 0;
  int runs = 0, runs_passed = 0, blocked = 0;
  double min_margin = kInf;
  double abstraction_s = 0, elapsed_s = 0;
  bool pass = false;
  std::string report;
};

inline SwitchedAffinePlant boost_plant() {
  SwitchedAffinePlant p;
  p.modes = {{"1", {{0.9917, 0.0}, {0.0, 0.9964}}, {0.1660, 0.0}},
             {"2", {{0.9903, -0.0330}, {0.0354, 0.9959}}, {0.1659, 0.0030}}};
  p.domain = Box({1.3, 5.7}, {1.7, 5.8});
  p.norm = Norm::Two;
  p.initial_box = p.domain;
  return p;
}

inline BoostResult run_example_boost(const ScenarioOptions& opt_in = {}) {
  ScenarioOptions opt = opt_in;
  if (opt.scale < 20) opt.scale = 20; /* desk scale; the full-resolution grid is out of scope */
  auto t0 = std::chrono::steady_clock::now();
  BoostResult r;

  SwitchedAffinePlant plant = boost_plant();
  r.norm_A1 = operator_norm_two(plant.modes[0].A);
  r.norm_A2 = operator_norm_two(plant.modes[1].A);

  double spacing = 0.25e-3 * opt.scale;
  r.kappa = spacing / std::sqrt(2.0);
  plant.disturbance_bound = r.kappa;

  r.hybrid.plant = plant;
  r.hybrid.I = CostModel::disturbance_norm(Norm::Two);
  r.hybrid.O = CostModel::dist_to_box(plant.domain, Norm::Two);

  GridSpec grid(plant.domain, {spacing / 2, spacing / 2}, r.kappa, Norm::Two);
  auto ta = std::chrono::steady_clock::now();
  r.abs = abstract_plant(plant, grid, std::nullopt, r.kappa);
  r.abstraction_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - ta).count();

  /* declared contraction from the source model; the computed norms stay
   * below it, so the relation holds a fortiori */
  const double beta = 0.997;
  r.abs.profile.beta = std::max(beta, r.abs.contraction);
  r.kappa_delta = r.kappa / (1.0 - r.abs.profile.beta);

  {
    SamplingSpec spec;
    spec.state_box = plant.domain.inflated(2 * r.kappa);
    spec.resolution = {spacing, spacing};
    spec.disturbance_samples = {{0.0, 0.0}, {r.kappa, 0.0}, {0.0, -r.kappa},
                                {r.kappa / 2, r.kappa / 2}};
    SampledHybridSide side(r.hybrid, spec);
    CostGains gains{KFunction::zero(), KFunction::identity()};
    CheckOptions copt;
    copt.pair_window = 0.15; /* spans the domain, enough to exercise the contraction */
    r.acasr = check_acasr(side, r.abs.abs, r.abs.profile, &gains, copt);
  }

  /* invariance objective: zero gain, zero offset */
  SynthesisTarget target{0.0, 1.0, 0.0};
  r.game = synthesize(r.abs.abs, target);
  std::size_t n_winning = 0;
  for (char w : r.game.winning) n_winning += w != 0;
  if (!r.game.realizable && n_winning > 0) {
    /* boundary states that cannot stay inside the domain are dropped from
     * the served initial set and reported */
    r.dropped_initials = static_cast<int>(r.game.losing_initials.size());
    std::vector<char> losing(r.abs.abs.sys.n_states(), 0);
    for (int x : r.game.losing_initials) losing[x] = 1;
    std::vector<int> kept;
    for (int x : r.abs.abs.sys.initial)
      if (!losing[x]) kept.push_back(x);
    r.abs.abs.sys.initial = kept;
    if (!kept.empty()) r.game = synthesize(r.abs.abs, target);
  }

  bool refined_ok = r.game.realizable && !r.abs.abs.sys.initial.empty() && n_winning > 0;
  double beta_prime = 0.9985;
  if (refined_ok) {
    CostGains gains{KFunction::zero(), KFunction::identity()};
    RefinedController rc = refine(r.hybrid, r.abs.abs, r.abs.profile, gains, r.game, target,
                                  beta_prime, /*abstract_I_dominated=*/true);
    std::mt19937_64 rng(opt.seed);
    r.runs = std::max(100, opt.runs / 10);
    for (int run = 0; run < r.runs; ++run) {
      /* start near a served abstract initial state, inside the domain */
      const auto& init = r.abs.abs.sys.initial;
      int h0 = init[static_cast<std::size_t>(rng() % init.size())];
      Vec x0;
      do {
        x0 = r.abs.abs.sys.states[h0].coords;
        for (auto& v : x0) v += (2 * detail::uniform(rng) - 1) * r.kappa / 2;
      } while (!plant.domain.contains(x0));
      HybridPlant::State s0{x0, {}};
      auto oracle = random_oracle(r.hybrid, r.kappa, Norm::Two, opt.seed + 17 * run + 1);
      TraceLog log = run_closed_loop(rc, s0, oracle, opt.horizon);
      if (log.blocked) {
        r.blocked++;
        continue;
      }
      bool ok = true;
      for (const auto& st : log.steps) {
        r.min_margin = std::min(r.min_margin, st.margin);
        if (st.margin < -1e-9) ok = false;
      }
      if (ok) r.runs_passed++;
    }
  }

  r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = r.norm_A1 <= 0.997 + 1e-9 && r.norm_A2 <= 0.997 + 1e-9 && r.acasr.holds &&
           refined_ok && r.blocked == 0 && r.runs_passed == r.runs &&
           r.abstraction_s < 60.0;

  std::ostringstream os;
  os << "boost converter (scale " << detail::fmt(opt.scale) << ")\n";
  os << "  |A1|_2 = " << detail::fmt(r.norm_A1) << ", |A2|_2 = " << detail::fmt(r.norm_A2)
     << " (declared contraction 0.997)\n";
  os << "  grid: " << r.abs.abs.sys.n_states() << " states, spacing = " << detail::fmt(spacing)
     << ", kappa = " << detail::fmt(r.kappa) << ", abstraction built in "
     << detail::fmt(r.abstraction_s) << " s\n";
  os << "  relation check: " << r.acasr.describe() << "\n";
  os << "  invariance controller: " << (refined_ok ? "realizable" : "unrealizable")
     << " (dropped boundary initial states: " << r.dropped_initials << ", winning positions: "
     << n_winning << ")\n";
  if (n_winning == 0)
    os << "  note: the domain admits no controlled-invariant subset under the printed sampled\n"
          "  dynamics (every stationary mode mix inside the current band drifts the voltage\n"
          "  upward), so the zero-gain zero-offset objective is unrealizable at any grid\n";
  os << "  closed-loop inequality: |x_t|_D <= max_{t'<=t} (" << detail::fmt(beta_prime)
     << ")^(t-t') * " << detail::fmt(1.0 / (beta_prime - r.abs.profile.beta))
     << " |w_t'|_2 + " << detail::fmt(r.kappa_delta) << "\n";
  os << "  monitored runs: " << r.runs_passed << "/" << r.runs << " passed (" << r.blocked
     << " blocked), min margin = " << detail::fmt(r.min_margin) << "\n";
  os << "  verdict: " << (r.pass ? "PASS" : "FAIL") << " (" << detail::fmt(r.elapsed_s) << " s)\n";
  r.report = os.str();
  return r;
}

/* ------------------------------------------------------------------ */
/* mobile robot over a lossy channel                                   */
/* ------------------------------------------------------------------ */

inline CostedSystem dropout_automaton() {
  CostedSystem cs;
  cs.sys = SystemBuilder()
               .state("a0", {}, {0})
               .state("a1", {}, {1})
               .mark_initial("a0")
               .mark_initial("a1")
               .disturbance("bot", {}, {0})
               .disturbance("drop", {}, {1})
               .arc("a0", "bot", "a0")
               .arc("a0", "drop", "a1")
               .arc("a1", "bot", "a0")
               .arc("a1", "drop", "a0")
               .build();
  return cs;
}

inline CostedSystem reference_cycle() {
  static const double pts[8][2] = {{0, 0}, {1, 0}, {2, 0}, {3, 0},
                                   {3, 1}, {2, 1}, {1, 1}, {0, 1}};
  SystemBuilder b;
  for (int i = 0; i < 8; ++i)
    b.state("r" + std::to_string(i), {pts[i][0], pts[i][1]}, {i});
  b.mark_initial("r0");
  b.disturbance("eps", {}, {});
  for (int i = 0; i < 8; ++i)
    b.arc("r" + std::to_string(i), "eps", "r" + std::to_string((i + 1) % 8));
  CostedSystem cs;
  cs.sys = b.build();
  return cs;
}

struct RobotResult {
  HybridPlant hybrid;
  AbstractionResult abs1;
  CostedSystem abs123;
  RelationProfile profile123;
  RelationVerdict acasr;
  double kappa = 0, kappa_delta = 0;
  std::vector<std::pair<SynthesisTarget, bool>> frontier;
  SynthesisTarget chosen{};
  SynthesisResult game;
  VerifyResult verify;
  int runs = 0, runs_passed = 0, blocked = 0;
  double min_margin = kInf;
  double max_eps_violation = 0; /* worst violation of the eps recursion law */
  double elapsed_s = 0;
  bool pass = false;
  std::string report;
};

struct RobotOptions : ScenarioOptions {
  bool check_relation = true;
  std::vector<SynthesisTarget> sweep = {};
  double dropout_prob = 0.35;
};

inline RobotResult run_example_robot(const RobotOptions& opt_in = {}) {
  RobotOptions opt = opt_in;
  if (opt.scale <= 0) opt.scale = 4;
  auto t0 = std::chrono::steady_clock::now();
  RobotResult r;

  /* plant: x+ = 0.8 x + u + w on the plane */
  SwitchedAffinePlant plant;
  plant.modes = {{"m", {{0.8, 0.0}, {0.0, 0.8}}, {0.0, 0.0}}};
  plant.domain = Box({-1, -1}, {4, 4});
  plant.norm = Norm::Inf;
  plant.control_box = Box({-3, -3}, {3, 3});
  plant.initial_points = {{0.0, 0.0}};
  r.kappa = 0.05 * opt.scale;
  plant.disturbance_bound = r.kappa;

  CostedSystem dropout = dropout_automaton();
  CostedSystem ref = reference_cycle();

  r.hybrid.plant = plant;
  r.hybrid.factors = {dropout.sys, ref.sys};
  r.hybrid.zero_control_factor = 0;
  r.hybrid.zero_control_state = 1; /* a1 */
  /* I = I_d(dropout) + |w|, O = |x - r| */
  r.hybrid.I = CostModel::sum(CostModel::disc_indicator(0, {0.0, 1.0}),
                              CostModel::disturbance_norm(Norm::Inf, 0, 2));
  r.hybrid.O = CostModel::block_distance(0, 2, 2, Norm::Inf, 0.0);

  /* abstraction of the plant part */
  GridSpec sgrid(plant.domain, {r.kappa, r.kappa}, r.kappa, Norm::Inf);
  GridSpec cgrid(*plant.control_box, {r.kappa, r.kappa}, r.kappa, Norm::Inf);
  r.abs1 = abstract_plant(plant, sgrid, cgrid, r.kappa);

  /* identity relations on the finite factors */
  RelationProfile ident;
  ident.orientation = Orientation::Alternating;
  ident.dx = StateDistance::ball(Norm::Inf);
  ident.pu = InputPairing::identity();
  ident.sd = InputDistance::zero();
  ident.kappa = 0;
  ident.beta = 0;
  ident.lambda = 0;

  /* lift across the channel rule, then across the reference */
  auto lift12 = lift_interconnection(Synchronizer::zero_control_when(1), r.abs1.profile,
                                     r.abs1.abs, ident, dropout);
  ComposedSystem s12 = compose(r.abs1.abs, dropout, lift12.hat_sync);
  auto lift123 = lift_interconnection(Synchronizer::full_product(), lift12.composite, s12.cs,
                                      ident, ref);
  ComposedSystem s123 = attach_reference(s12.cs, ref);
  r.profile123 = lift123.composite;

  r.abs123 = std::move(s123.cs);
  r.abs123.I = CostModel::disc_indicator(0, {0.0, 1.0});
  r.abs123.O = CostModel::block_distance(0, 2, 2, Norm::Inf, r.kappa);

  /* sampled relation check of the lifted profile */
  CostGains gains{KFunction::zero(),
                  KFunction::table({{r.kappa, 2 * r.kappa}}, 1.0)}; /* c + min(c, kappa) */
  if (opt.check_relation) {
    SamplingSpec spec;
    spec.state_box = plant.domain;
    spec.resolution = {r.kappa / 2, r.kappa / 2};
    spec.control_offsets.clear();
    for (std::size_t i = 0; i < cgrid.size(); ++i) spec.control_offsets.push_back(cgrid.point(i));
    spec.disturbance_samples = {{0.0, 0.0}, {r.kappa, -r.kappa}, {-r.kappa / 3, r.kappa / 2}};
    SampledHybridSide side(r.hybrid, spec);
    CheckOptions copt;
    copt.pair_window = 2 * r.kappa;
    r.acasr = check_acasr(side, r.abs123, r.profile123, &gains, copt);
  }

  /* synthesis sweep over candidate gains and decays */
  std::vector<SynthesisTarget> sweep = opt.sweep;
  if (sweep.empty())
    sweep = {{1.4, 1.4, 0}, {1.4, 0.7, 0}, {1.4, 0.4, 0}, {1.4, 0.2, 0},
             {2.0, 0.7, 0}, {2.8, 1.4, 0}};
  bool have = false;
  SynthesisResult best_game;
  SynthesisTarget best{};
  for (const auto& t : sweep) {
    auto g = synthesize(r.abs123, t);
    r.frontier.push_back({t, g.realizable});
    /* preference: fastest decay among realizable targets, then the smaller
     * gain */
    bool better = g.realizable &&
                  (!have || t.eta > best.eta + 1e-12 ||
                   (std::abs(t.eta - best.eta) < 1e-12 && t.gamma < best.gamma - 1e-12));
    if (better) {
      have = true;
      best = t;
      best_game = std::move(g);
    }
  }
  if (have) {
    r.chosen = best;
    r.game = std::move(best_game);

    /* exhaustive verification of the synthesized loop */
    ComposedSystem closed = compose(r.game.controller, r.abs123,
                                    Synchronizer::explicit_tuples(r.game.controller_rel.tuples));
    closed.cs.I = lift_cost(closed, r.game.controller, r.abs123, r.abs123.I, false);
    closed.cs.O = lift_cost(closed, r.game.controller, r.abs123, r.abs123.O, false);
    r.verify = verify_closed_loop(closed.cs, r.chosen);

    /* refinement and seeded disturbed runs */
    double beta_prime = 0.9;
    RefinedController rc = refine(r.hybrid, r.abs123, r.profile123, gains, r.game, r.chosen,
                                  beta_prime, /*abstract_I_dominated=*/true);
    r.kappa_delta = rc.bound.bounds.kappa_delta;

    std::mt19937_64 rng(opt.seed);
    r.runs = opt.runs;
    for (int run = 0; run < opt.runs; ++run) {
      HybridPlant::State s0{{0.0, 0.0}, {rng() % 2 == 0 ? 0 : 1, 0}};
      auto oracle = random_oracle(r.hybrid, r.kappa, Norm::Inf, opt.seed + 31 * run + 7,
                                  {opt.dropout_prob, 0.0});
      TraceLog log = run_closed_loop(rc, s0, oracle, opt.horizon);
      if (log.blocked) {
        r.blocked++;
        continue;
      }
      bool ok = true;
      /* the recursion law for the realized relation parameter */
      double eps_rec = r.profile123.kappa;
      for (std::size_t t = 0; t < log.steps.size(); ++t) {
        const auto& st = log.steps[t];
        r.min_margin = std::min(r.min_margin, st.margin);
        if (st.margin < -1e-9) ok = false;
        r.max_eps_violation = std::max(r.max_eps_violation, st.eps - eps_rec);
        eps_rec = r.profile123.kappa + r.profile123.beta * eps_rec +
                  r.profile123.lambda * st.sd;
      }
      if (ok) r.runs_passed++;
    }
  }

  r.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = (!opt.check_relation || r.acasr.holds) && have && r.verify.holds &&
           r.blocked == 0 && r.runs_passed == r.runs && r.max_eps_violation <= 1e-9;

  std::ostringstream os;
  os << "mobile robot over a lossy channel (scale " << detail::fmt(opt.scale) << ")\n";
  os << "  grid: " << r.abs1.abs.sys.n_states() << " plant states, "
     << r.abs123.sys.n_states() << " composite states, kappa = " << detail::fmt(r.kappa) << "\n";
  os << "  lifted relation: (kappa, beta, lambda) = (" << detail::fmt(r.profile123.kappa) << ", "
     << detail::fmt(r.profile123.beta) << ", " << detail::fmt(r.profile123.lambda) << ")";
  if (opt.check_relation) os << " check: " << r.acasr.describe();
  os << "\n";
  os << "  synthesis frontier (gamma, eta, rho=0):\n";
  for (auto& [t, ok] : r.frontier)
    os << "    gamma=" << detail::fmt(t.gamma) << " eta=" << detail::fmt(t.eta) << " -> "
       << (ok ? "realizable" : "unrealizable") << "\n";
  if (have) {
    os << "  chosen target: gamma=" << detail::fmt(r.chosen.gamma)
       << " eta=" << detail::fmt(r.chosen.eta) << "; exhaustive closed-loop check: "
       << (r.verify.holds ? "holds" : "fails") << " (" << r.verify.positions_explored
       << " positions)\n";
    double go_kd = r.kappa_delta + std::min(r.kappa_delta, r.kappa);
    os << "  transported bound: max{ " << detail::fmt(r.chosen.gamma)
       << " I_t' - " << detail::fmt(r.chosen.eta) << " (t-t') } + max{ (b')^(t-t') "
       << "gamma_delta' |w_t'| } + " << detail::fmt(go_kd) << "\n";
    os << "  constant term: gamma_O(kappa_delta) = " << detail::fmt(go_kd)
       << " (bare kappa_delta = " << detail::fmt(r.kappa_delta) << ")\n";
    os << "  monitored runs: " << r.runs_passed << "/" << r.runs << " passed (" << r.blocked
       << " blocked), min margin = " << detail::fmt(r.min_margin)
       << ", eps-law slack = " << detail::fmt(r.max_eps_violation) << "\n";
  } else {
    os << "  no realizable target in the sweep\n";
  }
  os << "  verdict: " << (r.pass ? "PASS" : "FAIL") << " (" << detail::fmt(r.elapsed_s) << " s)\n";
  r.report = os.str();
  return r;
}

}  // namespace iods

#endif  // IODS_SCENARIOS_HH_
