/*
 * refine.hh
 *
 * Controller refinement from a finite abstraction to the concrete plant,
 * and the online closed-loop execution protocol: measure the plant state,
 * play the abstract strategy through the input pairing, track the abstract
 * state greedily inside the contracted ball after every plant move, and
 * log costs, the realized relation parameter, and the transported bound.
 */
#ifndef IODS_REFINE_HH_
#define IODS_REFINE_HH_

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/compose.hh"
#include "iods/monitor.hh"
#include "iods/plant.hh"
#include "iods/synthesis.hh"
#include "iods/transport.hh"

namespace iods {

/* alternating-sense non-blocking of a composed controller system: every
 * reachable state admits a control that has a joint successor for every
 * plant disturbance */
inline bool is_controller_nonblocking(const ComposedSystem& comp, const FiniteSystem& right,
                                      int* witness = nullptr) {
  const FiniteSystem& s = comp.cs.sys;
  for (int x : reachable_states(s)) {
    bool ok = false;
    for (int c = 0; c < static_cast<int>(s.n_controls()) && !ok; ++c) {
      bool all = true;
      for (int rd = 0; rd < static_cast<int>(right.n_disturbances()); ++rd) {
        bool one = false;
        for (int d = 0; d < static_cast<int>(s.n_disturbances()) && !one; ++d) {
          if (comp.dist_factors[d][1] != rd) continue;
          if (!s.succ(x, s.input_id(c, d)).empty()) one = true;
        }
        if (!one) {
          all = false;
          break;
        }
      }
      if (all) ok = true;
    }
    if (!ok) {
      if (witness) *witness = x;
      return false;
    }
  }
  return true;
}

/*
 * A synthesized abstract controller carried over to the concrete plant.
 * The materialized controller is the composition of the game controller
 * with the abstraction along their exact alternating relation; the refined
 * relation inherits the plant profile's parameters and distance.
 */
struct RefinedController {
  HybridPlant plant;             /* concrete model */
  CostedSystem abstraction;      /* finite abstract composite */
  SynthesisTarget target;
  SynthesisResult game;          /* strategy, levels, winning region */
  RelationProfile plant_profile; /* alternating, abstraction -> plant */
  CostGains gains;
  ComposedSystem controller;     /* materialized controller system */
  RelationProfile refined;       /* alternating, controller -> plant */
  CorollaryBound bound;          /* transported run-time bound */
  double beta_prime = 0;
};

/* block-selected copy of the plant profile for the composed controller,
 * whose state coords are (game controller block ++ abstraction block) */
inline RelationProfile refined_profile(const RelationProfile& plant_profile,
                                       const ComposedSystem& controller,
                                       const CostedSystem& abstraction) {
  RelationProfile r = plant_profile;
  std::size_t cd = abstraction.sys.n_states() ? abstraction.sys.states[0].coords.size() : 0;
  std::size_t dd = abstraction.sys.n_states() ? abstraction.sys.states[0].disc.size() : 0;
  std::size_t off_c = controller.left_coord_dim;
  std::size_t off_d = controller.left_disc_dim;
  r.dx.hat_idx.clear();
  r.dx.con_idx.clear();
  r.dx.hat_disc_idx.clear();
  r.dx.con_disc_idx.clear();
  for (std::size_t i = 0; i < cd; ++i) r.dx.hat_idx.push_back(static_cast<int>(off_c + i));
  for (std::size_t i = 0; i < cd; ++i) r.dx.con_idx.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < dd; ++i) r.dx.hat_disc_idx.push_back(static_cast<int>(off_d + i));
  for (std::size_t i = 0; i < dd; ++i) r.dx.con_disc_idx.push_back(static_cast<int>(i));
  r.pu.hat_ctrl_coord_first = static_cast<int>(controller.left_ctrl_coord_dim);
  r.pu.hat_ctrl_disc_first = static_cast<int>(controller.left_ctrl_disc_dim);
  r.pu.hat_dist_disc_first = static_cast<int>(controller.left_dist_disc_dim);
  r.pu.hat_blocks = true;
  r.sd.hat_first = static_cast<int>(controller.left_dist_coord_dim);
  return r;
}

/*
 * Materialize the refined controller. Validates that the game relation is
 * an exact alternating simulation with normalized input tuples and that
 * the composed controller is non-blocking; both hold by construction, so a
 * failure is surfaced as a defect, not a verdict.
 */
inline RefinedController refine(const HybridPlant& plant, const CostedSystem& abstraction,
                                const RelationProfile& plant_profile, const CostGains& gains,
                                const SynthesisResult& game, const SynthesisTarget& target,
                                double beta_prime, bool abstract_I_dominated) {
  if (plant_profile.orientation != Orientation::Alternating)
    throw std::invalid_argument("refinement needs an alternating plant profile");
  if (!game.realizable) throw std::invalid_argument("refinement needs a realizable controller");

  RefinedController rc;
  rc.plant = plant;
  rc.abstraction = abstraction;
  rc.target = target;
  rc.game = game;
  rc.plant_profile = plant_profile;
  rc.gains = gains;
  rc.beta_prime = beta_prime;

  auto asr = check_asr(game.controller, abstraction, game.controller_rel);
  if (!asr.holds)
    throw std::runtime_error("controller relation failed the alternating check: " +
                             asr.describe());

  rc.controller = compose(game.controller, abstraction,
                          Synchronizer::explicit_tuples(game.controller_rel.tuples));
  int witness = -1;
  if (!is_controller_nonblocking(rc.controller, abstraction.sys, &witness))
    throw std::runtime_error("composed controller blocks at state " +
                             rc.controller.cs.sys.states[witness].label);

  rc.refined = refined_profile(plant_profile, rc.controller, abstraction);
  rc.bound = transport_acsr(target_certificate(target), plant_profile, gains, beta_prime,
                            abstract_I_dominated);
  return rc;
}

/* ------------------------------------------------------------------ */
/* closed-loop execution                                               */
/* ------------------------------------------------------------------ */

struct Disturbance {
  Vec w;                          /* plant disturbance */
  std::vector<int> factor_inputs; /* flat input per hybrid factor */
};

using DisturbanceOracle = std::function<Disturbance(int t, const HybridPlant::State&)>;

inline DisturbanceOracle scripted_oracle(std::vector<Disturbance> script) {
  return [script = std::move(script)](int t, const HybridPlant::State&) -> Disturbance {
    if (static_cast<std::size_t>(t) >= script.size())
      throw std::out_of_range("disturbance script exhausted");
    return script[static_cast<std::size_t>(t)];
  };
}

/* seeded random disturbances: plant noise uniform in the norm ball of the
 * given radius, factor inputs drawn with the given per-factor probability
 * of a non-quiet symbol (uniform among those) */
inline DisturbanceOracle random_oracle(const HybridPlant& plant, double w_bound, Norm norm,
                                       std::uint64_t seed, std::vector<double> factor_probs = {}) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  std::size_t dim = plant.plant.dim();
  std::vector<std::size_t> factor_inputs_n;
  for (const auto& f : plant.factors) factor_inputs_n.push_back(f.n_inputs());
  return [rng, dim, w_bound, norm, factor_probs, factor_inputs_n](
             int, const HybridPlant::State&) -> Disturbance {
    auto uni = [&]() { return static_cast<double>((*rng)() >> 11) * 0x1.0p-53; };
    Disturbance d;
    d.w.assign(dim, 0.0);
    if (w_bound > 0) {
      do {
        for (auto& v : d.w) v = (2 * uni() - 1) * w_bound;
      } while (norm == Norm::Two && norm_of(d.w, norm) > w_bound);
    }
    for (std::size_t f = 0; f < factor_inputs_n.size(); ++f) {
      double p = f < factor_probs.size() ? factor_probs[f] : 0.0;
      int u = 0;
      if (factor_inputs_n[f] > 1 && uni() < p)
        u = 1 + static_cast<int>((*rng)() % (factor_inputs_n[f] - 1));
      d.factor_inputs.push_back(u);
    }
    return d;
  };
}

struct ExecutionStep {
  int t = 0;
  HybridPlant::State x;        /* concrete state at t */
  int hat_state = -1;          /* abstract composite state at t */
  int level = 0;               /* bound-tracker level index */
  std::size_t mode = 0;
  Vec u_c;                     /* applied control offset */
  Disturbance d;               /* realized disturbance */
  double eps = 0;              /* realized state distance at t */
  double sd = 0;               /* realized input mismatch at t */
  double I = 0, O = 0;         /* concrete step costs */
  double bound = 0;            /* transported right-hand side at t */
  double margin = 0;
};

struct TraceLog {
  std::vector<ExecutionStep> steps;
  bool blocked = false;
  std::string note;

  CostTrace costs() const {
    CostTrace c;
    for (const auto& s : steps) {
      c.I.push_back(s.I);
      c.O.push_back(s.O);
    }
    return c;
  }
  std::vector<double> mismatches() const {
    std::vector<double> g;
    for (const auto& s : steps) g.push_back(s.sd);
    return g;
  }
};

/*
 * One closed-loop instance. Strictly sequential: the controller measures
 * the full state, applies the strategy control, observes the disturbed
 * move, and re-relates greedily (smallest realized distance, ties toward
 * the smaller abstract state id).
 */
class ClosedLoopExecutor {
 public:
  ClosedLoopExecutor(const RefinedController& rc, HybridPlant::State x0)
      : rc_(rc),
        levels_(rebuild_levels()),
        x_(std::move(x0)) {
    const FiniteSystem& hs = rc_.abstraction.sys;
    /* initialization: the related abstract initial state minimizing the
     * realized distance, ties toward the smaller id */
    Vec xc = rc_.plant.state_coords(x_);
    std::vector<int> xd = rc_.plant.state_disc(x_);
    double best = kInf;
    for (int h0 : hs.initial) {
      double d = rc_.plant_profile.dx.eval(hs.states[h0].coords, hs.states[h0].disc, xc, xd,
                                           h0, -1);
      if (d < best) {
        best = d;
        hat_ = h0;
      }
    }
    if (hat_ < 0 || best > rc_.plant_profile.kappa + kDistTol)
      throw std::runtime_error("initial state is not served by the controller");
    level_ = levels_.zero_index();
    eps_ = best;
    if (!winning(hat_, level_))
      throw std::runtime_error("initial abstract position is not winning");
    term_mismatch_ = 0;
    inc_ = IncrementalBound(rc_.bound.hat.mu, rc_.bound.hat.gamma, 0.0);
  }

  const HybridPlant::State& state() const { return x_; }
  int abstract_state() const { return hat_; }

  ExecutionStep step(int t, const DisturbanceOracle& oracle) {
    const FiniteSystem& hs = rc_.abstraction.sys;
    ExecutionStep rec;
    rec.t = t;
    rec.x = x_;
    rec.hat_state = hat_;
    rec.level = level_;
    rec.eps = eps_;

    /* strategy control at the current position */
    int c = rc_.game.strategy[static_cast<std::size_t>(hat_) * levels_.size() +
                              static_cast<std::size_t>(level_)];
    if (c < 0) throw std::runtime_error("no strategy control at the current position");
    const InputPart& hc = hs.controls[c];
    rec.mode = hc.disc.empty() ? 0 : static_cast<std::size_t>(hc.disc[0]);
    std::size_t uc_dim = rc_.plant.plant.control_box ? rc_.plant.plant.dim() : 0;
    rec.u_c = Vec(hc.coords.begin(), hc.coords.begin() + uc_dim);

    /* environment move */
    rec.d = oracle(t, x_);
    HybridPlant::Input in{rec.mode, rec.u_c, rec.d.w, rec.d.factor_inputs};
    HybridPlant::State xn = rc_.plant.step(x_, in);

    /* paired abstract input: control as chosen, disturbance matched by its
     * discrete signature */
    int hd = matched_hat_dist(rec.d);
    if (hd < 0) throw std::runtime_error("disturbance has no paired abstract input");
    int hu = hs.input_id(c, hd);
    rec.sd = rc_.plant_profile.sd.eval(hs.disturbances[hd].coords, rc_.plant.input_dcoords(in));

    /* costs at the current step */
    rec.I = rc_.plant.cost_I(x_, in);
    rec.O = rc_.plant.cost_O(x_, in);

    /* transported bound at t (running maxima include the current step) */
    double term1 = inc_->push(rec.I);
    term_mismatch_ = std::max(rc_.bound.bounds.mu_delta.rate() * term_mismatch_,
                              rc_.bound.gd_prime(rec.sd));
    rec.bound = term1 + rc_.bound.gamma_O.eval(term_mismatch_) + rc_.bound.constant();
    rec.margin = rec.bound - rec.O;

    /* re-relate: greedy abstract successor */
    const auto& hsucc = hs.succ(hat_, hu);
    if (hsucc.empty()) {
      throw BlockedExecution(hat_, hu);
    }
    Vec nc = rc_.plant.state_coords(xn);
    std::vector<int> nd = rc_.plant.state_disc(xn);
    int next = -1;
    double best = kInf;
    for (int hy : hsucc) {
      double d = rc_.plant_profile.dx.eval(hs.states[hy].coords, hs.states[hy].disc, nc, nd, hy,
                                           -1);
      if (d < best) {
        best = d;
        next = hy;
      }
    }
    if (next < 0 || best == kInf) throw BlockedExecution(hat_, hu);
    double ball = rc_.plant_profile.kappa + rc_.plant_profile.beta * eps_ +
                  rc_.plant_profile.lambda * rec.sd;
    if (best > ball + kDistTol)
      throw std::runtime_error("relation left the contracted ball (checker soundness defect)");

    /* bound-tracker update mirrors the synthesis game */
    double gained = canon12(rc_.target.gamma * rc_.abstraction.cost_I(hat_, hu));
    level_ = levels_.next(level_, gained);
    if (!winning(next, level_))
      throw std::runtime_error("closed loop left the winning region (solver defect)");
    hat_ = next;
    x_ = xn;
    eps_ = best;
    return rec;
  }

 private:
  BoundLevels rebuild_levels() const { return bound_levels(rc_.abstraction, rc_.target); }

  bool winning(int h, int lvl) const {
    return rc_.game.winning[static_cast<std::size_t>(h) * levels_.size() +
                            static_cast<std::size_t>(lvl)] != 0;
  }

  int matched_hat_dist(const Disturbance& d) const {
    const FiniteSystem& hs = rc_.abstraction.sys;
    std::vector<int> disc;
    for (std::size_t f = 0; f < rc_.plant.factors.size(); ++f) {
      const auto& part =
          rc_.plant.factors[f].disturbances[rc_.plant.factors[f].disturbance_of(
              d.factor_inputs[f])];
      disc.insert(disc.end(), part.disc.begin(), part.disc.end());
    }
    for (std::size_t h = 0; h < hs.n_disturbances(); ++h)
      if (hs.disturbances[h].disc == disc) return static_cast<int>(h);
    return -1;
  }

  const RefinedController& rc_;
  BoundLevels levels_;
  HybridPlant::State x_;
  int hat_ = -1;
  int level_ = 0;
  double eps_ = 0;
  double term_mismatch_ = 0;
  std::optional<IncrementalBound> inc_;
};

inline TraceLog run_closed_loop(const RefinedController& rc, HybridPlant::State x0,
                                const DisturbanceOracle& oracle, int horizon) {
  TraceLog log;
  try {
    ClosedLoopExecutor ex(rc, std::move(x0));
    for (int t = 0; t < horizon; ++t) log.steps.push_back(ex.step(t, oracle));
  } catch (const BlockedExecution& e) {
    log.blocked = true;
    log.note = e.what();
  }
  return log;
}

/* ------------------------------------------------------------------ */
/* the relation from the closed loop back to the controller            */
/* ------------------------------------------------------------------ */

/*
 * Plain-orientation profile from a materialized closed loop (controller
 * composed with a finite plant) to the controller system. The parameters
 * coincide with the plant profile's; the distance is zero-or-related on
 * the controller block, and the input mismatch is read off the embedded
 * copy of the abstract input against the plant input.
 */
inline RelationProfile closed_loop_relation(const RelationProfile& plant_profile,
                                            const ComposedSystem& closed,
                                            const CostedSystem& controller_side,
                                            const CostedSystem& plant_side) {
  RelationProfile r;
  r.orientation = Orientation::Plain;
  r.kappa = plant_profile.kappa;
  r.beta = plant_profile.beta;
  r.lambda = plant_profile.lambda;

  /* distance table: related iff the closed state's controller factor is the
   * abstract state, with the plant-profile distance inside the pair */
  std::size_t nh = controller_side.sys.n_states();
  std::size_t ncl = closed.cs.sys.n_states();
  std::vector<double> tab(nh * ncl, kInf);
  for (std::size_t cl = 0; cl < ncl; ++cl) {
    int ctrl = closed.state_factors[cl][0];
    int plant = closed.state_factors[cl][1];
    /* the distance realized inside the pair: abstract block of the
     * controller state against the plant state */
    const StateInfo& cs = controller_side.sys.states[ctrl];
    const StateInfo& ps = plant_side.sys.states[plant];
    double d =
        plant_profile.dx.eval(cs.coords, cs.disc, ps.coords, ps.disc, ctrl, plant);
    tab[static_cast<std::size_t>(ctrl) * ncl + cl] = d;
  }
  r.dx = StateDistance::table(nh, ncl, std::move(tab));

  /* pairing: the controller input embedded in the closed input */
  std::vector<std::pair<int, int>> pairs;
  for (int cu = 0; cu < static_cast<int>(closed.cs.sys.n_inputs()); ++cu) {
    int c = closed.cs.sys.control_of(cu), d = closed.cs.sys.disturbance_of(cu);
    int hc = closed.control_factors[c][0];
    int hd = closed.dist_factors[d][0];
    pairs.push_back({controller_side.sys.input_id(hc, hd), cu});
  }
  r.pu = InputPairing::explicit_pairs(std::move(pairs));

  /* mismatch between the embedded abstract input and the plant input */
  std::size_t n = plant_side.sys.disturbances.empty()
                      ? 0
                      : plant_side.sys.disturbances[0].coords.size();
  r.sd = InputDistance::con_block_difference(
      plant_profile.sd.norm, static_cast<int>(closed.left_dist_coord_dim - n),
      static_cast<int>(closed.left_dist_coord_dim), static_cast<int>(n));
  return r;
}

}  // namespace iods

#endif  // IODS_REFINE_HH_
