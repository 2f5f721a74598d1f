/*
 * synthesis.hh
 *
 * Robust controller synthesis on finite costed systems. The objective is
 * the stability inequality with a scalar linear gain and a linear decay:
 *
 *     O_t <= max_{t' <= t} max(gamma * I_t' - eta (t - t'), 0) + rho.
 *
 * Rewritten as a running bound b_t = max(b_{t-1} - eta, gamma * I_t, 0)
 * this is a safety objective on the product of the system with the finite
 * bound-tracking automaton, solved by the standard greatest fixed point:
 * controller picks a control, adversary picks a disturbance and successor,
 * a step is safe when the output cost stays below the running bound.
 *
 * The same product drives the exhaustive closed-loop model checker, which
 * doubles as the soundness oracle for the solver, and a generalization
 * that also handles exponential-decay certificates.
 */
#ifndef IODS_SYNTHESIS_HH_
#define IODS_SYNTHESIS_HH_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iods/compare.hh"
#include "iods/relations.hh"
#include "iods/system.hh"

namespace iods {

struct SynthesisTarget {
  double gamma = 0; /* scalar gain, >= 0 */
  double eta = 1;   /* decay per step, > 0 */
  double rho = 0;   /* constant offset, >= 0 */
};

inline PiodsCertificate target_certificate(const SynthesisTarget& t) {
  KFunction g = t.gamma > 0 ? KFunction::linear(t.gamma) : KFunction::zero();
  return {g, KldFunction::linear_decay(t.eta), t.rho};
}

/* canonical 12-significant-digit value; keeps the bound level set closed
 * under the update arithmetic */
inline double canon12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

/*
 * Finite set of values the running bound can take: zero plus the decay
 * chains started at every gained input cost.
 */
class BoundLevels {
 public:
  /* gained_values: the image of gamma(I); eta: linear decay step */
  BoundLevels(std::vector<double> gained_values, double eta, std::size_t cap = 1000000)
      : eta_(eta) {
    add(0.0);
    std::deque<double> work;
    for (double v : gained_values) {
      double c = canon12(std::max(v, 0.0));
      work.push_back(c);
    }
    while (!work.empty()) {
      double v = work.front();
      work.pop_front();
      if (v <= 0) continue;
      if (index_.count(v)) continue;
      add(v);
      if (index_.size() > cap)
        throw std::runtime_error("bound level set exceeds the configured cap (" +
                                 std::to_string(cap) + ")");
      work.push_back(decay(v));
    }
    values_.assign(index_.size(), 0.0);
    /* descending order, 0 last */
    std::vector<double> sorted;
    for (auto& [v, i] : index_) sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    index_.clear();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      values_[i] = sorted[i];
      index_[sorted[i]] = static_cast<int>(i);
    }
  }

  double decay(double v) const {
    double d = v - eta_;
    return d <= 0 ? 0.0 : canon12(d);
  }

  std::size_t size() const { return values_.size(); }
  double value(int idx) const { return values_[static_cast<std::size_t>(idx)]; }
  const std::vector<double>& values() const { return values_; }
  int zero_index() const { return index_.at(0.0); }

  int index_of(double canonical_value) const {
    auto it = index_.find(canonical_value);
    if (it == index_.end()) throw std::logic_error("value escaped the bound level set");
    return it->second;
  }

  /* b' = max(b - eta, gained, 0); `gained` must be canonical */
  int next(int b_idx, double gained_canonical) const {
    double v = std::max({decay(value(b_idx)), gained_canonical, 0.0});
    return index_of(v);
  }

 private:
  void add(double v) { index_.emplace(v, 0); }
  double eta_;
  std::vector<double> values_;
  std::map<double, int> index_;
};

/* bound level set induced by a target on a finite costed system */
inline BoundLevels bound_levels(const CostedSystem& cs, const SynthesisTarget& t,
                                std::size_t cap = 1000000) {
  std::set<double> img;
  for (int x = 0; x < static_cast<int>(cs.sys.n_states()); ++x)
    for (int u = 0; u < static_cast<int>(cs.sys.n_inputs()); ++u)
      img.insert(canon12(t.gamma * cs.cost_I(x, u)));
  return BoundLevels(std::vector<double>(img.begin(), img.end()), t.eta, cap);
}

/* ------------------------------------------------------------------ */
/* safety game                                                         */
/* ------------------------------------------------------------------ */

struct SynthesisResult {
  bool realizable = false;
  std::vector<int> losing_initials; /* abstract states with no winning start */

  std::vector<double> levels;     /* bound values, descending */
  std::vector<char> winning;      /* position (x * n_levels + b) in the region */
  std::vector<int> strategy;      /* winning position -> control id, else -1 */

  /* extracted deterministic controller */
  CostedSystem controller;
  ExplicitRelation controller_rel;               /* from controller to the plant system */
  std::vector<std::array<int, 2>> position_of;   /* controller state -> (x, b index) */

  std::size_t n_positions = 0;
  std::size_t rounds = 0;
};

/*
 * Solve the safety game and extract a deterministic controller. States of
 * the controller are the winning positions; per position the strategy
 * fixes the safe control with the smallest worst-case successor bound
 * (ties toward the smaller control id).
 */
inline SynthesisResult synthesize(const CostedSystem& cs, const SynthesisTarget& target,
                                  double tol = 1e-9) {
  const FiniteSystem& s = cs.sys;
  if (!s.split_declared)
    throw std::invalid_argument("synthesis needs a declared control/disturbance split");
  if (!(target.eta > 0)) throw std::invalid_argument("synthesis needs a positive decay");

  BoundLevels levels = bound_levels(cs, target);
  const std::size_t nb = levels.size();
  const std::size_t nx = s.n_states();
  const std::size_t nu = s.n_inputs();

  /* per (x,u): output cost, canonical gained cost */
  std::vector<double> out_cost(nx * nu), gain_cost(nx * nu);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t u = 0; u < nu; ++u) {
      out_cost[x * nu + u] = cs.cost_O(static_cast<int>(x), static_cast<int>(u));
      gain_cost[x * nu + u] =
          canon12(target.gamma * cs.cost_I(static_cast<int>(x), static_cast<int>(u)));
    }

  auto pos = [&](std::size_t x, std::size_t b) { return x * nb + b; };
  std::vector<char> win(nx * nb, 1);

  /* one control is safe at (x,b) iff for every disturbance the obligation
   * holds and every successor position stays in the candidate region */
  auto safe_control = [&](std::size_t x, int b, int c) -> bool {
    for (int d = 0; d < static_cast<int>(s.n_disturbances()); ++d) {
      int u = s.input_id(c, d);
      const auto& succ = s.succ(static_cast<int>(x), u);
      if (succ.empty()) return false;
      double inner = std::max(levels.decay(levels.value(b)), gain_cost[x * nu + u]);
      if (out_cost[x * nu + u] > inner + target.rho + tol) return false;
      int nb_idx = levels.index_of(std::max(inner, 0.0));
      for (int y : succ)
        if (!win[pos(static_cast<std::size_t>(y), static_cast<std::size_t>(nb_idx))]) return false;
    }
    return true;
  };

  SynthesisResult res;
  bool changed = true;
  while (changed) {
    changed = false;
    res.rounds++;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t b = 0; b < nb; ++b) {
        if (!win[pos(x, b)]) continue;
        bool ok = false;
        for (int c = 0; c < static_cast<int>(s.n_controls()) && !ok; ++c)
          if (safe_control(x, static_cast<int>(b), c)) ok = true;
        if (!ok) {
          win[pos(x, b)] = 0;
          changed = true;
        }
      }
  }

  res.levels = levels.values();
  res.winning = win;
  res.n_positions = nx * nb;

  const int b0 = levels.zero_index();
  res.realizable = true;
  for (int x0 : s.initial)
    if (!win[pos(static_cast<std::size_t>(x0), static_cast<std::size_t>(b0))]) {
      res.realizable = false;
      res.losing_initials.push_back(x0);
    }

  /* strategy extraction on the final region */
  res.strategy.assign(nx * nb, -1);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t b = 0; b < nb; ++b) {
      if (!win[pos(x, b)]) continue;
      int best_c = -1;
      double best_worst = kInf;
      for (int c = 0; c < static_cast<int>(s.n_controls()); ++c) {
        if (!safe_control(x, static_cast<int>(b), c)) continue;
        double worst = 0;
        for (int d = 0; d < static_cast<int>(s.n_disturbances()); ++d) {
          int u = s.input_id(c, d);
          double inner = std::max(levels.decay(levels.value(static_cast<int>(b))),
                                  gain_cost[x * nu + u]);
          worst = std::max(worst, std::max(inner, 0.0));
        }
        if (worst < best_worst - 1e-15) {
          best_worst = worst;
          best_c = c;
        }
      }
      res.strategy[pos(x, b)] = best_c;
    }

  if (!res.realizable) return res;

  /* controller system over the winning positions */
  FiniteSystem ctrl;
  std::vector<int> state_of(nx * nb, -1);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t b = 0; b < nb; ++b) {
      if (!win[pos(x, b)]) continue;
      int id = static_cast<int>(ctrl.states.size());
      StateInfo st;
      std::ostringstream os;
      os << s.states[x].label << "|b" << b;
      st.label = os.str();
      st.coords = s.states[x].coords;
      st.disc = s.states[x].disc;
      st.disc.push_back(static_cast<int>(b));
      ctrl.states.push_back(std::move(st));
      state_of[pos(x, b)] = id;
      res.position_of.push_back({static_cast<int>(x), static_cast<int>(b)});
    }
  ctrl.controls = s.controls;
  ctrl.disturbances = s.disturbances;
  ctrl.split_declared = s.split_declared;
  for (int x0 : s.initial)
    ctrl.initial.push_back(state_of[pos(static_cast<std::size_t>(x0), static_cast<std::size_t>(b0))]);
  ctrl.finalize();

  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t b = 0; b < nb; ++b) {
      int id = state_of[pos(x, b)];
      if (id < 0) continue;
      int c = res.strategy[pos(x, b)];
      for (int d = 0; d < static_cast<int>(s.n_disturbances()); ++d) {
        int u = s.input_id(c, d);
        double inner = std::max(levels.decay(levels.value(static_cast<int>(b))),
                                gain_cost[x * nu + u]);
        int nb_idx = levels.index_of(std::max(inner, 0.0));
        for (int y : s.succ(static_cast<int>(x), u)) {
          int nid = state_of[pos(static_cast<std::size_t>(y), static_cast<std::size_t>(nb_idx))];
          /* successors are winning by the fixed point */
          ctrl.add_transition(id, u, nid);
        }
      }
    }

  res.controller.sys = std::move(ctrl);
  res.controller.I = CostModel::zero();
  res.controller.O = CostModel::zero();

  /* alternating relation: controller position relates to its plant state,
   * inputs pair equal, controls restricted to the strategy */
  for (std::size_t p = 0; p < res.position_of.size(); ++p) {
    int x = res.position_of[p][0], b = res.position_of[p][1];
    int c = res.strategy[pos(static_cast<std::size_t>(x), static_cast<std::size_t>(b))];
    for (int d = 0; d < static_cast<int>(s.n_disturbances()); ++d) {
      int u = s.input_id(c, d);
      res.controller_rel.tuples.push_back({static_cast<int>(p), x, u, u});
    }
  }
  return res;
}

/* Rebuild the solver result from a serialized controller: positions are
 * recovered from the controller states (the last disc entry is the bound
 * level), the strategy from the one control enabled per state. */
inline SynthesisResult rebuild_game(const CostedSystem& cs, const SynthesisTarget& target,
                                    CostedSystem controller, ExplicitRelation rel) {
  BoundLevels levels = bound_levels(cs, target);
  const std::size_t nb = levels.size();
  const std::size_t nx = cs.sys.n_states();
  SynthesisResult res;
  res.levels = levels.values();
  res.winning.assign(nx * nb, 0);
  res.strategy.assign(nx * nb, -1);
  res.n_positions = nx * nb;

  std::map<int, int> plant_of; /* controller state -> plant state (from the relation) */
  for (const auto& t : rel.tuples) plant_of[t[0]] = t[1];
  for (std::size_t p = 0; p < controller.sys.n_states(); ++p) {
    const auto& st = controller.sys.states[p];
    if (st.disc.empty()) throw std::invalid_argument("controller state lacks its level tag");
    int b = st.disc.back();
    auto it = plant_of.find(static_cast<int>(p));
    if (it == plant_of.end())
      throw std::invalid_argument("controller state missing from the relation");
    int x = it->second;
    res.position_of.push_back({x, b});
    std::size_t pos = static_cast<std::size_t>(x) * nb + static_cast<std::size_t>(b);
    res.winning[pos] = 1;
    auto ctrls = controller.sys.enabled_controls(static_cast<int>(p));
    if (ctrls.size() != 1)
      throw std::invalid_argument("controller must enable exactly one control per state");
    res.strategy[pos] = ctrls[0];
  }
  res.realizable = true;
  const int b0 = levels.zero_index();
  for (int x0 : cs.sys.initial)
    if (!res.winning[static_cast<std::size_t>(x0) * nb + static_cast<std::size_t>(b0)]) {
      res.realizable = false;
      res.losing_initials.push_back(x0);
    }
  res.controller = std::move(controller);
  res.controller_rel = std::move(rel);
  return res;
}

/* ------------------------------------------------------------------ */
/* exhaustive closed-loop verification                                 */
/* ------------------------------------------------------------------ */

struct VerifyResult {
  bool holds = true;
  /* violating finite path: states and the inputs taken, ending at the
   * position whose obligation fails with `input` */
  std::vector<int> path_states;
  std::vector<int> path_inputs;
  int state = -1, input = -1;
  double output_cost = 0, bound = 0;
  std::size_t positions_explored = 0;
};

/*
 * Model check the stability inequality for a linear-gain linear-decay
 * certificate on a finite system: explore the product with the bound
 * tracker from every initial state and test the obligation on each
 * enabled input under all adversary choices.
 */
inline VerifyResult verify_closed_loop(const CostedSystem& cs, const SynthesisTarget& target,
                                       double tol = 1e-9) {
  const FiniteSystem& s = cs.sys;
  BoundLevels levels = bound_levels(cs, target);
  const std::size_t nb = levels.size();
  const std::size_t nx = s.n_states();

  std::vector<char> seen(nx * nb, 0);
  std::vector<std::pair<int, int>> parent(nx * nb, {-1, -1}); /* (prev position, input) */
  std::deque<int> work;
  auto pos = [&](std::size_t x, std::size_t b) { return static_cast<int>(x * nb + b); };

  VerifyResult res;
  const int b0 = levels.zero_index();
  for (int x0 : s.initial) {
    int p = pos(static_cast<std::size_t>(x0), static_cast<std::size_t>(b0));
    if (!seen[p]) {
      seen[p] = 1;
      work.push_back(p);
    }
  }

  auto fail_at = [&](int p, int u, double oc, double bnd) {
    res.holds = false;
    res.state = p / static_cast<int>(nb);
    res.input = u;
    res.output_cost = oc;
    res.bound = bnd;
    /* reconstruct the path */
    std::vector<int> rp;
    std::vector<int> ru;
    int cur = p;
    while (cur >= 0) {
      rp.push_back(cur / static_cast<int>(nb));
      auto [prev, pu] = parent[static_cast<std::size_t>(cur)];
      if (prev >= 0) ru.push_back(pu);
      cur = prev;
    }
    std::reverse(rp.begin(), rp.end());
    std::reverse(ru.begin(), ru.end());
    res.path_states = std::move(rp);
    res.path_inputs = std::move(ru);
  };

  while (!work.empty()) {
    int p = work.front();
    work.pop_front();
    res.positions_explored++;
    std::size_t x = static_cast<std::size_t>(p) / nb;
    int b = p % static_cast<int>(nb);
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u) {
      const auto& succ = s.succ(static_cast<int>(x), u);
      if (succ.empty()) continue;
      double gained = canon12(target.gamma * cs.cost_I(static_cast<int>(x), u));
      double inner = std::max(levels.decay(levels.value(b)), gained);
      double oc = cs.cost_O(static_cast<int>(x), u);
      if (oc > inner + target.rho + tol) {
        fail_at(p, u, oc, inner + target.rho);
        return res;
      }
      int nb_idx = levels.index_of(std::max(inner, 0.0));
      for (int y : succ) {
        int q = pos(static_cast<std::size_t>(y), static_cast<std::size_t>(nb_idx));
        if (!seen[q]) {
          seen[q] = 1;
          parent[static_cast<std::size_t>(q)] = {p, u};
          work.push_back(q);
        }
      }
    }
  }
  return res;
}

/* ------------------------------------------------------------------ */
/* general certificate model checking                                  */
/* ------------------------------------------------------------------ */

/*
 * Exhaustive model check of the stability inequality for certificates with
 * linear-decay or exponential decay (any gain). Exponential chains are
 * truncated below the smallest positive obligation threshold, where the
 * running bound is equivalent to zero for every comparison.
 */
inline VerifyResult model_check_piods(const CostedSystem& cs, const PiodsCertificate& cert,
                                      double tol = 1e-9) {
  const FiniteSystem& s = cs.sys;
  std::set<double> gains;
  double min_pos_threshold = kInf;
  for (int x = 0; x < static_cast<int>(s.n_states()); ++x)
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u) {
      gains.insert(canon12(cert.gamma.eval(cs.cost_I(x, u))));
      double thr = cs.cost_O(x, u) - cert.rho;
      if (thr > tol) min_pos_threshold = std::min(min_pos_threshold, thr);
    }

  /* assemble the finite level set and the decay map */
  std::map<double, double> decay_to; /* canonical value -> canonical decayed value */
  std::vector<double> values;
  switch (cert.mu.tag()) {
    case KldFunction::Tag::LinearDecay: {
      double eta = cert.mu.rate();
      std::set<double> lv = {0.0};
      std::deque<double> work(gains.begin(), gains.end());
      while (!work.empty()) {
        double v = work.front();
        work.pop_front();
        if (v <= 0 || lv.count(v)) continue;
        lv.insert(v);
        double d = v - eta;
        work.push_back(d <= 0 ? 0.0 : canon12(d));
      }
      for (double v : lv) {
        double d = v - eta;
        decay_to[v] = d <= 0 ? 0.0 : canon12(d);
      }
      values.assign(lv.begin(), lv.end());
      break;
    }
    case KldFunction::Tag::Exponential: {
      double bp = cert.mu.rate();
      std::set<double> lv = {0.0};
      for (double g : gains) {
        double v = g;
        while (v > 0 && v + tol >= min_pos_threshold && lv.size() < 1000000) {
          if (lv.count(v)) break;
          lv.insert(v);
          v = canon12(bp * v);
        }
      }
      for (double v : lv) {
        double d = canon12(bp * v);
        decay_to[v] = (d + tol >= min_pos_threshold) ? d : 0.0;
        if (v == 0.0) decay_to[v] = 0.0;
      }
      values.assign(lv.begin(), lv.end());
      break;
    }
    case KldFunction::Tag::Zero: {
      values = {0.0};
      decay_to[0.0] = 0.0;
      break;
    }
    default:
      throw std::invalid_argument("model checking supports linear-decay and exponential decay");
  }

  std::map<double, int> idx;
  for (std::size_t i = 0; i < values.size(); ++i) idx[values[i]] = static_cast<int>(i);
  auto gained_level = [&](double g) {
    if (cert.mu.tag() == KldFunction::Tag::Exponential && g > 0 && g + tol < min_pos_threshold)
      return 0.0;
    if (cert.mu.tag() == KldFunction::Tag::Zero) return 0.0;
    return g;
  };

  const std::size_t nb = values.size();
  const std::size_t nx = s.n_states();
  std::vector<char> seen(nx * nb, 0);
  std::deque<std::pair<int, int>> work; /* (x, level idx) */
  VerifyResult res;
  for (int x0 : s.initial) {
    if (!seen[static_cast<std::size_t>(x0) * nb + idx.at(0.0)]) {
      seen[static_cast<std::size_t>(x0) * nb + idx.at(0.0)] = 1;
      work.push_back({x0, idx.at(0.0)});
    }
  }
  while (!work.empty()) {
    auto [x, b] = work.front();
    work.pop_front();
    res.positions_explored++;
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u) {
      const auto& succ = s.succ(x, u);
      if (succ.empty()) continue;
      double g = gained_level(canon12(cert.gamma.eval(cs.cost_I(x, u))));
      double inner = std::max(decay_to.at(values[static_cast<std::size_t>(b)]), g);
      double oc = cs.cost_O(x, u);
      if (oc > inner + cert.rho + tol) {
        res.holds = false;
        res.state = x;
        res.input = u;
        res.output_cost = oc;
        res.bound = inner + cert.rho;
        return res;
      }
      int nbidx = idx.at(inner);
      for (int y : succ) {
        std::size_t q = static_cast<std::size_t>(y) * nb + static_cast<std::size_t>(nbidx);
        if (!seen[q]) {
          seen[q] = 1;
          work.push_back({y, nbidx});
        }
      }
    }
  }
  return res;
}

}  // namespace iods

#endif  // IODS_SYNTHESIS_HH_
