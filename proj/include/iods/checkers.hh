/*
 * checkers.hh
 *
 * Decision procedures for the relation families declared in relations.hh,
 * the constructive trace matcher, the contraction-bound constants, the
 * input-mismatch function, and certificate transport across contractive
 * relations.
 *
 * Verdicts are deterministic: pairs are visited in concrete-state-major
 * order and the reported counterexample is the first one in that order,
 * independent of the thread count.
 */
#ifndef IODS_CHECKERS_HH_
#define IODS_CHECKERS_HH_

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iods/parallel.hh"
#include "iods/relations.hh"

namespace iods {

struct Counterexample {
  std::string clause;   /* initial | input-match | successor | cost-I | cost-O | eq10 */
  std::string hat_state, con_state, input, detail;
};

struct RelationVerdict {
  bool holds = true;
  bool exhaustive = true;
  std::optional<Counterexample> ce;
  std::size_t pairs_checked = 0;
  std::size_t obligations = 0;

  std::string describe() const {
    std::ostringstream os;
    os << (holds ? "holds" : "fails") << (exhaustive ? " (exhaustive" : " (sampled");
    os << ", " << pairs_checked << " pairs, " << obligations << " obligations)";
    if (ce) {
      os << " clause=" << ce->clause << " hat=" << ce->hat_state << " con=" << ce->con_state;
      if (!ce->input.empty()) os << " input=" << ce->input;
      if (!ce->detail.empty()) os << " : " << ce->detail;
    }
    return os.str();
  }
};

struct CheckOptions {
  double pair_window = kInf;  /* skip pairs farther apart than this */
  double tol = kDistTol;
};

namespace detail {

inline bool parts_match(const std::string& la, const Vec& ca, const std::vector<int>& da,
                        const std::string& lb, const Vec& cb, const std::vector<int>& db) {
  if (da != db) return false;
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (std::abs(ca[i] - cb[i]) > 1e-9) return false;
  if (ca.empty() && da.empty()) return la == lb;
  return true;
}

/* spatial lookup of abstract states by (selected disc, coord cell) */
class AbstractIndex {
 public:
  AbstractIndex(const FiniteSystem& hat, const StateDistance& dx, double cell)
      : hat_(hat), dx_(dx), cell_(cell) {
    use_cells_ = dx.kind == StateDistance::Kind::CoordBall && cell_ > 0 && cell_ < kInf;
    full_ = dx.hat_idx.empty() && dx.con_idx.empty() && dx.hat_disc_idx.empty() &&
            dx.con_disc_idx.empty();
    if (dx.kind == StateDistance::Kind::Table) return; /* no index; scan */
    for (std::size_t i = 0; i < hat.n_states(); ++i) buckets_[key_of_hat(i)].push_back(static_cast<int>(i));
  }

  /* hat states whose selected disc matches and whose selected coords lie
   * within one cell ring of the query point; ids ascending */
  void candidates(const Vec& con_coords, const std::vector<int>& con_disc,
                  std::vector<int>& out) const {
    out.clear();
    if (dx_.kind == StateDistance::Kind::Table) {
      for (std::size_t i = 0; i < hat_.n_states(); ++i) out.push_back(static_cast<int>(i));
      return;
    }
    std::vector<long> base = disc_key_con(con_disc);
    if (!use_cells_) {
      auto it = buckets_.find(base);
      if (it != buckets_.end()) out = it->second;
      return;
    }
    std::vector<double> sel = select_con_coords(con_coords);
    std::size_t d = sel.size();
    std::vector<long> cellc(d);
    for (std::size_t i = 0; i < d; ++i) cellc[i] = static_cast<long>(std::floor(sel[i] / cell_));
    std::vector<long> off(d, -1);
    while (true) {
      std::vector<long> key = base;
      for (std::size_t i = 0; i < d; ++i) key.push_back(cellc[i] + off[i]);
      auto it = buckets_.find(key);
      if (it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      std::size_t i = d;
      bool done = true;
      while (i-- > 0) {
        if (++off[i] <= 1) {
          done = false;
          break;
        }
        off[i] = -1;
        if (i == 0) break;
      }
      if (done || d == 0) break;
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::vector<long> disc_key_hat(const std::vector<int>& disc) const {
    std::vector<long> k;
    if (full_)
      for (int v : disc) k.push_back(v);
    else
      for (int i : dx_.hat_disc_idx) k.push_back(disc[static_cast<std::size_t>(i)]);
    k.push_back(-1000000); /* separator between disc and cell parts */
    return k;
  }
  std::vector<long> disc_key_con(const std::vector<int>& disc) const {
    std::vector<long> k;
    if (full_)
      for (int v : disc) k.push_back(v);
    else
      for (int i : dx_.con_disc_idx) k.push_back(disc[static_cast<std::size_t>(i)]);
    k.push_back(-1000000);
    return k;
  }
  std::vector<double> select_hat_coords(const Vec& c) const {
    if (full_) return c;
    std::vector<double> s;
    for (int i : dx_.hat_idx) s.push_back(c[static_cast<std::size_t>(i)]);
    return s;
  }
  std::vector<double> select_con_coords(const Vec& c) const {
    if (full_) return c;
    std::vector<double> s;
    for (int i : dx_.con_idx) s.push_back(c[static_cast<std::size_t>(i)]);
    return s;
  }
  std::vector<long> key_of_hat(std::size_t i) const {
    std::vector<long> k = disc_key_hat(hat_.states[i].disc);
    if (use_cells_)
      for (double v : select_hat_coords(hat_.states[i].coords))
        k.push_back(static_cast<long>(std::floor(v / cell_)));
    return k;
  }

  const FiniteSystem& hat_;
  const StateDistance& dx_;
  double cell_;
  bool use_cells_ = false;
  bool full_ = true;
  std::map<std::vector<long>, std::vector<int>> buckets_;
};

/* pairing maps resolved against a concrete side and an abstract system */
struct PairingMaps {
  /* per hat control: paired concrete controls, ascending */
  std::vector<std::vector<int>> con_controls_of_hat;
  /* per concrete control: paired hat controls, ascending */
  std::vector<std::vector<int>> hat_controls_of_con;
  /* per concrete disturbance: matched hat disturbance or -1 */
  std::vector<int> hat_dist_of_con;

  static PairingMaps build(const InputPairing& pu, const FiniteSystem& hat,
                           const SystemSide& con) {
    PairingMaps m;
    std::size_t hc = hat.n_controls(), cc = con.n_controls();
    m.con_controls_of_hat.assign(hc, {});
    m.hat_controls_of_con.assign(cc, {});
    m.hat_dist_of_con.assign(con.n_dists(), -1);
    switch (pu.kind) {
      case InputPairing::Kind::ControlEqualDistZero: {
        for (std::size_t h = 0; h < hc; ++h)
          for (std::size_t c = 0; c < cc; ++c)
            if (pu.match_control(hat.controls[h].label, hat.controls[h].coords,
                                 hat.controls[h].disc, con.control(c).label,
                                 con.control(c).coords, con.control(c).disc)) {
              m.con_controls_of_hat[h].push_back(static_cast<int>(c));
              m.hat_controls_of_con[c].push_back(static_cast<int>(h));
            }
        for (std::size_t d = 0; d < con.n_dists(); ++d)
          for (std::size_t hd = 0; hd < hat.n_disturbances(); ++hd)
            if (pu.match_dist(hat.disturbances[hd].disc, con.dist(d).disc)) {
              m.hat_dist_of_con[d] = static_cast<int>(hd);
              break;
            }
        break;
      }
      case InputPairing::Kind::AllWithBot: {
        for (std::size_t c = 0; c < cc; ++c) m.hat_controls_of_con[c].push_back(0);
        for (std::size_t h = 0; h < hc; ++h)
          if (h == 0)
            for (std::size_t c = 0; c < cc; ++c)
              m.con_controls_of_hat[0].push_back(static_cast<int>(c));
        for (std::size_t d = 0; d < con.n_dists(); ++d) m.hat_dist_of_con[d] = 0;
        break;
      }
      case InputPairing::Kind::IdentityFlat: {
        for (std::size_t h = 0; h < hc && h < cc; ++h) {
          m.con_controls_of_hat[h].push_back(static_cast<int>(h));
          m.hat_controls_of_con[h].push_back(static_cast<int>(h));
        }
        for (std::size_t d = 0; d < con.n_dists() && d < hat.n_disturbances(); ++d)
          m.hat_dist_of_con[d] = static_cast<int>(d);
        break;
      }
      case InputPairing::Kind::ExplicitPairs: {
        /* pairs are flat input ids; project onto the split parts */
        std::size_t hd = hat.n_disturbances();
        for (auto& [hu, cu] : pu.pairs) {
          int h = hu / static_cast<int>(hd);
          int c = cu / static_cast<int>(con.n_dists());
          int d = cu % static_cast<int>(con.n_dists());
          auto& v = m.con_controls_of_hat[h];
          if (std::find(v.begin(), v.end(), c) == v.end()) v.push_back(c);
          auto& w = m.hat_controls_of_con[c];
          if (std::find(w.begin(), w.end(), h) == w.end()) w.push_back(h);
          m.hat_dist_of_con[d] = hu % static_cast<int>(hd);
        }
        for (auto& v : m.con_controls_of_hat) std::sort(v.begin(), v.end());
        for (auto& v : m.hat_controls_of_con) std::sort(v.begin(), v.end());
        break;
      }
    }
    return m;
  }
};

}  // namespace detail

/* ------------------------------------------------------------------ */
/* contractive relation checkers (ball profiles)                       */
/* ------------------------------------------------------------------ */

namespace detail {

struct CheckPartial {
  std::optional<Counterexample> ce;
  std::size_t first_fail_state = SIZE_MAX;
  std::size_t pairs = 0, obligations = 0;
};

/* shared engine for the plain and alternating contractive checks */
inline RelationVerdict check_contractive(const SystemSide& con, const CostedSystem& hat,
                                         const RelationProfile& p, const CostGains* gains,
                                         const CheckOptions& opt) {
  if (p.beta >= 1.0 || p.beta < 0.0)
    throw std::invalid_argument("contractive relation needs beta in [0,1)");
  const bool alternating = p.orientation == Orientation::Alternating;
  if (alternating && !hat.sys.split_declared)
    throw std::invalid_argument("alternating check needs a declared control/disturbance split");

  RelationVerdict verdict;
  verdict.exhaustive = con.exhaustive() && opt.pair_window == kInf;

  /* clause 1 */
  if (alternating) {
    for (int h0 : hat.sys.initial) {
      double d = con.initial_distance(hat.sys.states[h0].coords, hat.sys.states[h0].disc, p.dx);
      if (d > p.kappa + opt.tol) {
        verdict.holds = false;
        verdict.ce = Counterexample{"initial", hat.sys.states[h0].label, "", "",
                                    "no concrete initial state within kappa (closest " +
                                        std::to_string(d) + ")"};
        return verdict;
      }
    }
  } else {
    for (std::size_t x0 : con.initial_list()) {
      double best = kInf;
      for (int h0 : hat.sys.initial)
        best = std::min(best, p.dx.eval(hat.sys.states[h0].coords, hat.sys.states[h0].disc,
                                        con.coords(x0), con.disc(x0), h0, static_cast<int>(x0)));
      if (best > p.kappa + opt.tol) {
        verdict.holds = false;
        verdict.ce = Counterexample{"initial", "", con.label(x0), "",
                                    "no abstract initial state within kappa (closest " +
                                        std::to_string(best) + ")"};
        return verdict;
      }
    }
  }

  detail::AbstractIndex index(hat.sys, p.dx,
                              opt.pair_window == kInf ? 0.0 : opt.pair_window);
  detail::PairingMaps pm = detail::PairingMaps::build(p.pu, hat.sys, con);

  std::atomic<std::size_t> first_fail{SIZE_MAX};

  auto body = [&](std::size_t beg, std::size_t end, CheckPartial& out) {
    std::vector<int> cand;
    std::vector<SystemSide::Succ> succ;
    for (std::size_t x = beg; x < end; ++x) {
      if (x > first_fail.load(std::memory_order_relaxed)) return;
      index.candidates(con.coords(x), con.disc(x), cand);
      for (int hx : cand) {
        double d = p.dx.eval(hat.sys.states[hx].coords, hat.sys.states[hx].disc, con.coords(x),
                             con.disc(x), hx, static_cast<int>(x));
        if (d == kInf || d > opt.pair_window) continue;
        out.pairs++;
        double eps0 = std::max(p.kappa, d);
        auto fail = [&](const char* clause, const std::string& input, std::string detail) {
          if (!out.ce) {
            out.ce = Counterexample{clause, hat.sys.states[hx].label, con.label(x), input,
                                    std::move(detail)};
            out.first_fail_state = x;
            std::size_t cur = first_fail.load();
            while (x < cur && !first_fail.compare_exchange_weak(cur, x)) {
            }
          }
        };

        /* one obligation: the chosen (hat control, con control) must work
         * for every concrete disturbance */
        auto responds = [&](int hc, int cc) -> bool {
          for (std::size_t dd = 0; dd < con.n_dists(); ++dd) {
            if (!con.enabled(x, static_cast<std::size_t>(cc), dd)) continue;
            int hd = pm.hat_dist_of_con[dd];
            if (hd < 0) return false;
            int hu = hat.sys.input_id(hc, hd);
            const auto& hsucc = hat.sys.succ(hx, hu);
            if (hsucc.empty()) return false;
            double sd = p.sd.eval(hat.sys.disturbances[hd].coords, con.dist(dd).coords);
            double bound = p.kappa + p.beta * eps0 + p.lambda * sd;
            con.successors(x, static_cast<std::size_t>(cc), dd, succ);
            for (const auto& s : succ) {
              double best = kInf;
              for (int hy : hsucc) {
                best = std::min(best, p.dx.eval(hat.sys.states[hy].coords, hat.sys.states[hy].disc,
                                                s.coords, s.disc, hy, s.id));
                if (best <= bound + opt.tol) break;
              }
              if (best > bound + opt.tol) return false;
            }
          }
          return true;
        };

        /* cost inequalities over every related input tuple */
        auto cost_ok = [&](int hc, int cc) -> bool {
          if (!gains) return true;
          for (std::size_t dd = 0; dd < con.n_dists(); ++dd) {
            int hd = pm.hat_dist_of_con[dd];
            if (hd < 0) continue; /* tuple not in the relation */
            int hu = hat.sys.input_id(hc, hd);
            double sd = p.sd.eval(hat.sys.disturbances[hd].coords, con.dist(dd).coords);
            double epsp = std::max(eps0, sd);
            double Ihat = hat.cost_I(hx, hu);
            double Icon = con.cost_I(x, static_cast<std::size_t>(cc), dd);
            if (Ihat > Icon + gains->gamma_I.eval(epsp) + opt.tol) {
              fail("cost-I", hat.sys.input_label(hu),
                   "abstract input cost " + std::to_string(Ihat) + " exceeds " +
                       std::to_string(Icon) + " + gain(" + std::to_string(epsp) + ")");
              return false;
            }
            double Ohat = hat.cost_O(hx, hu);
            double Ocon = con.cost_O(x, static_cast<std::size_t>(cc), dd);
            if (Ocon > Ohat + gains->gamma_O.eval(epsp) + opt.tol) {
              fail("cost-O", hat.sys.input_label(hu),
                   "concrete output cost " + std::to_string(Ocon) + " exceeds " +
                       std::to_string(Ohat) + " + gain(" + std::to_string(epsp) + ")");
              return false;
            }
          }
          return true;
        };

        if (alternating) {
          for (int hc = 0; hc < static_cast<int>(hat.sys.n_controls()); ++hc) {
            /* costs quantify over all related tuples */
            for (int cc : pm.con_controls_of_hat[hc])
              if (!cost_ok(hc, cc)) return;
            if (!hat.sys.control_enabled(hx, hc)) continue;
            out.obligations++;
            bool found = false;
            for (int cc : pm.con_controls_of_hat[hc]) {
              if (!con.control_enabled(x, static_cast<std::size_t>(cc))) continue;
              if (responds(hc, cc)) {
                found = true;
                break;
              }
            }
            if (!found) {
              fail("successor", hat.sys.controls[hc].label,
                   "no concrete control answers this abstract control for all disturbances");
              return;
            }
          }
        } else {
          /* plain: for every enabled concrete input there must be a related
           * abstract input whose successors cover */
          for (std::size_t cc = 0; cc < con.n_controls(); ++cc) {
            for (int hc : pm.hat_controls_of_con[cc])
              if (!cost_ok(hc, static_cast<int>(cc))) return;
            for (std::size_t dd = 0; dd < con.n_dists(); ++dd) {
              if (!con.enabled(x, cc, dd)) continue;
              int hd = pm.hat_dist_of_con[dd];
              out.obligations++;
              bool found = false;
              for (int hc : pm.hat_controls_of_con[cc]) {
                if (hd < 0) break;
                int hu = hat.sys.input_id(hc, hd);
                const auto& hsucc = hat.sys.succ(hx, hu);
                if (hsucc.empty()) continue;
                double sd = p.sd.eval(hat.sys.disturbances[hd].coords, con.dist(dd).coords);
                double bound = p.kappa + p.beta * eps0 + p.lambda * sd;
                con.successors(x, cc, dd, succ);
                bool all = true;
                for (const auto& s : succ) {
                  double best = kInf;
                  for (int hy : hsucc) {
                    best = std::min(best,
                                    p.dx.eval(hat.sys.states[hy].coords, hat.sys.states[hy].disc,
                                              s.coords, s.disc, hy, s.id));
                    if (best <= bound + opt.tol) break;
                  }
                  if (best > bound + opt.tol) {
                    all = false;
                    break;
                  }
                }
                if (all) {
                  found = true;
                  break;
                }
              }
              if (!found) {
                fail("successor",
                     con.control(cc).label + (con.dist(dd).label.empty() ? "" : "|") +
                         con.dist(dd).label,
                     "no abstract input matches this concrete input within the contraction bound");
                return;
              }
            }
          }
        }
      }
    }
  };

  CheckPartial total = parallel_chunks<CheckPartial>(
      con.n_states(), body,
      [](CheckPartial& acc, CheckPartial& part) {
        acc.pairs += part.pairs;
        acc.obligations += part.obligations;
        if (part.ce && (!acc.ce || part.first_fail_state < acc.first_fail_state)) {
          acc.ce = part.ce;
          acc.first_fail_state = part.first_fail_state;
        }
      });

  verdict.pairs_checked = total.pairs;
  verdict.obligations = total.obligations;
  if (total.ce) {
    verdict.holds = false;
    verdict.ce = total.ce;
  }
  return verdict;
}

}  // namespace detail

/* contractive simulation from the concrete system to the abstraction */
inline RelationVerdict check_acsr(const SystemSide& con, const CostedSystem& hat,
                                  const RelationProfile& p, const CostGains* gains = nullptr,
                                  const CheckOptions& opt = {}) {
  if (p.orientation != Orientation::Plain)
    throw std::invalid_argument("check_acsr needs a plain-orientation profile");
  return detail::check_contractive(con, hat, p, gains, opt);
}

/* contractive alternating simulation from the abstraction to the concrete
 * system (control chosen against every disturbance) */
inline RelationVerdict check_acasr(const SystemSide& con, const CostedSystem& hat,
                                   const RelationProfile& p, const CostGains* gains = nullptr,
                                   const CheckOptions& opt = {}) {
  if (p.orientation != Orientation::Alternating)
    throw std::invalid_argument("check_acasr needs an alternating-orientation profile");
  return detail::check_contractive(con, hat, p, gains, opt);
}

inline RelationVerdict check_acsr(const CostedSystem& con, const CostedSystem& hat,
                                  const RelationProfile& p, const CostGains* gains = nullptr,
                                  const CheckOptions& opt = {}) {
  FiniteSide side(con);
  return check_acsr(static_cast<const SystemSide&>(side), hat, p, gains, opt);
}

inline RelationVerdict check_acasr(const CostedSystem& con, const CostedSystem& hat,
                                   const RelationProfile& p, const CostGains* gains = nullptr,
                                   const CheckOptions& opt = {}) {
  FiniteSide side(con);
  return check_acasr(static_cast<const SystemSide&>(side), hat, p, gains, opt);
}

/* ------------------------------------------------------------------ */
/* exact relation checkers (explicit finite relations)                 */
/* ------------------------------------------------------------------ */

/* tuples of a ball profile at a fixed eps between two finite systems */
inline ExplicitRelation materialize_relation(const RelationProfile& p, const CostedSystem& con,
                                             const CostedSystem& hat, double eps) {
  ExplicitRelation rel;
  FiniteSide side(con);
  detail::PairingMaps pm = detail::PairingMaps::build(p.pu, hat.sys, side);
  for (std::size_t hx = 0; hx < hat.sys.n_states(); ++hx)
    for (std::size_t cx = 0; cx < con.sys.n_states(); ++cx) {
      double d = p.dx.eval(hat.sys.states[hx].coords, hat.sys.states[hx].disc,
                           con.sys.states[cx].coords, con.sys.states[cx].disc,
                           static_cast<int>(hx), static_cast<int>(cx));
      if (d > eps + kDistTol) continue;
      for (std::size_t cc = 0; cc < con.sys.n_controls(); ++cc)
        for (int hc : pm.hat_controls_of_con[cc])
          for (std::size_t dd = 0; dd < con.sys.n_disturbances(); ++dd) {
            int hd = pm.hat_dist_of_con[dd];
            if (hd < 0) continue;
            rel.tuples.push_back({static_cast<int>(hx), static_cast<int>(cx),
                                  hat.sys.input_id(hc, hd),
                                  con.sys.input_id(static_cast<int>(cc), static_cast<int>(dd))});
          }
    }
  return rel;
}

/* exact simulation relation (Milner-style, with inputs) */
inline RelationVerdict check_sr(const CostedSystem& con, const CostedSystem& hat,
                                const ExplicitRelation& rel) {
  RelationVerdict v;
  auto pairs = rel.state_pairs();
  /* clause 1 */
  for (int x0 : con.sys.initial) {
    bool ok = false;
    for (int h0 : hat.sys.initial)
      if (pairs.count({h0, x0})) ok = true;
    if (!ok) {
      v.holds = false;
      v.ce = Counterexample{"initial", "", con.sys.states[x0].label, "",
                            "initial state has no related abstract initial state"};
      return v;
    }
  }
  /* index tuples by (hat_x, con_x, con_u) */
  std::map<std::array<int, 3>, std::vector<int>> by_input;
  for (const auto& t : rel.tuples) by_input[{t[0], t[1], t[3]}].push_back(t[2]);
  for (auto& [k, hus] : by_input) std::sort(hus.begin(), hus.end());

  for (const auto& [hx, cx] : pairs) {
    v.pairs_checked++;
    for (int u = 0; u < static_cast<int>(con.sys.n_inputs()); ++u) {
      if (con.sys.succ(cx, u).empty()) continue;
      v.obligations++;
      auto it = by_input.find({hx, cx, u});
      bool found = false;
      if (it != by_input.end()) {
        for (int hu : it->second) {
          const auto& hsucc = hat.sys.succ(hx, hu);
          if (hsucc.empty()) continue;
          bool all = true;
          for (int y : con.sys.succ(cx, u)) {
            bool one = false;
            for (int hy : hsucc)
              if (pairs.count({hy, y})) {
                one = true;
                break;
              }
            if (!one) {
              all = false;
              break;
            }
          }
          if (all) {
            found = true;
            break;
          }
        }
      }
      if (!found) {
        v.holds = false;
        v.ce = Counterexample{it == by_input.end() ? "input-match" : "successor",
                              hat.sys.states[hx].label, con.sys.states[cx].label,
                              con.sys.input_label(u),
                              it == by_input.end()
                                  ? "no related abstract input for this concrete input"
                                  : "no abstract input covers all concrete successors"};
        return v;
      }
    }
  }
  return v;
}

/* input-output refinement of an exact simulation: cost inequalities with a
 * uniform slack on every related tuple (slack 0 recovers the exact case) */
inline RelationVerdict check_iosr(const CostedSystem& con, const CostedSystem& hat,
                                  const ExplicitRelation& rel, double epsilon_slack,
                                  double tol = kDistTol) {
  RelationVerdict v;
  for (const auto& t : rel.tuples) {
    v.obligations++;
    double Ihat = hat.cost_I(t[0], t[2]);
    double Icon = con.cost_I(t[1], t[3]);
    double Ohat = hat.cost_O(t[0], t[2]);
    double Ocon = con.cost_O(t[1], t[3]);
    if (Ihat > Icon + epsilon_slack + tol || Ocon > Ohat + epsilon_slack + tol) {
      v.holds = false;
      v.ce = Counterexample{Ihat > Icon + epsilon_slack + tol ? "cost-I" : "cost-O",
                            hat.sys.states[t[0]].label, con.sys.states[t[1]].label,
                            con.sys.input_label(t[3]),
                            "cost inequality violated at slack " + std::to_string(epsilon_slack)};
      return v;
    }
  }
  return v;
}

/* exact alternating simulation on an explicit relation (the degenerate
 * contractive case with all parameters zero), including the input-tuple
 * normalization that every recorded control pair answers all disturbances */
inline RelationVerdict check_asr(const CostedSystem& hat, const CostedSystem& con,
                                 const ExplicitRelation& rel, bool check_normalization = true) {
  RelationVerdict v;
  auto pairs = rel.state_pairs();
  for (int h0 : hat.sys.initial) {
    bool ok = false;
    for (int x0 : con.sys.initial)
      if (pairs.count({h0, x0})) ok = true;
    if (!ok) {
      v.holds = false;
      v.ce = Counterexample{"initial", hat.sys.states[h0].label, "", "",
                            "abstract initial state has no related concrete initial state"};
      return v;
    }
  }

  std::size_t hd_n = hat.sys.n_disturbances(), cd_n = con.sys.n_disturbances();
  /* tuples keyed by (hat_x, con_x, hat_c, con_c) -> per con_d the hat_ds */
  std::map<std::array<int, 4>, std::map<int, std::vector<int>>> resp;
  for (const auto& t : rel.tuples) {
    int hc = t[2] / static_cast<int>(hd_n), hd = t[2] % static_cast<int>(hd_n);
    int cc = t[3] / static_cast<int>(cd_n), cd = t[3] % static_cast<int>(cd_n);
    resp[{t[0], t[1], hc, cc}][cd].push_back(hd);
  }

  auto covers = [&](int hx, int cx, int hc, int hd, int cc, int cd) -> bool {
    const auto& hsucc = hat.sys.succ(hx, hat.sys.input_id(hc, hd));
    const auto& csucc = con.sys.succ(cx, con.sys.input_id(cc, cd));
    if (hsucc.empty()) return false;
    for (int y : csucc) {
      bool one = false;
      for (int hy : hsucc)
        if (pairs.count({hy, y})) {
          one = true;
          break;
        }
      if (!one) return false;
    }
    return true;
  };

  auto answers_all = [&](int hx, int cx, int hc, int cc) -> bool {
    for (int cd = 0; cd < static_cast<int>(cd_n); ++cd) {
      if (con.sys.succ(cx, con.sys.input_id(cc, cd)).empty()) continue;
      auto it = resp.find({hx, cx, hc, cc});
      bool one = false;
      if (it != resp.end()) {
        auto jt = it->second.find(cd);
        if (jt != it->second.end())
          for (int hd : jt->second)
            if (covers(hx, cx, hc, hd, cc, cd)) {
              one = true;
              break;
            }
      }
      if (!one) return false;
    }
    return true;
  };

  for (const auto& [hx, cx] : pairs) {
    v.pairs_checked++;
    for (int hc = 0; hc < static_cast<int>(hat.sys.n_controls()); ++hc) {
      if (!hat.sys.control_enabled(hx, hc)) continue;
      v.obligations++;
      bool found = false;
      for (int cc = 0; cc < static_cast<int>(con.sys.n_controls()) && !found; ++cc) {
        if (!con.sys.control_enabled(cx, cc)) continue;
        if (answers_all(hx, cx, hc, cc)) found = true;
      }
      if (!found) {
        v.holds = false;
        v.ce = Counterexample{"successor", hat.sys.states[hx].label, con.sys.states[cx].label,
                              hat.sys.controls[hc].label,
                              "no concrete control answers this abstract control"};
        return v;
      }
    }
  }

  if (check_normalization) {
    for (const auto& t : rel.tuples) {
      int hc = t[2] / static_cast<int>(hd_n);
      int cc = t[3] / static_cast<int>(cd_n);
      if (!answers_all(t[0], t[1], hc, cc)) {
        v.holds = false;
        v.ce = Counterexample{"eq10", hat.sys.states[t[0]].label, con.sys.states[t[1]].label,
                              hat.sys.input_label(t[2]),
                              "relation tuple whose control pair does not answer all "
                              "disturbances (normalization violated)"};
        return v;
      }
    }
  }
  return v;
}

/* ------------------------------------------------------------------ */
/* maximal exact alternating simulation                                */
/* ------------------------------------------------------------------ */

/* Largest exact alternating simulation relation from s_hat to s, computed
 * by pruning the full product until the alternating successor clause holds,
 * then normalizing the input tuples. */
inline ExplicitRelation max_asr(const CostedSystem& hat, const CostedSystem& con) {
  std::size_t nh = hat.sys.n_states(), nc = con.sys.n_states();
  std::vector<char> in(nh * nc, 1);
  auto idx = [&](int h, int c) { return static_cast<std::size_t>(h) * nc + c; };

  auto covers = [&](int hx, int cx, int hu, int cu) -> bool {
    const auto& hsucc = hat.sys.succ(hx, hu);
    if (hsucc.empty()) return false;
    for (int y : con.sys.succ(cx, cu)) {
      bool one = false;
      for (int hy : hsucc)
        if (in[idx(hy, y)]) {
          one = true;
          break;
        }
      if (!one) return false;
    }
    return true;
  };

  auto pair_ok = [&](int hx, int cx) -> bool {
    for (int hc = 0; hc < static_cast<int>(hat.sys.n_controls()); ++hc) {
      if (!hat.sys.control_enabled(hx, hc)) continue;
      bool found = false;
      for (int cc = 0; cc < static_cast<int>(con.sys.n_controls()) && !found; ++cc) {
        if (!con.sys.control_enabled(cx, cc)) continue;
        bool all = true;
        for (int cd = 0; cd < static_cast<int>(con.sys.n_disturbances()); ++cd) {
          if (con.sys.succ(cx, con.sys.input_id(cc, cd)).empty()) continue;
          bool one = false;
          for (int hd = 0; hd < static_cast<int>(hat.sys.n_disturbances()); ++hd)
            if (covers(hx, cx, hat.sys.input_id(hc, hd), con.sys.input_id(cc, cd))) {
              one = true;
              break;
            }
          if (!one) {
            all = false;
            break;
          }
        }
        if (all) found = true;
      }
      if (!found) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t h = 0; h < nh; ++h)
      for (std::size_t c = 0; c < nc; ++c)
        if (in[idx(static_cast<int>(h), static_cast<int>(c))] &&
            !pair_ok(static_cast<int>(h), static_cast<int>(c))) {
          in[idx(static_cast<int>(h), static_cast<int>(c))] = 0;
          changed = true;
        }
  }

  /* collect normalized tuples: a control pair enters only if it answers
   * every concrete disturbance inside the surviving state pairs */
  ExplicitRelation rel;
  for (std::size_t h = 0; h < nh; ++h)
    for (std::size_t c = 0; c < nc; ++c) {
      if (!in[idx(static_cast<int>(h), static_cast<int>(c))]) continue;
      for (int hc = 0; hc < static_cast<int>(hat.sys.n_controls()); ++hc) {
        if (!hat.sys.control_enabled(static_cast<int>(h), hc)) continue;
        for (int cc = 0; cc < static_cast<int>(con.sys.n_controls()); ++cc) {
          if (!con.sys.control_enabled(static_cast<int>(c), cc)) continue;
          /* does (hc, cc) answer all disturbances? */
          bool all = true;
          std::vector<std::pair<int, int>> witness;
          for (int cd = 0; cd < static_cast<int>(con.sys.n_disturbances()); ++cd) {
            if (con.sys.succ(static_cast<int>(c), con.sys.input_id(cc, cd)).empty()) continue;
            bool one = false;
            for (int hd = 0; hd < static_cast<int>(hat.sys.n_disturbances()); ++hd)
              if (covers(static_cast<int>(h), static_cast<int>(c), hat.sys.input_id(hc, hd),
                         con.sys.input_id(cc, cd))) {
                witness.push_back({cd, hd});
                one = true;
                break;
              }
            if (!one) {
              all = false;
              break;
            }
          }
          if (!all) continue;
          for (auto& [cd, hd] : witness)
            rel.tuples.push_back({static_cast<int>(h), static_cast<int>(c),
                                  hat.sys.input_id(hc, hd), con.sys.input_id(cc, cd)});
        }
      }
    }
  std::sort(rel.tuples.begin(), rel.tuples.end());
  rel.tuples.erase(std::unique(rel.tuples.begin(), rel.tuples.end()), rel.tuples.end());
  return rel;
}

}  // namespace iods

#endif  // IODS_CHECKERS_HH_
