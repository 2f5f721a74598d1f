/*
 * compose.hh
 *
 * Synchronized composition of finite systems with respect to a relation,
 * including the contractive-relation variant that tightens the allowed
 * joint transitions by the realized state distance, plus the compositional
 * lifting of contractive alternating relations to product systems.
 *
 * The composite materializes the part of the product reachable from the
 * synchronized initial pairs; unreachable product states cannot occur in
 * any behavior and are irrelevant to every query downstream.
 */
#ifndef IODS_COMPOSE_HH_
#define IODS_COMPOSE_HH_

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/checkers.hh"
#include "iods/relations.hh"
#include "iods/system.hh"

namespace iods {

struct Synchronizer {
  enum class Kind {
    FullProduct,     /* every joint move allowed */
    ZeroControlWhen, /* left control must be zero while the right system sits
                        in a designated state */
    ExplicitTuples,  /* explicit H as (x1, x2, u1_flat, u2_flat) tuples */
    Profile          /* contractive alternating relation from left to right */
  };
  Kind kind = Kind::FullProduct;
  int when_right_state = -1;
  std::vector<std::array<int, 4>> tuples;
  std::optional<RelationProfile> profile;

  static Synchronizer full_product() { return {}; }
  static Synchronizer zero_control_when(int right_state) {
    Synchronizer s;
    s.kind = Kind::ZeroControlWhen;
    s.when_right_state = right_state;
    return s;
  }
  static Synchronizer explicit_tuples(std::vector<std::array<int, 4>> t) {
    Synchronizer s;
    s.kind = Kind::ExplicitTuples;
    s.tuples = std::move(t);
    return s;
  }
  static Synchronizer with_profile(RelationProfile p) {
    Synchronizer s;
    s.kind = Kind::Profile;
    s.profile = std::move(p);
    return s;
  }
};

/* composite system plus the block/factor structure needed to build
 * distances, pairings, and lifted costs on it */
struct ComposedSystem {
  CostedSystem cs;

  std::size_t left_coord_dim = 0, left_disc_dim = 0;
  std::size_t left_dist_coord_dim = 0, left_dist_disc_dim = 0;
  std::size_t left_ctrl_coord_dim = 0, left_ctrl_disc_dim = 0;

  std::vector<std::array<int, 2>> state_factors;   /* composite -> (left, right) */
  std::vector<std::array<int, 2>> control_factors;
  std::vector<std::array<int, 2>> dist_factors;
  std::map<std::array<int, 2>, int> state_ids;

  int find_state(int l, int r) const {
    auto it = state_ids.find({l, r});
    return it == state_ids.end() ? -1 : it->second;
  }
};

namespace detail {

inline bool coords_all_zero(const Vec& v) {
  for (double x : v)
    if (std::abs(x) > 1e-12) return false;
  return true;
}

}  // namespace detail

/*
 * Composition of two finite systems with respect to a synchronizer. Joint
 * transitions require each component to step by its own transition map,
 * the current tuple to satisfy the synchronizer, and the successor pair to
 * remain synchronized (for contractive profiles: within the contracted
 * ball around kappa + beta e + lambda sd).
 */
inline ComposedSystem compose(const CostedSystem& left, const CostedSystem& right,
                              const Synchronizer& sync) {
  ComposedSystem out;
  FiniteSystem& sys = out.cs.sys;

  const FiniteSystem& L = left.sys;
  const FiniteSystem& R = right.sys;

  out.left_coord_dim = L.n_states() ? L.states[0].coords.size() : 0;
  out.left_disc_dim = L.n_states() ? L.states[0].disc.size() : 0;
  out.left_dist_coord_dim = L.disturbances[0].coords.size();
  out.left_dist_disc_dim = L.disturbances[0].disc.size();
  out.left_ctrl_coord_dim = L.controls[0].coords.size();
  out.left_ctrl_disc_dim = L.controls[0].disc.size();

  std::set<std::pair<int, int>> h_states; /* ExplicitTuples state projection */
  /* input pairs allowed per (l, r) state pair, deduplicated and sorted */
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> h_inputs;
  if (sync.kind == Synchronizer::Kind::ExplicitTuples) {
    for (const auto& t : sync.tuples) {
      h_states.insert({t[0], t[1]});
      h_inputs[{t[0], t[1]}].push_back({t[2], t[3]});
    }
    for (auto& [k, v] : h_inputs) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }

  auto state_pair_sync = [&](int l, int r) -> bool {
    switch (sync.kind) {
      case Synchronizer::Kind::FullProduct:
      case Synchronizer::Kind::ZeroControlWhen: return true;
      case Synchronizer::Kind::ExplicitTuples: return h_states.count({l, r}) > 0;
      case Synchronizer::Kind::Profile: {
        /* initial pairs intersect R_X(kappa); step pairs are handled with
         * the realized distance below */
        return true;
      }
    }
    return true;
  };

  auto dx_of = [&](int l, int r) -> double {
    const RelationProfile& p = *sync.profile;
    return p.dx.eval(L.states[l].coords, L.states[l].disc, R.states[r].coords, R.states[r].disc,
                     l, r);
  };

  /* controls and disturbances: interned pairs, the (0,0) pair first so the
   * composite keeps the no-disturbance input at flat id 0 */
  std::map<std::array<int, 2>, int> ctrl_ids, dist_ids;
  auto intern_ctrl = [&](int lc, int rc) -> int {
    auto it = ctrl_ids.find({lc, rc});
    if (it != ctrl_ids.end()) return it->second;
    int id = static_cast<int>(sys.controls.size());
    InputPart p;
    const InputPart& a = L.controls[lc];
    const InputPart& b = R.controls[rc];
    p.label = a.label + (a.label.empty() || b.label.empty() ? "" : "|") + b.label;
    p.coords = a.coords;
    p.coords.insert(p.coords.end(), b.coords.begin(), b.coords.end());
    p.disc = a.disc;
    p.disc.insert(p.disc.end(), b.disc.begin(), b.disc.end());
    sys.controls.push_back(std::move(p));
    out.control_factors.push_back({lc, rc});
    ctrl_ids[{lc, rc}] = id;
    return id;
  };
  auto intern_dist = [&](int ld, int rd) -> int {
    auto it = dist_ids.find({ld, rd});
    if (it != dist_ids.end()) return it->second;
    int id = static_cast<int>(sys.disturbances.size());
    InputPart p;
    const InputPart& a = L.disturbances[ld];
    const InputPart& b = R.disturbances[rd];
    p.label = a.label + (a.label.empty() || b.label.empty() ? "" : "|") + b.label;
    p.coords = a.coords;
    p.coords.insert(p.coords.end(), b.coords.begin(), b.coords.end());
    p.disc = a.disc;
    p.disc.insert(p.disc.end(), b.disc.begin(), b.disc.end());
    sys.disturbances.push_back(std::move(p));
    out.dist_factors.push_back({ld, rd});
    dist_ids[{ld, rd}] = id;
    return id;
  };

  /* the joint no-disturbance input must take flat id 0; other pairs are
   * interned lazily as transitions discover them (the order is determined
   * by the deterministic traversal) */
  intern_ctrl(0, 0);
  intern_dist(0, 0);

  sys.split_declared = L.split_declared || R.split_declared;

  auto intern_state = [&](int l, int r) -> int {
    auto it = out.state_ids.find({l, r});
    if (it != out.state_ids.end()) return it->second;
    int id = static_cast<int>(sys.states.size());
    StateInfo s;
    s.label = "(" + L.states[l].label + "," + R.states[r].label + ")";
    s.coords = L.states[l].coords;
    s.coords.insert(s.coords.end(), R.states[r].coords.begin(), R.states[r].coords.end());
    s.disc = L.states[l].disc;
    s.disc.insert(s.disc.end(), R.states[r].disc.begin(), R.states[r].disc.end());
    sys.states.push_back(std::move(s));
    out.state_factors.push_back({l, r});
    out.state_ids[{l, r}] = id;
    return id;
  };

  /* synchronized initial pairs */
  std::deque<int> work;
  std::vector<std::array<int, 2>> init_pairs;
  for (int l0 : L.initial)
    for (int r0 : R.initial) {
      bool ok = sync.kind == Synchronizer::Kind::Profile
                    ? dx_of(l0, r0) <= sync.profile->kappa + kDistTol
                    : state_pair_sync(l0, r0);
      if (ok) init_pairs.push_back({l0, r0});
    }
  for (auto& [l0, r0] : init_pairs) {
    int id = intern_state(l0, r0);
    sys.initial.push_back(id);
    work.push_back(id);
  }

  detail::PairingMaps pm; /* for Profile sync: pairing between L and R inputs */
  std::unique_ptr<FiniteSide> right_side;
  if (sync.kind == Synchronizer::Kind::Profile) {
    right_side = std::make_unique<FiniteSide>(right);
    pm = detail::PairingMaps::build(sync.profile->pu, L, *right_side);
  }

  /* grow the reachable composite; adjacency recorded by input-pair ids and
   * flattened only after every pair is interned */
  struct Arc {
    int state, cid, did;
    std::vector<int> succ;
  };
  std::vector<Arc> arcs;
  std::set<int> expanded;

  auto try_joint = [&](int id, int l, int r, int lu, int ru) {
    const auto& lsucc = L.succ(l, lu);
    if (lsucc.empty()) return;
    const auto& rsucc = R.succ(r, ru);
    if (rsucc.empty()) return;
    int lc = L.control_of(lu), ld = L.disturbance_of(lu);
    int rc = R.control_of(ru), rd = R.disturbance_of(ru);

    double succ_bound = kInf; /* Profile sync: contracted radius */
    switch (sync.kind) {
      case Synchronizer::Kind::FullProduct: break;
      case Synchronizer::Kind::ExplicitTuples: break; /* pre-filtered */
      case Synchronizer::Kind::ZeroControlWhen:
        if (r == sync.when_right_state && !detail::coords_all_zero(L.controls[lc].coords))
          return;
        break;
      case Synchronizer::Kind::Profile: {
        const RelationProfile& p = *sync.profile;
        double e = dx_of(l, r);
        if (e == kInf) return;
        const auto& hcs = pm.con_controls_of_hat[lc];
        if (std::find(hcs.begin(), hcs.end(), rc) == hcs.end()) return;
        if (pm.hat_dist_of_con[rd] != ld) return;
        double sd = p.sd.eval(L.disturbances[ld].coords, R.disturbances[rd].coords);
        succ_bound = p.kappa + p.beta * e + p.lambda * sd;
        break;
      }
    }

    std::vector<int> succ;
    for (int ly : lsucc)
      for (int ry : rsucc) {
        bool ok;
        if (sync.kind == Synchronizer::Kind::Profile)
          ok = dx_of(ly, ry) <= succ_bound + kDistTol;
        else
          ok = state_pair_sync(ly, ry);
        if (!ok) continue;
        succ.push_back(intern_state(ly, ry));
      }
    if (succ.empty()) return;
    for (int y : succ)
      if (!expanded.count(y)) work.push_back(y);
    arcs.push_back({id, intern_ctrl(lc, rc), intern_dist(ld, rd), std::move(succ)});
  };

  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    if (expanded.count(id)) continue;
    expanded.insert(id);
    auto [l, r] = out.state_factors[id];

    if (sync.kind == Synchronizer::Kind::ExplicitTuples) {
      auto it = h_inputs.find({l, r});
      if (it == h_inputs.end()) continue;
      for (auto& [lu, ru] : it->second) try_joint(id, l, r, lu, ru);
    } else {
      for (int lu = 0; lu < static_cast<int>(L.n_inputs()); ++lu)
        for (int ru = 0; ru < static_cast<int>(R.n_inputs()); ++ru) try_joint(id, l, r, lu, ru);
    }
  }

  sys.finalize();
  for (auto& a : arcs) {
    int u = a.cid * static_cast<int>(sys.disturbances.size()) + a.did;
    for (int y : a.succ) sys.add_transition(a.state, u, y);
  }
  return out;
}

inline ComposedSystem compose(const CostedSystem& left, const CostedSystem& right,
                              const Synchronizer& sync, CostModel I, CostModel O) {
  ComposedSystem c = compose(left, right, sync);
  c.cs.I = std::move(I);
  c.cs.O = std::move(O);
  return c;
}

/* lift a factor's rule-based cost onto the composite as a dense table */
inline CostModel lift_cost(const ComposedSystem& comp, const CostedSystem& left,
                           const CostedSystem& right, const CostModel& inner, bool from_left) {
  std::size_t ns = comp.cs.sys.n_states(), nu = comp.cs.sys.n_inputs();
  std::vector<double> v(ns * nu, 0.0);
  for (std::size_t x = 0; x < ns; ++x)
    for (std::size_t u = 0; u < nu; ++u) {
      int c = comp.cs.sys.control_of(static_cast<int>(u));
      int d = comp.cs.sys.disturbance_of(static_cast<int>(u));
      int fx = from_left ? comp.state_factors[x][0] : comp.state_factors[x][1];
      int fc = from_left ? comp.control_factors[c][0] : comp.control_factors[c][1];
      int fd = from_left ? comp.dist_factors[d][0] : comp.dist_factors[d][1];
      const FiniteSystem& f = from_left ? left.sys : right.sys;
      v[x * nu + u] = inner.eval(f, fx, f.input_id(fc, fd));
    }
  return CostModel::table(ns, nu, std::move(v));
}

/* plain composition with an autonomous reference system (full synchronizer) */
inline ComposedSystem attach_reference(const CostedSystem& s, const CostedSystem& ref) {
  if (ref.sys.n_inputs() != 1)
    throw std::invalid_argument("reference system must be autonomous (single input)");
  return compose(s, ref, Synchronizer::full_product());
}

/* ------------------------------------------------------------------ */
/* compositional construction of alternating relations                 */
/* ------------------------------------------------------------------ */

struct LiftResult {
  Synchronizer hat_sync;          /* synchronizer for the abstract composite */
  RelationProfile composite;      /* relation from hat1 x hat2 to s1 x s2 */
  bool assumption_validated = false;
  std::string assumption_report;
};

namespace detail {

inline void require_liftable(const RelationProfile& p, const char* which) {
  if (p.dx.kind != StateDistance::Kind::CoordBall || !p.dx.hat_idx.empty())
    throw std::invalid_argument(std::string(which) +
                                ": lifting needs full-block ball state distances");
  if (p.dx.norm != Norm::Inf)
    throw std::invalid_argument(std::string(which) +
                                ": lifting composes max-style distances (inf norm)");
  if (p.pu.kind != InputPairing::Kind::ControlEqualDistZero &&
      p.pu.kind != InputPairing::Kind::IdentityFlat)
    throw std::invalid_argument(std::string(which) + ": unsupported pairing for lifting");
}

}  // namespace detail

/*
 * Composite contractive alternating relation for synchronized products:
 * with component relations holding pairwise and the synchronizer
 * compatible with them, the product relation with the componentwise
 * maximum parameters relates the abstract composite to the concrete one.
 * The compatibility assumption (related states can always agree on
 * synchronized inputs) is validated structurally for rule synchronizers.
 */
inline LiftResult lift_interconnection(const Synchronizer& h, const RelationProfile& p1,
                                       const CostedSystem& hat1, const RelationProfile& p2,
                                       const CostedSystem& hat2) {
  (void)hat2;
  detail::require_liftable(p1, "left profile");
  detail::require_liftable(p2, "right profile");

  LiftResult out;
  out.composite.orientation = Orientation::Alternating;
  out.composite.kappa = std::max(p1.kappa, p2.kappa);
  out.composite.beta = std::max(p1.beta, p2.beta);
  out.composite.lambda = std::max(p1.lambda, p2.lambda);
  out.composite.dx = StateDistance::ball(Norm::Inf);
  out.composite.pu = InputPairing::control_equal();
  Norm sdn = p1.sd.kind == InputDistance::Kind::Zero ? p2.sd.norm : p1.sd.norm;
  out.composite.sd = InputDistance::disturbance_gap(sdn);

  std::ostringstream rep;
  switch (h.kind) {
    case Synchronizer::Kind::FullProduct: {
      out.hat_sync = Synchronizer::full_product();
      out.assumption_validated = true;
      rep << "full product: related pairs synchronize on any paired inputs";
      break;
    }
    case Synchronizer::Kind::ZeroControlWhen: {
      /* the rule reads the right state (identity-related) and the left
       * control (equal-paired); it lifts verbatim. The zero control must be
       * available on the abstract left side. */
      bool zero_ctrl = false;
      for (const auto& c : hat1.sys.controls)
        if (detail::coords_all_zero(c.coords)) zero_ctrl = true;
      if (!zero_ctrl)
        throw std::invalid_argument(
            "lift: the abstract left system has no zero control, the synchronizer cannot be "
            "honored");
      out.hat_sync = Synchronizer::zero_control_when(h.when_right_state);
      out.assumption_validated = true;
      rep << "zero-control rule reads identity-related components only; abstract zero control "
             "present";
      break;
    }
    default:
      throw std::invalid_argument(
          "structural lifting supports full-product and zero-control synchronizers; use the "
          "finite overload for explicit relations");
  }
  out.assumption_report = rep.str();
  return out;
}

/*
 * Fully mechanical lift for finite components: the abstract synchronizer
 * contains the abstract tuples whose components relate to some concrete
 * H tuple, and the compatibility assumption is checked exhaustively. The
 * check reports the first violating state quadruple if any.
 */
inline LiftResult lift_interconnection_finite(const Synchronizer& h, const RelationProfile& p1,
                                              const CostedSystem& hat1, const CostedSystem& con1,
                                              const RelationProfile& p2, const CostedSystem& hat2,
                                              const CostedSystem& con2) {
  if (h.kind != Synchronizer::Kind::ExplicitTuples)
    throw std::invalid_argument("finite lifting expects an explicit synchronizer");
  detail::require_liftable(p1, "left profile");
  detail::require_liftable(p2, "right profile");

  LiftResult out;
  out.composite.orientation = Orientation::Alternating;
  out.composite.kappa = std::max(p1.kappa, p2.kappa);
  out.composite.beta = std::max(p1.beta, p2.beta);
  out.composite.lambda = std::max(p1.lambda, p2.lambda);
  out.composite.dx = StateDistance::ball(Norm::Inf);
  out.composite.pu = InputPairing::control_equal();
  Norm sdn = p1.sd.kind == InputDistance::Kind::Zero ? p2.sd.norm : p1.sd.norm;
  out.composite.sd = InputDistance::disturbance_gap(sdn);

  FiniteSide side1(con1), side2(con2);
  auto pm1 = detail::PairingMaps::build(p1.pu, hat1.sys, side1);
  auto pm2 = detail::PairingMaps::build(p2.pu, hat2.sys, side2);

  auto related = [&](const RelationProfile& p, const CostedSystem& hat, const CostedSystem& con,
                     int hx, int cx) {
    return p.dx.eval(hat.sys.states[hx].coords, hat.sys.states[hx].disc,
                     con.sys.states[cx].coords, con.sys.states[cx].disc, hx, cx) < kInf;
  };
  auto input_paired = [&](const detail::PairingMaps& pm, const FiniteSystem& hat,
                          const FiniteSystem& con, int hu, int cu) {
    int hc = hat.control_of(hu), hd = hat.disturbance_of(hu);
    int cc = con.control_of(cu), cd = con.disturbance_of(cu);
    const auto& v = pm.con_controls_of_hat[hc];
    return std::find(v.begin(), v.end(), cc) != v.end() && pm.hat_dist_of_con[cd] == hd;
  };

  /* abstract synchronizer: tuples whose components are related to a
   * concrete H tuple */
  std::vector<std::array<int, 4>> hat_tuples;
  for (std::size_t h1 = 0; h1 < hat1.sys.n_states(); ++h1)
    for (std::size_t h2 = 0; h2 < hat2.sys.n_states(); ++h2)
      for (int hu1 = 0; hu1 < static_cast<int>(hat1.sys.n_inputs()); ++hu1)
        for (int hu2 = 0; hu2 < static_cast<int>(hat2.sys.n_inputs()); ++hu2) {
          bool exists = false;
          for (const auto& t : h.tuples) {
            if (!related(p1, hat1, con1, static_cast<int>(h1), t[0])) continue;
            if (!related(p2, hat2, con2, static_cast<int>(h2), t[1])) continue;
            if (!input_paired(pm1, hat1.sys, con1.sys, hu1, t[2])) continue;
            if (!input_paired(pm2, hat2.sys, con2.sys, hu2, t[3])) continue;
            exists = true;
            break;
          }
          if (exists)
            hat_tuples.push_back({static_cast<int>(h1), static_cast<int>(h2), hu1, hu2});
        }
  out.hat_sync = Synchronizer::explicit_tuples(std::move(hat_tuples));

  /* compatibility assumption, exhaustive */
  std::set<std::pair<int, int>> h_states;
  for (const auto& t : h.tuples) h_states.insert({t[0], t[1]});
  for (std::size_t h1 = 0; h1 < hat1.sys.n_states(); ++h1)
    for (std::size_t h2 = 0; h2 < hat2.sys.n_states(); ++h2)
      for (int c1 = 0; c1 < static_cast<int>(con1.sys.n_states()); ++c1)
        for (int c2 = 0; c2 < static_cast<int>(con2.sys.n_states()); ++c2) {
          if (!related(p1, hat1, con1, static_cast<int>(h1), c1)) continue;
          if (!related(p2, hat2, con2, static_cast<int>(h2), c2)) continue;
          if (!h_states.count({c1, c2})) continue;
          bool exists = false;
          for (const auto& t : h.tuples) {
            if (t[0] != c1 || t[1] != c2) continue;
            /* need paired abstract inputs for t[2], t[3] */
            bool p1ok = false, p2ok = false;
            for (int hu1 = 0; hu1 < static_cast<int>(hat1.sys.n_inputs()) && !p1ok; ++hu1)
              p1ok = input_paired(pm1, hat1.sys, con1.sys, hu1, t[2]);
            for (int hu2 = 0; hu2 < static_cast<int>(hat2.sys.n_inputs()) && !p2ok; ++hu2)
              p2ok = input_paired(pm2, hat2.sys, con2.sys, hu2, t[3]);
            if (p1ok && p2ok) {
              exists = true;
              break;
            }
          }
          if (!exists) {
            out.assumption_validated = false;
            std::ostringstream os;
            os << "compatibility violated at (" << hat1.sys.states[h1].label << ","
               << hat2.sys.states[h2].label << "," << con1.sys.states[c1].label << ","
               << con2.sys.states[c2].label << ")";
            out.assumption_report = os.str();
            throw std::invalid_argument(out.assumption_report);
          }
        }
  out.assumption_validated = true;
  out.assumption_report = "compatibility assumption checked exhaustively";
  return out;
}

}  // namespace iods

#endif  // IODS_COMPOSE_HH_
