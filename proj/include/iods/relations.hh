/*
 * relations.hh
 *
 * Parameterized simulation relations between a concrete system and a
 * finite abstraction, and the checkers for every relation family used in
 * the library: exact and approximate input-output simulations, contractive
 * simulations (plain and alternating), and exact alternating simulations
 * for controller attachment.
 *
 * A ball profile describes the relation family
 *     R(eps) = { (xhat, x, uhat, u) : d_X(xhat, x) <= eps  and  (uhat, u) in P_U }
 * for eps >= kappa. Two reductions keep the checks finite:
 *
 *  - tightest-eps: the clauses quantify over all eps >= kappa, but for ball
 *    profiles the successor obligation radius kappa + beta*eps + lambda*s_d
 *    grows with eps while the hypothesis d_X <= eps weakens, so checking a
 *    pair only at eps0 = max(kappa, d_X(xhat, x)) implies every larger eps;
 *  - sampling: clauses that range over continuous states or inputs are
 *    evaluated on a deterministic lattice (plus boundary points) supplied
 *    by the caller; such verdicts are reported with exhaustive = false.
 *
 * Ties on distance comparisons count as inside the ball (closed balls,
 * absolute tolerance kDistTol).
 */
#ifndef IODS_RELATIONS_HH_
#define IODS_RELATIONS_HH_

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/compare.hh"
#include "iods/geometry.hh"
#include "iods/grid.hh"
#include "iods/parallel.hh"
#include "iods/plant.hh"
#include "iods/system.hh"

namespace iods {

/* ------------------------------------------------------------------ */
/* relation building blocks                                            */
/* ------------------------------------------------------------------ */

enum class Orientation { Plain, Alternating };

/* state-pair distance; +inf means "never related" */
struct StateDistance {
  enum class Kind { CoordBall, Table, Zero };
  Kind kind = Kind::CoordBall;
  Norm norm = Norm::Inf;
  /* optional coordinate/disc selections; empty = use all entries */
  std::vector<int> hat_idx, con_idx;
  std::vector<int> hat_disc_idx, con_disc_idx;
  /* Table: values[hat * cols + con] */
  std::size_t rows = 0, cols = 0;
  std::vector<double> values;

  static StateDistance ball(Norm n) {
    StateDistance d;
    d.kind = Kind::CoordBall;
    d.norm = n;
    return d;
  }
  static StateDistance ball_blocks(Norm n, std::vector<int> hat_idx, std::vector<int> con_idx,
                                   std::vector<int> hat_disc, std::vector<int> con_disc) {
    StateDistance d;
    d.kind = Kind::CoordBall;
    d.norm = n;
    d.hat_idx = std::move(hat_idx);
    d.con_idx = std::move(con_idx);
    d.hat_disc_idx = std::move(hat_disc);
    d.con_disc_idx = std::move(con_disc);
    return d;
  }
  static StateDistance table(std::size_t rows, std::size_t cols, std::vector<double> v) {
    StateDistance d;
    d.kind = Kind::Table;
    d.rows = rows;
    d.cols = cols;
    d.values = std::move(v);
    return d;
  }
  static StateDistance zero() {
    StateDistance d;
    d.kind = Kind::Zero;
    return d;
  }

  double eval(const Vec& hat_coords, const std::vector<int>& hat_disc, const Vec& con_coords,
              const std::vector<int>& con_disc, int hat_id = -1, int con_id = -1) const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::Table: {
        if (hat_id < 0 || con_id < 0) throw std::logic_error("table distance needs interned ids");
        return values[static_cast<std::size_t>(hat_id) * cols + static_cast<std::size_t>(con_id)];
      }
      case Kind::CoordBall: {
        /* with all four selections empty both sides compare in full; any
         * nonempty selection switches every list to explicit mode, where
         * an empty list selects nothing */
        const bool full = hat_idx.empty() && con_idx.empty() && hat_disc_idx.empty() &&
                          con_disc_idx.empty();
        if (full) {
          if (hat_disc != con_disc) return kInf;
          if (hat_coords.size() != con_coords.size()) return kInf;
          if (norm == Norm::Inf) {
            double m = 0;
            for (std::size_t i = 0; i < hat_coords.size(); ++i)
              m = std::max(m, std::abs(hat_coords[i] - con_coords[i]));
            return m;
          }
          double s = 0;
          for (std::size_t i = 0; i < hat_coords.size(); ++i) {
            double d = hat_coords[i] - con_coords[i];
            s += d * d;
          }
          return std::sqrt(s);
        }
        if (hat_disc_idx.size() != con_disc_idx.size()) return kInf;
        for (std::size_t i = 0; i < hat_disc_idx.size(); ++i)
          if (hat_disc[static_cast<std::size_t>(hat_disc_idx[i])] !=
              con_disc[static_cast<std::size_t>(con_disc_idx[i])])
            return kInf;
        if (hat_idx.size() != con_idx.size()) return kInf;
        if (norm == Norm::Inf) {
          double m = 0;
          for (std::size_t i = 0; i < hat_idx.size(); ++i)
            m = std::max(m, std::abs(hat_coords[static_cast<std::size_t>(hat_idx[i])] -
                                     con_coords[static_cast<std::size_t>(con_idx[i])]));
          return m;
        }
        double s = 0;
        for (std::size_t i = 0; i < hat_idx.size(); ++i) {
          double d = hat_coords[static_cast<std::size_t>(hat_idx[i])] -
                     con_coords[static_cast<std::size_t>(con_idx[i])];
          s += d * d;
        }
        return std::sqrt(s);
      }
    }
    return kInf;
  }
};

/* input pairing rule P_U */
struct InputPairing {
  enum class Kind {
    /* abstract (uc, 0) pairs with concrete (uc', d) iff the control parts
     * match (equal coords and disc, or equal labels for purely symbolic
     * controls); the abstract disturbance is the unique one whose disc
     * matches the concrete disturbance's disc */
    ControlEqualDistZero,
    /* every concrete input pairs with the abstract no-disturbance input */
    AllWithBot,
    /* same flat input index on both sides */
    IdentityFlat,
    /* explicit list of (hat flat id, con flat id) */
    ExplicitPairs
  };
  Kind kind = Kind::ControlEqualDistZero;
  std::vector<std::pair<int, int>> pairs;

  /* for abstract sides that embed a copy of another system's inputs
   * (composed controllers): match only the trailing blocks */
  bool hat_blocks = false;
  int hat_ctrl_coord_first = 0;
  int hat_ctrl_disc_first = 0;
  int hat_dist_disc_first = 0;

  static InputPairing control_equal() {
    InputPairing p;
    p.kind = Kind::ControlEqualDistZero;
    return p;
  }
  static InputPairing all_with_bot() {
    InputPairing p;
    p.kind = Kind::AllWithBot;
    return p;
  }
  static InputPairing identity() {
    InputPairing p;
    p.kind = Kind::IdentityFlat;
    return p;
  }
  static InputPairing explicit_pairs(std::vector<std::pair<int, int>> pr) {
    InputPairing p;
    p.kind = Kind::ExplicitPairs;
    p.pairs = std::move(pr);
    return p;
  }

  bool match_control(const std::string& hat_label, const Vec& hat_coords,
                     const std::vector<int>& hat_disc, const std::string& con_label,
                     const Vec& con_coords, const std::vector<int>& con_disc) const {
    Vec hc = hat_blocks ? Vec(hat_coords.begin() + hat_ctrl_coord_first, hat_coords.end())
                        : hat_coords;
    std::vector<int> hd = hat_blocks ? std::vector<int>(hat_disc.begin() + hat_ctrl_disc_first,
                                                        hat_disc.end())
                                     : hat_disc;
    if (hd != con_disc) return false;
    if (hc.size() != con_coords.size()) return false;
    for (std::size_t i = 0; i < hc.size(); ++i)
      if (std::abs(hc[i] - con_coords[i]) > 1e-9) return false;
    if (hc.empty() && hd.empty() && !hat_blocks) return hat_label == con_label;
    return true;
  }

  bool match_dist(const std::vector<int>& hat_disc, const std::vector<int>& con_disc) const {
    if (!hat_blocks) return hat_disc == con_disc;
    return std::vector<int>(hat_disc.begin() + hat_dist_disc_first, hat_disc.end()) == con_disc;
  }
};

/* input mismatch distance s_d */
struct InputDistance {
  enum class Kind {
    Zero,
    /* norm of (concrete disturbance coords - abstract disturbance coords),
     * with the shorter vector zero-padded */
    DisturbanceGap,
    /* norm of the difference of two blocks of the concrete disturbance
     * coords; used for relations whose abstract side embeds a copy of the
     * concrete input */
    ConBlockDifference
  };
  Kind kind = Kind::DisturbanceGap;
  Norm norm = Norm::Inf;
  int a_first = 0, b_first = 0, count = 0;
  int hat_first = 0; /* skip an embedded prefix of the abstract coords */

  static InputDistance zero() {
    InputDistance d;
    d.kind = Kind::Zero;
    return d;
  }
  static InputDistance disturbance_gap(Norm n) {
    InputDistance d;
    d.kind = Kind::DisturbanceGap;
    d.norm = n;
    return d;
  }
  static InputDistance con_block_difference(Norm n, int a_first, int b_first, int count) {
    InputDistance d;
    d.kind = Kind::ConBlockDifference;
    d.norm = n;
    d.a_first = a_first;
    d.b_first = b_first;
    d.count = count;
    return d;
  }

  double eval(const Vec& hat_dcoords, const Vec& con_dcoords) const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::DisturbanceGap: {
        std::size_t hn = hat_dcoords.size() > static_cast<std::size_t>(hat_first)
                             ? hat_dcoords.size() - hat_first
                             : 0;
        std::size_t n = std::max(hn, con_dcoords.size());
        if (norm == Norm::Inf) {
          double m = 0;
          for (std::size_t i = 0; i < n; ++i) {
            double a = i < hn ? hat_dcoords[hat_first + i] : 0.0;
            double b = i < con_dcoords.size() ? con_dcoords[i] : 0.0;
            m = std::max(m, std::abs(a - b));
          }
          return m;
        }
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
          double a = i < hn ? hat_dcoords[hat_first + i] : 0.0;
          double b = i < con_dcoords.size() ? con_dcoords[i] : 0.0;
          s += (a - b) * (a - b);
        }
        return std::sqrt(s);
      }
      case Kind::ConBlockDifference: {
        if (norm == Norm::Inf) {
          double m = 0;
          for (int i = 0; i < count; ++i)
            m = std::max(m, std::abs(con_dcoords[a_first + i] - con_dcoords[b_first + i]));
          return m;
        }
        double s = 0;
        for (int i = 0; i < count; ++i) {
          double d = con_dcoords[a_first + i] - con_dcoords[b_first + i];
          s += d * d;
        }
        return std::sqrt(s);
      }
    }
    return 0.0;
  }
};

struct RelationProfile {
  Orientation orientation = Orientation::Alternating;
  StateDistance dx;
  InputPairing pu;
  InputDistance sd;
  double kappa = 0;
  double beta = 0;
  double lambda = 0;
};

struct CostGains {
  KFunction gamma_I = KFunction::zero();
  KFunction gamma_O = KFunction::zero();
};

/* explicit finite relation; tuples always in (abstract, concrete) order */
struct ExplicitRelation {
  /* (hat_x, con_x, hat_u, con_u) */
  std::vector<std::array<int, 4>> tuples;

  std::set<std::pair<int, int>> state_pairs() const {
    std::set<std::pair<int, int>> s;
    for (const auto& t : tuples) s.insert({t[0], t[1]});
    return s;
  }
  bool has_tuple(int hx, int cx, int hu, int cu) const {
    for (const auto& t : tuples)
      if (t[0] == hx && t[1] == cx && t[2] == hu && t[3] == cu) return true;
    return false;
  }
};

/* ------------------------------------------------------------------ */
/* concrete-side views                                                 */
/* ------------------------------------------------------------------ */

struct SideInputPart {
  std::string label;
  Vec coords;
  std::vector<int> disc;
};

/*
 * Finite presentation of the concrete side of a relation check: either an
 * exhaustive view of a finite system or a sampled view of a hybrid plant.
 */
class SystemSide {
 public:
  struct Succ {
    Vec coords;
    std::vector<int> disc;
    int id = -1; /* valid for finite sides */
  };

  virtual ~SystemSide() = default;
  virtual bool exhaustive() const = 0;

  virtual std::size_t n_states() const = 0;
  virtual const Vec& coords(std::size_t x) const = 0;
  virtual const std::vector<int>& disc(std::size_t x) const = 0;
  virtual std::string label(std::size_t x) const = 0;
  virtual const std::vector<std::size_t>& initial_list() const = 0;

  /* smallest achievable distance from an abstract state to the concrete
   * initial set (exact, independent of the state sampling) */
  virtual double initial_distance(const Vec& hat_coords, const std::vector<int>& hat_disc,
                                  const StateDistance& dx) const = 0;

  virtual std::size_t n_controls() const = 0;
  virtual const SideInputPart& control(std::size_t c) const = 0;
  virtual std::size_t n_dists() const = 0;
  virtual const SideInputPart& dist(std::size_t d) const = 0;

  virtual bool enabled(std::size_t x, std::size_t c, std::size_t d) const = 0;
  virtual bool control_enabled(std::size_t x, std::size_t c) const = 0;

  virtual void successors(std::size_t x, std::size_t c, std::size_t d,
                          std::vector<Succ>& out) const = 0;

  virtual double cost_I(std::size_t x, std::size_t c, std::size_t d) const = 0;
  virtual double cost_O(std::size_t x, std::size_t c, std::size_t d) const = 0;
};

class FiniteSide final : public SystemSide {
 public:
  explicit FiniteSide(const CostedSystem& cs) : cs_(cs) {
    for (int x : cs.sys.initial) initial_.push_back(static_cast<std::size_t>(x));
    for (const auto& c : cs.sys.controls) controls_.push_back({c.label, c.coords, c.disc});
    for (const auto& d : cs.sys.disturbances) dists_.push_back({d.label, d.coords, d.disc});
  }

  bool exhaustive() const override { return true; }
  std::size_t n_states() const override { return cs_.sys.n_states(); }
  const Vec& coords(std::size_t x) const override { return cs_.sys.states[x].coords; }
  const std::vector<int>& disc(std::size_t x) const override { return cs_.sys.states[x].disc; }
  std::string label(std::size_t x) const override { return cs_.sys.states[x].label; }
  const std::vector<std::size_t>& initial_list() const override { return initial_; }

  double initial_distance(const Vec& hc, const std::vector<int>& hd,
                          const StateDistance& dx) const override {
    double best = kInf;
    for (std::size_t x : initial_)
      best = std::min(best, dx.eval(hc, hd, coords(x), disc(x), -1, static_cast<int>(x)));
    return best;
  }

  std::size_t n_controls() const override { return controls_.size(); }
  const SideInputPart& control(std::size_t c) const override { return controls_[c]; }
  std::size_t n_dists() const override { return dists_.size(); }
  const SideInputPart& dist(std::size_t d) const override { return dists_[d]; }

  bool enabled(std::size_t x, std::size_t c, std::size_t d) const override {
    return !cs_.sys.succ(static_cast<int>(x), cs_.sys.input_id(static_cast<int>(c), static_cast<int>(d))).empty();
  }
  bool control_enabled(std::size_t x, std::size_t c) const override {
    return cs_.sys.control_enabled(static_cast<int>(x), static_cast<int>(c));
  }

  void successors(std::size_t x, std::size_t c, std::size_t d,
                  std::vector<Succ>& out) const override {
    out.clear();
    int u = cs_.sys.input_id(static_cast<int>(c), static_cast<int>(d));
    for (int y : cs_.sys.succ(static_cast<int>(x), u))
      out.push_back({cs_.sys.states[y].coords, cs_.sys.states[y].disc, y});
  }

  double cost_I(std::size_t x, std::size_t c, std::size_t d) const override {
    return cs_.cost_I(static_cast<int>(x), cs_.sys.input_id(static_cast<int>(c), static_cast<int>(d)));
  }
  double cost_O(std::size_t x, std::size_t c, std::size_t d) const override {
    return cs_.cost_O(static_cast<int>(x), cs_.sys.input_id(static_cast<int>(c), static_cast<int>(d)));
  }

  const CostedSystem& system() const { return cs_; }

 private:
  const CostedSystem& cs_;
  std::vector<std::size_t> initial_;
  std::vector<SideInputPart> controls_, dists_;
};

/* deterministic sample lattice and input samples for continuous clauses */
struct SamplingSpec {
  Box state_box;                      /* lattice over the plant block */
  Vec resolution;                     /* per axis */
  std::vector<Vec> extra_plant_points;
  std::vector<Vec> control_offsets;   /* one entry (possibly empty vec) per sampled control offset */
  std::vector<Vec> disturbance_samples; /* plant disturbance values; include the zero vector */
};

class SampledHybridSide final : public SystemSide {
 public:
  SampledHybridSide(const HybridPlant& hp, SamplingSpec spec) : hp_(hp), spec_(std::move(spec)) {
    build_lattice();
    build_factor_combos();
    build_states();
    build_inputs();
    build_initials();
  }

  bool exhaustive() const override { return false; }
  std::size_t n_states() const override { return st_coords_.size(); }
  const Vec& coords(std::size_t x) const override { return st_coords_[x]; }
  const std::vector<int>& disc(std::size_t x) const override { return st_disc_[x]; }
  std::string label(std::size_t x) const override {
    std::ostringstream os;
    os.precision(12);
    os << "s(";
    const Vec& c = st_coords_[x];
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << ")";
    for (int d : st_disc_[x]) os << "#" << d;
    return os.str();
  }
  const std::vector<std::size_t>& initial_list() const override { return initial_; }

  double initial_distance(const Vec& hc_full, const std::vector<int>& hd_full,
                          const StateDistance& dx) const override {
    if (dx.kind != StateDistance::Kind::CoordBall)
      throw std::logic_error("sampled initial distance needs a ball distance");
    /* the concrete selection must keep the concrete layout */
    for (std::size_t i = 0; i < dx.con_idx.size(); ++i)
      if (dx.con_idx[i] != static_cast<int>(i))
        throw std::logic_error("sampled initial distance needs an in-order concrete selection");
    for (std::size_t i = 0; i < dx.con_disc_idx.size(); ++i)
      if (dx.con_disc_idx[i] != static_cast<int>(i))
        throw std::logic_error("sampled initial distance needs an in-order concrete selection");
    /* apply the abstract-side block selection, then compare against the
     * concrete layout (plant block first, factor blocks after) */
    const bool full = dx.hat_idx.empty() && dx.con_idx.empty() && dx.hat_disc_idx.empty() &&
                      dx.con_disc_idx.empty();
    Vec hc;
    std::vector<int> hd;
    if (full) {
      hc = hc_full;
      hd = hd_full;
    } else {
      for (int i : dx.hat_idx) hc.push_back(hc_full[static_cast<std::size_t>(i)]);
      for (int i : dx.hat_disc_idx) hd.push_back(hd_full[static_cast<std::size_t>(i)]);
    }
    double best = kInf;
    std::size_t n = hp_.plant.dim();
    Vec hat_plant(hc.begin(), hc.begin() + n);
    for (const auto& combo : factor_combos_) {
      if (!combo_initial_[&combo - factor_combos_.data()]) continue;
      /* disc must match the combo's disc; then factor coord blocks agree */
      if (hd != combo_disc_[&combo - factor_combos_.data()]) continue;
      double d;
      if (hp_.plant.initial_box)
        d = dist_to_box(hat_plant, *hp_.plant.initial_box, dx.norm);
      else {
        d = kInf;
        for (const auto& p : hp_.plant.initial_points)
          d = std::min(d, distance(hat_plant, p, dx.norm));
      }
      best = std::min(best, d);
    }
    return best;
  }

  std::size_t n_controls() const override { return ctrl_.size(); }
  const SideInputPart& control(std::size_t c) const override { return ctrl_[c]; }
  std::size_t n_dists() const override { return dist_.size(); }
  const SideInputPart& dist(std::size_t d) const override { return dist_[d]; }

  bool enabled(std::size_t x, std::size_t c, std::size_t d) const override {
    (void)d;
    return control_enabled(x, c);
  }
  bool control_enabled(std::size_t x, std::size_t c) const override {
    if (hp_.zero_control_factor < 0) return true;
    if (st_factors_[x][static_cast<std::size_t>(hp_.zero_control_factor)] !=
        hp_.zero_control_state)
      return true;
    return detail_coords_all_zero(ctrl_uc_[c]);
  }

  /* allocation-light successor: the plant map is deterministic and the
   * factor steps are table lookups, so the single successor is written
   * into the reused buffer entry */
  void successors(std::size_t x, std::size_t c, std::size_t d,
                  std::vector<Succ>& out) const override {
    if (out.empty()) out.emplace_back();
    out.resize(1);
    Succ& s = out[0];
    s.id = -1;
    std::size_t n = hp_.plant.dim();
    const Vec& full = st_coords_[x];
    const PlantMode& m = hp_.plant.modes[ctrl_mode_[c]];
    const Vec& uc = ctrl_uc_[c];
    const Vec& w = dist_w_[d];
    s.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = m.B[i];
      for (std::size_t j = 0; j < n; ++j) v += m.A[i][j] * full[j];
      if (!uc.empty()) v += uc[i];
      if (!w.empty()) v += w[i];
      s.coords[i] = v;
    }
    s.disc.clear();
    for (std::size_t f = 0; f < hp_.factors.size(); ++f) {
      const FiniteSystem& fs = hp_.factors[f];
      const auto& succ = fs.succ(st_factors_[x][f], dist_factor_inputs_[d][f]);
      int fy = succ[0];
      const StateInfo& st = fs.states[fy];
      s.coords.insert(s.coords.end(), st.coords.begin(), st.coords.end());
      s.disc.insert(s.disc.end(), st.disc.begin(), st.disc.end());
    }
  }

  double cost_I(std::size_t x, std::size_t c, std::size_t d) const override {
    return hp_.I.eval_point(st_coords_[x], st_disc_[x], dist_[d].coords);
  }
  double cost_O(std::size_t x, std::size_t c, std::size_t d) const override {
    return hp_.O.eval_point(st_coords_[x], st_disc_[x], dist_[d].coords);
  }

 private:
  static bool detail_coords_all_zero(const Vec& v) {
    for (double x : v)
      if (std::abs(x) > 1e-12) return false;
    return true;
  }

  void build_lattice() {
    std::size_t n = hp_.plant.dim();
    std::vector<Vec> axes(n);
    for (std::size_t i = 0; i < n; ++i) {
      double lo = spec_.state_box.lb[i], hi = spec_.state_box.ub[i], r = spec_.resolution[i];
      for (double v = lo; v < hi + 1e-12; v += r) axes[i].push_back(v);
      if (std::abs(axes[i].back() - hi) > 1e-9) axes[i].push_back(hi);
    }
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      Vec p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = axes[i][idx[i]];
      lattice_.push_back(p);
      std::size_t i = n;
      bool done = true;
      while (i-- > 0) {
        if (++idx[i] < axes[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
        if (i == 0) break;
      }
      if (done) break;
    }
    for (const auto& p : spec_.extra_plant_points) lattice_.push_back(p);
  }

  void build_factor_combos() {
    factor_combos_.push_back({});
    for (const auto& f : hp_.factors) {
      std::vector<std::vector<int>> next;
      for (const auto& c : factor_combos_)
        for (std::size_t s = 0; s < f.n_states(); ++s) {
          auto cc = c;
          cc.push_back(static_cast<int>(s));
          next.push_back(cc);
        }
      factor_combos_ = std::move(next);
    }
    for (const auto& c : factor_combos_) {
      std::vector<int> disc;
      bool init = true;
      for (std::size_t f = 0; f < hp_.factors.size(); ++f) {
        const auto& st = hp_.factors[f].states[c[f]];
        disc.insert(disc.end(), st.disc.begin(), st.disc.end());
        if (!std::binary_search(hp_.factors[f].initial.begin(), hp_.factors[f].initial.end(), c[f]))
          init = false;
      }
      combo_disc_.push_back(disc);
      combo_initial_.push_back(init);
    }
  }

  void build_states() {
    for (const auto& p : lattice_)
      for (std::size_t ci = 0; ci < factor_combos_.size(); ++ci) {
        HybridPlant::State s{p, factor_combos_[ci]};
        st_coords_.push_back(hp_.state_coords(s));
        st_disc_.push_back(combo_disc_[ci]);
        st_factors_.push_back(factor_combos_[ci]);
        st_combo_.push_back(ci);
      }
  }

  void build_inputs() {
    /* controls: (mode, offset) product */
    std::vector<Vec> offs = spec_.control_offsets;
    if (offs.empty()) offs.push_back({});
    for (std::size_t m = 0; m < hp_.plant.modes.size(); ++m)
      for (const auto& o : offs) {
        SideInputPart p;
        p.label = hp_.plant.modes[m].label;
        p.coords = o;
        p.disc = {static_cast<int>(m)};
        ctrl_.push_back(p);
        ctrl_mode_.push_back(m);
        ctrl_uc_.push_back(o);
      }
    /* disturbances: w samples x factor flat inputs */
    std::vector<std::vector<int>> fcombos;
    fcombos.push_back({});
    for (const auto& f : hp_.factors) {
      std::vector<std::vector<int>> next;
      for (const auto& c : fcombos)
        for (std::size_t u = 0; u < f.n_inputs(); ++u) {
          auto cc = c;
          cc.push_back(static_cast<int>(u));
          next.push_back(cc);
        }
      fcombos = std::move(next);
    }
    std::vector<Vec> ws = spec_.disturbance_samples;
    if (ws.empty()) ws.push_back(Vec(hp_.plant.dim(), 0.0));
    for (const auto& w : ws)
      for (const auto& fc : fcombos) {
        SideInputPart p;
        p.coords = w;
        for (std::size_t f = 0; f < hp_.factors.size(); ++f) {
          const auto& part = hp_.factors[f].disturbances[hp_.factors[f].disturbance_of(fc[f])];
          p.coords.insert(p.coords.end(), part.coords.begin(), part.coords.end());
          p.disc.insert(p.disc.end(), part.disc.begin(), part.disc.end());
          p.label += (p.label.empty() ? "" : "|") + part.label;
        }
        dist_.push_back(p);
        dist_w_.push_back(w);
        dist_factor_inputs_.push_back(fc);
      }
  }

  void build_initials() {
    for (std::size_t x = 0; x < st_coords_.size(); ++x) {
      if (!combo_initial_[st_combo_[x]]) continue;
      Vec pb(st_coords_[x].begin(), st_coords_[x].begin() + hp_.plant.dim());
      bool in = false;
      if (hp_.plant.initial_box)
        in = hp_.plant.initial_box->contains(pb, 1e-9);
      else
        for (const auto& p : hp_.plant.initial_points)
          if (approx_equal(p, pb, 1e-9)) in = true;
      if (in) initial_.push_back(x);
    }
  }

  const HybridPlant& hp_;
  SamplingSpec spec_;
  std::vector<Vec> lattice_;
  std::vector<std::vector<int>> factor_combos_;
  std::vector<std::vector<int>> combo_disc_;
  std::vector<char> combo_initial_;
  std::vector<Vec> st_coords_;
  std::vector<std::vector<int>> st_disc_;
  std::vector<std::vector<int>> st_factors_;
  std::vector<std::size_t> st_combo_;
  std::vector<std::size_t> initial_;
  std::vector<SideInputPart> ctrl_, dist_;
  std::vector<std::size_t> ctrl_mode_;
  std::vector<Vec> ctrl_uc_;
  std::vector<Vec> dist_w_;
  std::vector<std::vector<int>> dist_factor_inputs_;
};

}  // namespace iods

#endif  // IODS_RELATIONS_HH_
