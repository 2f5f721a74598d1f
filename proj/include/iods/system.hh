/*
 * system.hh
 *
 * Finite nondeterministic transition systems with input/output cost
 * functions, behaviors, and the basic queries on them (reachability,
 * non-blocking, stepping).
 *
 * Conventions used throughout the library:
 *  - states and inputs are interned to dense integer ids; every set-valued
 *    result is emitted in id order so repeated runs are byte-identical;
 *  - every system carries a control part and a disturbance part; systems
 *    without a declared split get a trivial singleton on the control side;
 *  - the flat input id is c * n_disturbances + d, and id 0 is reserved for
 *    the distinguished no-disturbance input (control 0, disturbance 0);
 *  - states carry an optional real embedding (`coords`) and an optional
 *    discrete signature (`disc`); distances between states compare coords
 *    under a norm and require equal disc.
 */
#ifndef IODS_SYSTEM_HH_
#define IODS_SYSTEM_HH_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/geometry.hh"

namespace iods {

struct StateInfo {
  std::string label;
  Vec coords;             /* real embedding, may be empty */
  std::vector<int> disc;  /* discrete signature, may be empty */
};

struct InputPart {
  std::string label;
  Vec coords;             /* real value of this input component, may be empty */
  std::vector<int> disc;  /* discrete signature (mode index, symbol id, ...) */
};

class FiniteSystem {
 public:
  std::vector<StateInfo> states;
  std::vector<int> initial;              /* sorted state ids */
  std::vector<InputPart> controls;       /* control components, >= 1 */
  std::vector<InputPart> disturbances;   /* disturbance components, >= 1; [0] = no disturbance */
  bool split_declared = false;           /* true if the modeler declared U = Uc x Ud */

  std::size_t n_states() const { return states.size(); }
  std::size_t n_controls() const { return controls.size(); }
  std::size_t n_disturbances() const { return disturbances.size(); }
  std::size_t n_inputs() const { return controls.size() * disturbances.size(); }

  int input_id(int c, int d) const { return c * static_cast<int>(disturbances.size()) + d; }
  int control_of(int u) const { return u / static_cast<int>(disturbances.size()); }
  int disturbance_of(int u) const { return u % static_cast<int>(disturbances.size()); }

  std::string input_label(int u) const {
    const std::string& c = controls[control_of(u)].label;
    const std::string& d = disturbances[disturbance_of(u)].label;
    if (c.empty()) return d;
    if (d.empty()) return c;
    return c + "|" + d;
  }

  /* flat input coords = control coords ++ disturbance coords */
  Vec input_coords(int u) const {
    Vec v = controls[control_of(u)].coords;
    const Vec& d = disturbances[disturbance_of(u)].coords;
    v.insert(v.end(), d.begin(), d.end());
    return v;
  }

  const std::vector<int>& succ(int x, int u) const { return adj_[idx(x, u)]; }

  void set_succ(int x, int u, std::vector<int> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int y : s)
      if (y < 0 || y >= static_cast<int>(n_states()))
        throw std::invalid_argument("set_succ: successor out of range");
    adj_[idx(x, u)] = std::move(s);
  }

  void add_transition(int x, int u, int y) {
    if (y < 0 || y >= static_cast<int>(n_states()))
      throw std::invalid_argument("add_transition: successor out of range");
    auto& v = adj_[idx(x, u)];
    auto it = std::lower_bound(v.begin(), v.end(), y);
    if (it == v.end() || *it != y) v.insert(it, y);
  }

  /* inputs with a nonempty successor set at x */
  std::vector<int> enabled_inputs(int x) const {
    std::vector<int> r;
    for (int u = 0; u < static_cast<int>(n_inputs()); ++u)
      if (!succ(x, u).empty()) r.push_back(u);
    return r;
  }

  /* Uc(x): controls whose successor set is nonempty for every disturbance */
  bool control_enabled(int x, int c) const {
    for (int d = 0; d < static_cast<int>(n_disturbances()); ++d)
      if (succ(x, input_id(c, d)).empty()) return false;
    return true;
  }

  std::vector<int> enabled_controls(int x) const {
    std::vector<int> r;
    for (int c = 0; c < static_cast<int>(n_controls()); ++c)
      if (control_enabled(x, c)) r.push_back(c);
    return r;
  }

  void finalize() {
    adj_.assign(n_states() * n_inputs(), {});
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
  }

  int state_id(const std::string& label) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].label == label) return static_cast<int>(i);
    return -1;
  }

 private:
  std::size_t idx(int x, int u) const {
    return static_cast<std::size_t>(x) * n_inputs() + static_cast<std::size_t>(u);
  }
  std::vector<std::vector<int>> adj_;
};

/* convenience builder for hand-written systems and JSON loading */
class SystemBuilder {
 public:
  SystemBuilder& state(std::string label, Vec coords = {}, std::vector<int> disc = {}) {
    sys_.states.push_back({std::move(label), std::move(coords), std::move(disc)});
    return *this;
  }
  SystemBuilder& mark_initial(const std::string& label) { initial_.push_back(label); return *this; }
  SystemBuilder& control(std::string label, Vec coords = {}, std::vector<int> disc = {}) {
    sys_.controls.push_back({std::move(label), std::move(coords), std::move(disc)});
    return *this;
  }
  SystemBuilder& disturbance(std::string label, Vec coords = {}, std::vector<int> disc = {}) {
    sys_.disturbances.push_back({std::move(label), std::move(coords), std::move(disc)});
    return *this;
  }
  /* unsplit systems: inputs are plain disturbances with a trivial control */
  SystemBuilder& input(std::string label, Vec coords = {}) { return disturbance(std::move(label), std::move(coords)); }

  SystemBuilder& arc(const std::string& x, const std::string& u, const std::string& y) {
    arcs_.push_back({x, u, y});
    return *this;
  }

  FiniteSystem build() {
    if (sys_.controls.empty()) sys_.controls.push_back({"", {}, {}});
    if (sys_.disturbances.empty()) sys_.disturbances.push_back({"", {}, {}});
    sys_.split_declared = sys_.controls.size() > 1 && sys_.disturbances.size() > 1;
    for (auto& l : initial_) {
      int id = sys_.state_id(l);
      if (id < 0) throw std::invalid_argument("unknown initial state " + l);
      sys_.initial.push_back(id);
    }
    sys_.finalize();
    for (auto& a : arcs_) {
      int x = sys_.state_id(a.x);
      int y = sys_.state_id(a.y);
      int u = input_by_label(a.u);
      if (x < 0 || y < 0) throw std::invalid_argument("unknown state in arc");
      if (u < 0) throw std::invalid_argument("unknown input " + a.u);
      sys_.add_transition(x, u, y);
    }
    return std::move(sys_);
  }

 private:
  int input_by_label(const std::string& l) const {
    for (int u = 0; u < static_cast<int>(sys_.n_inputs()); ++u)
      if (sys_.input_label(u) == l) return u;
    return -1;
  }
  struct Arc { std::string x, u, y; };
  FiniteSystem sys_;
  std::vector<std::string> initial_;
  std::vector<Arc> arcs_;
};

/* ------------------------------------------------------------------ */
/* cost functions                                                      */
/* ------------------------------------------------------------------ */

/*
 * Cost functions on (state, input) pairs are small expression trees so
 * they can be evaluated on interned finite systems as well as on raw
 * (coords, disc) points produced by continuous-state executions, and so
 * they can be serialized.
 */
class CostModel {
 public:
  enum class Kind {
    Zero,
    Table,          /* dense per (state, flat input); finite systems only */
    DistToBox,      /* distance of a state coord block to a box */
    BlockDistance,  /* max(norm(block_a - block_b) - offset, 0) on state coords */
    DiscIndicator,  /* value table indexed by one state disc entry */
    DisturbanceNorm,/* norm of a block of the input's disturbance coords */
    Sum,
    Scale
  };

  static CostModel zero() { return CostModel(Kind::Zero); }

  static CostModel table(std::size_t n_states, std::size_t n_inputs, std::vector<double> v) {
    CostModel m(Kind::Table);
    m.rows_ = n_states; m.cols_ = n_inputs; m.values_ = std::move(v);
    if (m.values_.size() != n_states * n_inputs)
      throw std::invalid_argument("cost table size mismatch");
    return m;
  }

  static CostModel dist_to_box(Box b, Norm n, int first = 0, int count = -1) {
    CostModel m(Kind::DistToBox);
    m.box_ = std::move(b); m.norm_ = n; m.first_ = first; m.count_ = count;
    return m;
  }

  static CostModel block_distance(int first_a, int first_b, int count, Norm n, double offset = 0) {
    CostModel m(Kind::BlockDistance);
    m.first_ = first_a; m.second_ = first_b; m.count_ = count; m.norm_ = n; m.offset_ = offset;
    return m;
  }

  static CostModel disc_indicator(int disc_index, std::vector<double> value_by_disc) {
    CostModel m(Kind::DiscIndicator);
    m.first_ = disc_index; m.values_ = std::move(value_by_disc);
    return m;
  }

  static CostModel disturbance_norm(Norm n, int first = 0, int count = -1) {
    CostModel m(Kind::DisturbanceNorm);
    m.norm_ = n; m.first_ = first; m.count_ = count;
    return m;
  }

  static CostModel sum(CostModel a, CostModel b) {
    CostModel m(Kind::Sum);
    m.children_.push_back(std::move(a));
    m.children_.push_back(std::move(b));
    return m;
  }

  static CostModel scale(double k, CostModel a) {
    CostModel m(Kind::Scale);
    m.offset_ = k;
    m.children_.push_back(std::move(a));
    return m;
  }

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

  /* generic evaluation on raw points; `x`/`u` ids are needed for tables */
  double eval_point(const Vec& scoords, const std::vector<int>& sdisc, const Vec& dist_coords,
                    int state_id = -1, int input_id = -1) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Table: {
        if (state_id < 0 || input_id < 0)
          throw std::logic_error("table cost needs interned ids");
        return values_[static_cast<std::size_t>(state_id) * cols_ + input_id];
      }
      case Kind::DistToBox: {
        Vec blk = block(scoords, first_, count_);
        return ::iods::dist_to_box(blk, box_, norm_);
      }
      case Kind::BlockDistance: {
        Vec a = block(scoords, first_, count_);
        Vec b = block(scoords, second_, count_);
        return std::max(distance(a, b, norm_) - offset_, 0.0);
      }
      case Kind::DiscIndicator: {
        int k = sdisc.at(static_cast<std::size_t>(first_));
        return values_.at(static_cast<std::size_t>(k));
      }
      case Kind::DisturbanceNorm: {
        Vec blk = block(dist_coords, first_, count_);
        return norm_of(blk, norm_);
      }
      case Kind::Sum:
        return children_[0].eval_point(scoords, sdisc, dist_coords, state_id, input_id) +
               children_[1].eval_point(scoords, sdisc, dist_coords, state_id, input_id);
      case Kind::Scale:
        return offset_ * children_[0].eval_point(scoords, sdisc, dist_coords, state_id, input_id);
    }
    return 0.0;
  }

  double eval(const FiniteSystem& s, int x, int u) const {
    const StateInfo& st = s.states[x];
    const Vec& d = s.disturbances[s.disturbance_of(u)].coords;
    return eval_point(st.coords, st.disc, d, x, u);
  }

  /* introspection for serialization */
  std::size_t table_rows() const { return rows_; }
  std::size_t table_cols() const { return cols_; }
  const std::vector<double>& values() const { return values_; }
  const Box& box() const { return box_; }
  Norm norm() const { return norm_; }
  int first() const { return first_; }
  int second() const { return second_; }
  int count() const { return count_; }
  double offset() const { return offset_; }
  const std::vector<CostModel>& children() const { return children_; }

 private:
  explicit CostModel(Kind k) : kind_(k) {}

  static Vec block(const Vec& v, int first, int count) {
    if (count < 0) return Vec(v.begin() + first, v.end());
    return Vec(v.begin() + first, v.begin() + first + count);
  }

  Kind kind_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> values_;
  Box box_;
  Norm norm_ = Norm::Inf;
  int first_ = 0, second_ = 0, count_ = -1;
  double offset_ = 0;
  std::vector<CostModel> children_;
};

struct CostedSystem {
  FiniteSystem sys;
  CostModel I = CostModel::zero();
  CostModel O = CostModel::zero();

  double cost_I(int x, int u) const { return I.eval(sys, x, u); }
  double cost_O(int x, int u) const { return O.eval(sys, x, u); }
};

/* ------------------------------------------------------------------ */
/* behaviors                                                           */
/* ------------------------------------------------------------------ */

/* finite prefix of a behavior: state and input sequences of equal length,
 * with optional per-step cost annotations */
struct Behavior {
  std::vector<int> xs;
  std::vector<int> us;
  std::vector<double> cost_I;  /* optional, same length when present */
  std::vector<double> cost_O;

  std::size_t length() const { return xs.size(); }
};

struct BehaviorViolation {
  std::size_t step;
  std::string what;
};

/* independent re-check of the behavior invariant: initial membership and
 * step consistency of every recorded transition */
inline std::optional<BehaviorViolation> validate_behavior(const FiniteSystem& s, const Behavior& b) {
  if (b.xs.size() != b.us.size())
    return BehaviorViolation{0, "state and input sequences differ in length"};
  if (b.xs.empty()) return std::nullopt;
  if (!std::binary_search(s.initial.begin(), s.initial.end(), b.xs[0]))
    return BehaviorViolation{0, "first state is not initial"};
  for (std::size_t t = 0; t + 1 < b.xs.size(); ++t) {
    const auto& sc = s.succ(b.xs[t], b.us[t]);
    if (!std::binary_search(sc.begin(), sc.end(), b.xs[t + 1]))
      return BehaviorViolation{t, "recorded successor is not in r(x,u)"};
  }
  return std::nullopt;
}

/* ------------------------------------------------------------------ */
/* core queries                                                        */
/* ------------------------------------------------------------------ */

/* States reachable from the initial set by legal transitions. Without a
 * horizon the fixed point is reached in at most |X| rounds; with a horizon
 * only paths of that length are explored. */
inline std::vector<int> reachable_states(const FiniteSystem& s,
                                         std::optional<std::size_t> horizon = std::nullopt) {
  std::vector<char> seen(s.n_states(), 0);
  std::vector<int> frontier = s.initial;
  for (int x : frontier) seen[x] = 1;
  std::size_t rounds = horizon.value_or(s.n_states());
  for (std::size_t k = 0; k < rounds && !frontier.empty(); ++k) {
    std::vector<int> next;
    for (int x : frontier)
      for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u)
        for (int y : s.succ(x, u))
          if (!seen[y]) {
            seen[y] = 1;
            next.push_back(y);
          }
    frontier = std::move(next);
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<int>(i));
  return out;
}

struct NonBlockingReport {
  bool nonblocking = true;
  int state = -1;  /* witness (x, u) when blocking */
  int input = -1;
};

/* Def-style non-blocking: every reachable state has a successor for every
 * flat input. The witness is the id-lexicographically first blocking pair. */
inline NonBlockingReport is_nonblocking(const FiniteSystem& s) {
  for (int x : reachable_states(s))
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u)
      if (s.succ(x, u).empty()) return {false, x, u};
  return {};
}

struct BlockedExecution : std::runtime_error {
  int state;
  int input;
  BlockedExecution(int x, int u)
      : std::runtime_error("blocked execution at (state " + std::to_string(x) + ", input " +
                           std::to_string(u) + ")"),
        state(x), input(u) {}
};

/* successor-selection policies for simulation drivers */
class StepPolicy {
 public:
  enum class Kind { First, UniformRandom, Callback };

  static StepPolicy first() { return StepPolicy(Kind::First); }
  static StepPolicy uniform(std::uint64_t seed) {
    StepPolicy p(Kind::UniformRandom);
    p.rng_.seed(seed);
    return p;
  }
  static StepPolicy adversarial(std::function<int(int x, int u, const std::vector<int>&)> f) {
    StepPolicy p(Kind::Callback);
    p.cb_ = std::move(f);
    return p;
  }

  int choose(int x, int u, const std::vector<int>& succ) {
    if (succ.empty()) throw BlockedExecution(x, u);
    switch (kind_) {
      case Kind::First: return succ.front();
      case Kind::UniformRandom: {
        std::uint64_t r = rng_();
        return succ[static_cast<std::size_t>(r % succ.size())];
      }
      case Kind::Callback: return cb_(x, u, succ);
    }
    return succ.front();
  }

 private:
  explicit StepPolicy(Kind k) : kind_(k) {}
  Kind kind_;
  std::mt19937_64 rng_;
  std::function<int(int, int, const std::vector<int>&)> cb_;
};

inline int step(const FiniteSystem& s, int x, int u, StepPolicy& policy) {
  return policy.choose(x, u, s.succ(x, u));
}

}  // namespace iods

#endif  // IODS_SYSTEM_HH_
