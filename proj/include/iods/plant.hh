/*
 * plant.hh
 *
 * Discrete-time switched-affine plants x+ = A_u x + B_u + u_c + w and
 * their composition with finite discrete factors (communication and
 * reference automata) into a single executable concrete model.
 */
#ifndef IODS_PLANT_HH_
#define IODS_PLANT_HH_

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/geometry.hh"
#include "iods/system.hh"

namespace iods {

using Matrix = std::vector<Vec>;  /* row-major */

inline Vec mat_vec(const Matrix& A, const Vec& x) {
  Vec y(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
  return y;
}

inline Matrix mat_transpose_times(const Matrix& A) {
  std::size_t n = A.size();
  Matrix M(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) M[i][j] += A[k][i] * A[k][j];
  return M;
}

/* infinity norm: max absolute row sum */
inline double operator_norm_inf(const Matrix& A) {
  double m = 0;
  for (const auto& row : A) {
    double s = 0;
    for (double v : row) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

/* two norm: largest singular value via power iteration on A^T A with a
 * Rayleigh-quotient estimate; the eigenvalue gap of near-identity matrices
 * is tiny, so iterate until the estimate settles */
inline double operator_norm_two(const Matrix& A, int max_iterations = 200000,
                                double tol = 1e-14) {
  std::size_t n = A.size();
  Matrix M = mat_transpose_times(A);
  Vec v(n, 1.0);
  v[0] = 1.3;  /* deterministic non-symmetric start */
  {
    double nv = norm_of(v, Norm::Two);
    for (auto& x : v) x /= nv;
  }
  double lambda = 0;
  for (int it = 0; it < max_iterations; ++it) {
    Vec w = mat_vec(M, v);
    double rq = 0;
    for (std::size_t i = 0; i < n; ++i) rq += v[i] * w[i];
    double nw = norm_of(w, Norm::Two);
    if (nw == 0) return 0;
    for (auto& x : w) x /= nw;
    v = std::move(w);
    if (std::abs(rq - lambda) <= tol * std::max(1.0, rq) && it > 2) {
      lambda = rq;
      break;
    }
    lambda = rq;
  }
  return std::sqrt(lambda);
}

/* closed-form largest singular value of a 2x2 matrix; used to validate the
 * power iteration on small instances */
inline double two_norm_2x2_closed_form(const Matrix& A) {
  if (A.size() != 2 || A[0].size() != 2) throw std::invalid_argument("needs a 2x2 matrix");
  Matrix M = mat_transpose_times(A);
  double a = M[0][0], b = M[0][1], c = M[1][1];
  double lam = 0.5 * ((a + c) + std::sqrt((a - c) * (a - c) + 4 * b * b));
  return std::sqrt(lam);
}

inline double operator_norm(const Matrix& A, Norm n) {
  return n == Norm::Inf ? operator_norm_inf(A) : operator_norm_two(A);
}

/* ------------------------------------------------------------------ */

struct PlantMode {
  std::string label;
  Matrix A;
  Vec B;
};

/*
 * x+ = A_m x + B_m + u_c + w  on the domain box D, where m ranges over
 * the mode list, u_c over an optional additive control box, and w over
 * the disturbance space (bounded only for simulation and sampling).
 * The contraction factor is the largest operator norm of the mode
 * matrices in the plant norm.
 */
struct SwitchedAffinePlant {
  std::vector<PlantMode> modes;
  Box domain;
  Norm norm = Norm::Inf;
  std::optional<Box> control_box;   /* additive control offsets; nullopt = mode switching only */
  double disturbance_bound = 0;     /* |w| <= bound in the plant norm, for simulation */
  std::optional<Box> initial_box;   /* X0 as a box ... */
  std::vector<Vec> initial_points;  /* ... or as a point list */

  std::size_t dim() const { return domain.dim(); }

  double contraction() const {
    double b = 0;
    for (const auto& m : modes) b = std::max(b, operator_norm(m.A, norm));
    return b;
  }

  bool has_control() const { return control_box.has_value() || modes.size() > 1; }

  Vec successor(std::size_t mode, const Vec& x, const Vec& u_c, const Vec& w) const {
    Vec y = mat_vec(modes[mode].A, x);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += modes[mode].B[i];
      if (!u_c.empty()) y[i] += u_c[i];
      if (!w.empty()) y[i] += w[i];
    }
    return y;
  }
};

/* ------------------------------------------------------------------ */

/*
 * A concrete plant synchronized with finite discrete factors. Factor
 * dynamics must be deterministic per (state, disturbance) pair; factors
 * contribute their state coords and disc to the composite state, after
 * the plant coordinates. An optional rule forbids nonzero control
 * offsets while a designated factor sits in a designated state.
 */
struct HybridPlant {
  SwitchedAffinePlant plant;
  std::vector<FiniteSystem> factors;

  int zero_control_factor = -1;  /* rule disabled when < 0 */
  int zero_control_state = -1;

  CostModel I = CostModel::zero();
  CostModel O = CostModel::zero();

  struct State {
    Vec x;                        /* plant block */
    std::vector<int> factor_ids;  /* one per factor */
  };

  struct Input {
    std::size_t mode = 0;
    Vec u_c;                      /* control offset, empty when plant has no control box */
    Vec w;                        /* plant disturbance */
    std::vector<int> factor_inputs; /* flat input id per factor */
  };

  bool control_allowed(const State& s, const Vec& u_c) const {
    if (zero_control_factor < 0) return true;
    if (s.factor_ids[zero_control_factor] != zero_control_state) return true;
    for (double v : u_c)
      if (std::abs(v) > 1e-12) return false;
    return true;
  }

  State step(const State& s, const Input& in) const {
    if (!control_allowed(s, in.u_c))
      throw std::runtime_error("control input forbidden by the synchronization rule");
    State n;
    n.x = plant.successor(in.mode, s.x, in.u_c, in.w);
    n.factor_ids.resize(factors.size());
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto& succ = factors[f].succ(s.factor_ids[f], in.factor_inputs[f]);
      if (succ.size() != 1)
        throw std::runtime_error("hybrid factors must be deterministic");
      n.factor_ids[f] = succ[0];
    }
    return n;
  }

  Vec state_coords(const State& s) const {
    Vec c = s.x;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const Vec& fc = factors[f].states[s.factor_ids[f]].coords;
      c.insert(c.end(), fc.begin(), fc.end());
    }
    return c;
  }

  std::vector<int> state_disc(const State& s) const {
    std::vector<int> d;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto& fd = factors[f].states[s.factor_ids[f]].disc;
      d.insert(d.end(), fd.begin(), fd.end());
    }
    return d;
  }

  /* disturbance coords = plant w ++ factor disturbance coords */
  Vec input_dcoords(const Input& in) const {
    Vec d = in.w;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const Vec& fc = factors[f].disturbances[factors[f].disturbance_of(in.factor_inputs[f])].coords;
      d.insert(d.end(), fc.begin(), fc.end());
    }
    return d;
  }

  double cost_I(const State& s, const Input& in) const {
    return I.eval_point(state_coords(s), state_disc(s), input_dcoords(in));
  }
  double cost_O(const State& s, const Input& in) const {
    return O.eval_point(state_coords(s), state_disc(s), input_dcoords(in));
  }
};

}  // namespace iods

#endif  // IODS_PLANT_HH_
