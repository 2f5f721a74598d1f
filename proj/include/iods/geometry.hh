/*
 * geometry.hh
 *
 * Small vector/box helpers shared by the whole library: norms on
 * real vectors, distances to boxes, and axis-aligned boxes used as
 * state/input domains.
 */
#ifndef IODS_GEOMETRY_HH_
#define IODS_GEOMETRY_HH_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace iods {

using Vec = std::vector<double>;

enum class Norm { Inf, Two };

inline std::string to_string(Norm n) { return n == Norm::Inf ? "inf" : "two"; }

inline double norm_of(const Vec& v, Norm n) {
  if (n == Norm::Inf) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double distance(const Vec& a, const Vec& b, Norm n) {
  if (a.size() != b.size())
    throw std::invalid_argument("distance: dimension mismatch");
  if (n == Norm::Inf) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  }
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/* axis-aligned box [lb_1,ub_1] x ... x [lb_n,ub_n] */
struct Box {
  Vec lb;
  Vec ub;

  Box() = default;
  Box(Vec l, Vec u) : lb(std::move(l)), ub(std::move(u)) {
    if (lb.size() != ub.size()) throw std::invalid_argument("Box: dimension mismatch");
    for (std::size_t i = 0; i < lb.size(); ++i)
      if (lb[i] > ub[i]) throw std::invalid_argument("Box: lb > ub");
  }

  std::size_t dim() const { return lb.size(); }

  bool contains(const Vec& x, double slack = 0.0) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (x[i] < lb[i] - slack || x[i] > ub[i] + slack) return false;
    return true;
  }

  Box inflated(double r) const {
    Box b = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
      b.lb[i] -= r;
      b.ub[i] += r;
    }
    return b;
  }

  Vec clamp(const Vec& x) const {
    Vec y = x;
    for (std::size_t i = 0; i < dim(); ++i) y[i] = std::min(std::max(y[i], lb[i]), ub[i]);
    return y;
  }

  Vec center() const {
    Vec c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lb[i] + ub[i]);
    return c;
  }
};

/* distance from a point to a box (zero inside); the projection onto the
 * box realizes the distance for both supported norms */
inline double dist_to_box(const Vec& x, const Box& b, Norm n) {
  Vec p = b.clamp(x);
  return distance(x, p, n);
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline bool approx_equal(const Vec& a, const Vec& b, double tol = 1e-12) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

/* default absolute tolerance on distance comparisons; ties count as
 * inside closed balls */
constexpr double kDistTol = 1e-9;

}  // namespace iods

#endif  // IODS_GEOMETRY_HH_
