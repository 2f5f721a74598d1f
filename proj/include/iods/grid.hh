/*
 * grid.hh
 *
 * Uniform grids over axis-aligned boxes. Grid points follow the rule
 * x_i = 2 k_i eta_i with integer k, restricted to the domain box, and are
 * enumerated in lexicographic k order (first axis slowest). The covering
 * radius kappa states that every point of the domain lies within kappa of
 * a grid point in the grid's norm; it is validated numerically, not
 * assumed.
 */
#ifndef IODS_GRID_HH_
#define IODS_GRID_HH_

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/geometry.hh"

namespace iods {

struct OutOfDomain : std::runtime_error {
  Vec point;
  explicit OutOfDomain(Vec p) : std::runtime_error("point outside the inflated grid domain"), point(std::move(p)) {}
};

class GridSpec {
 public:
  GridSpec() = default;

  GridSpec(Box domain, Vec eta, double kappa, Norm norm)
      : domain_(std::move(domain)), eta_(std::move(eta)), kappa_(kappa), norm_(norm) {
    if (eta_.size() != domain_.dim()) throw std::invalid_argument("grid: eta dimension mismatch");
    for (double e : eta_)
      if (!(e > 0)) throw std::invalid_argument("grid: eta must be positive");
    kmin_.resize(dim());
    kmax_.resize(dim());
    stride_.resize(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      double s = 2 * eta_[i];
      /* small relative slack so box endpoints that are exact multiples stay in */
      kmin_[i] = static_cast<long>(std::ceil(domain_.lb[i] / s - 1e-9));
      kmax_[i] = static_cast<long>(std::floor(domain_.ub[i] / s + 1e-9));
    }
    total_ = 1;
    for (std::size_t i = 0; i < dim(); ++i) {
      long n = kmax_[i] - kmin_[i] + 1;
      if (n <= 0) {
        total_ = 0;
        break;
      }
      total_ *= static_cast<std::size_t>(n);
    }
    /* lexicographic order: last axis fastest */
    if (total_ > 0) {
      std::size_t acc = 1;
      for (std::size_t i = dim(); i-- > 0;) {
        stride_[i] = acc;
        acc *= static_cast<std::size_t>(kmax_[i] - kmin_[i] + 1);
      }
    }
  }

  std::size_t dim() const { return eta_.size(); }
  std::size_t size() const { return total_; }
  bool empty() const { return total_ == 0; }
  const Box& domain() const { return domain_; }
  const Vec& eta() const { return eta_; }
  double kappa() const { return kappa_; }
  Norm norm() const { return norm_; }
  double spacing(std::size_t axis) const { return 2 * eta_[axis]; }

  Vec point(std::size_t id) const {
    Vec x(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      long span = kmax_[i] - kmin_[i] + 1;
      long k = kmin_[i] + static_cast<long>((id / stride_[i]) % static_cast<std::size_t>(span));
      x[i] = 2 * eta_[i] * static_cast<double>(k);
    }
    return x;
  }

  std::optional<std::size_t> id_of(const std::vector<long>& k) const {
    std::size_t id = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (k[i] < kmin_[i] || k[i] > kmax_[i]) return std::nullopt;
      id += static_cast<std::size_t>(k[i] - kmin_[i]) * stride_[i];
    }
    return id;
  }

  /* nearest grid point; midpoint ties go to the smaller k, coordinates
   * outside the domain clamp to the boundary slab */
  std::size_t quantize(const Vec& x) const {
    if (x.size() != dim()) throw std::invalid_argument("quantize: dimension mismatch");
    if (dist_to_box(x, domain_, norm_) > kappa_ + kDistTol) throw OutOfDomain(x);
    std::vector<long> k(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      double s = 2 * eta_[i];
      long kk = static_cast<long>(std::ceil(x[i] / s - 0.5 - 1e-12));
      k[i] = std::min(std::max(kk, kmin_[i]), kmax_[i]);
    }
    auto id = id_of(k);
    if (!id) throw OutOfDomain(x);
    return *id;
  }

  /* ids of grid points within `radius` of `center` in the grid norm */
  void ids_in_ball(const Vec& center, double radius, std::vector<std::size_t>& out) const {
    out.clear();
    if (empty()) return;
    std::vector<long> lo(dim()), hi(dim()), k(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      double s = 2 * eta_[i];
      lo[i] = std::max(kmin_[i], static_cast<long>(std::ceil((center[i] - radius) / s - 1e-9)));
      hi[i] = std::min(kmax_[i], static_cast<long>(std::floor((center[i] + radius) / s + 1e-9)));
      if (lo[i] > hi[i]) return;
      k[i] = lo[i];
    }
    Vec p(dim());
    while (true) {
      for (std::size_t i = 0; i < dim(); ++i) p[i] = 2 * eta_[i] * static_cast<double>(k[i]);
      if (distance(p, center, norm_) <= radius + kDistTol) out.push_back(*id_of(k));
      std::size_t i = dim();
      while (i-- > 0) {
        if (++k[i] <= hi[i]) break;
        k[i] = lo[i];
        if (i == 0) return;
      }
      if (dim() == 0) return;
    }
  }

  std::string point_label(std::size_t id) const {
    Vec p = point(id);
    std::ostringstream os;
    os.precision(12);
    os << "g(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << ")";
    return os.str();
  }

  /* worst observed distance from a sampled domain point to its quantization;
   * the covering property asks this to stay below kappa */
  double covering_radius_estimate(int samples_per_axis = 41) const {
    if (empty()) return kInf;
    std::vector<int> idx(dim(), 0);
    double worst = 0;
    while (true) {
      Vec x(dim());
      for (std::size_t i = 0; i < dim(); ++i) {
        double t = samples_per_axis == 1 ? 0.5
                                         : static_cast<double>(idx[i]) / (samples_per_axis - 1);
        x[i] = domain_.lb[i] + t * (domain_.ub[i] - domain_.lb[i]);
      }
      Vec g = point(quantize(x));
      worst = std::max(worst, distance(x, g, norm_));
      std::size_t i = dim();
      bool done = true;
      while (i-- > 0) {
        if (++idx[i] < samples_per_axis) {
          done = false;
          break;
        }
        idx[i] = 0;
        if (i == 0) break;
      }
      if (done || dim() == 0) break;
    }
    return worst;
  }

 private:
  Box domain_;
  Vec eta_;
  double kappa_ = 0;
  Norm norm_ = Norm::Inf;
  std::vector<long> kmin_, kmax_;
  std::vector<std::size_t> stride_;
  std::size_t total_ = 0;
};

/* all grid points of [box]_eta in lexicographic k order */
inline std::vector<Vec> grid_points(const Box& box, const Vec& eta) {
  GridSpec g(box, eta, 0.0, Norm::Inf);
  std::vector<Vec> out;
  out.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out.push_back(g.point(i));
  return out;
}

}  // namespace iods

#endif  // IODS_GRID_HH_
