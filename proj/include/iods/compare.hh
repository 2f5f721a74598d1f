/*
 * compare.hh
 *
 * Comparison-function algebra: class-K gain functions, class-KLD decay
 * functions with the semigroup property, the constructive combinators
 * that bound sums and transforms of them, and certificate transport for
 * approximate input-output simulation relations.
 *
 * Decay functions are discrete-time: the time argument ranges over the
 * naturals. Axioms are enforced by evaluation on a documented grid (see
 * axiom_c_grid / kAxiomTimeMax), not symbolically.
 */
#ifndef IODS_COMPARE_HH_
#define IODS_COMPARE_HH_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/geometry.hh"

namespace iods {

/* documented test grid for the axiom checks */
inline std::vector<double> axiom_c_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(0.1 * i);
  return g;
}
constexpr int kAxiomTimeMax = 20;
constexpr double kAxiomTol = 1e-9;

/* evaluation horizon cap for iterated decay functions */
constexpr int kIteratedHorizonCap = 10000;

/* ------------------------------------------------------------------ */
/* class-K gain functions                                              */
/* ------------------------------------------------------------------ */

/*
 * A gain function is zero at zero and strictly increasing (the zero
 * function is admitted as the degenerate gain used when one side of a
 * cost inequality has no slack at all). Closed forms keep exact tags so
 * compositions stay serializable.
 */
class KFunction {
 public:
  enum class Tag { Zero, Linear, Power, Table };

  KFunction() : KFunction(zero()) {}

  static KFunction zero() {
    KFunction f(Tag::Zero);
    return f;
  }

  static KFunction linear(double slope) {
    if (slope <= 0) throw std::invalid_argument("linear gain needs slope > 0");
    KFunction f(Tag::Linear);
    f.a_ = slope;
    return f;
  }

  static KFunction identity() { return linear(1.0); }

  /* c -> scale * c^exponent */
  static KFunction power(double scale, double exponent) {
    if (scale <= 0 || exponent <= 0)
      throw std::invalid_argument("power gain needs positive scale and exponent");
    KFunction f(Tag::Power);
    f.a_ = scale;
    f.b_ = exponent;
    return f;
  }

  /* monotone piecewise-linear interpolant through (0,0) and the given
   * breakpoints, extended beyond the last breakpoint with `final_slope` */
  static KFunction table(std::vector<std::pair<double, double>> pts, double final_slope) {
    KFunction f(Tag::Table);
    f.pts_ = std::move(pts);
    f.a_ = final_slope;
    if (f.pts_.empty() || final_slope <= 0)
      throw std::invalid_argument("table gain needs breakpoints and a positive final slope");
    double pc = 0, pv = 0;
    for (auto& [c, v] : f.pts_) {
      if (c <= pc - 1e-15 || v <= pv - 1e-15)
        throw std::invalid_argument("table gain breakpoints must be strictly increasing");
      if (!(c > 0 && v > 0) && !(c == 0 && v == 0))
        throw std::invalid_argument("table gain breakpoints must be positive");
      pc = c;
      pv = v;
    }
    return f;
  }

  double operator()(double c) const { return eval(c); }

  double eval(double c) const {
    if (c < 0) c = 0;
    switch (tag_) {
      case Tag::Zero: return 0.0;
      case Tag::Linear: return a_ * c;
      case Tag::Power: return a_ * std::pow(c, b_);
      case Tag::Table: {
        double pc = 0, pv = 0;
        for (auto& [bc, bv] : pts_) {
          if (c <= bc) return pv + (bv - pv) * (c - pc) / (bc - pc);
          pc = bc;
          pv = bv;
        }
        return pv + a_ * (c - pc);
      }
    }
    return 0.0;
  }

  bool is_zero() const { return tag_ == Tag::Zero; }

  bool has_inverse() const { return tag_ != Tag::Zero; }

  double inverse(double v) const {
    if (v < 0) v = 0;
    switch (tag_) {
      case Tag::Zero: throw std::domain_error("the zero gain has no inverse");
      case Tag::Linear: return v / a_;
      case Tag::Power: return std::pow(v / a_, 1.0 / b_);
      case Tag::Table: {
        double pc = 0, pv = 0;
        for (auto& [bc, bv] : pts_) {
          if (v <= bv) return pc + (bc - pc) * (v - pv) / (bv - pv);
          pc = bc;
          pv = bv;
        }
        return pc + (v - pv) / a_;
      }
    }
    return 0.0;
  }

  /* the doubling wrapper c -> 2 g(2c); closed under every tag */
  KFunction amplified() const {
    switch (tag_) {
      case Tag::Zero: return zero();
      case Tag::Linear: return linear(4 * a_);
      case Tag::Power: return power(2 * a_ * std::pow(2.0, b_), b_);
      case Tag::Table: {
        std::vector<std::pair<double, double>> p;
        p.reserve(pts_.size());
        for (auto& [c, v] : pts_) p.push_back({c / 2, 2 * v});
        return table(std::move(p), 4 * a_);
      }
    }
    return zero();
  }

  /* checked on the axiom grid; exact for the closed forms we construct */
  bool subadditive_on_grid(const std::vector<double>& grid = axiom_c_grid(),
                           double tol = kAxiomTol) const {
    for (double a : grid)
      for (double b : grid)
        if (eval(a + b) > eval(a) + eval(b) + tol) return false;
    return true;
  }

  std::optional<std::string> check_k_axioms(const std::vector<double>& grid = axiom_c_grid(),
                                            double tol = kAxiomTol) const {
    if (is_zero()) return std::nullopt; /* degenerate gain, exempt */
    if (std::abs(eval(0)) > tol) return "gain is nonzero at zero";
    double prev = eval(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
      double v = eval(grid[i]);
      if (v <= prev - tol) {
        std::ostringstream os;
        os << "gain not strictly increasing at c=" << grid[i];
        return os.str();
      }
      prev = v;
    }
    return std::nullopt;
  }

  Tag tag() const { return tag_; }
  double slope() const { return a_; }
  double exponent() const { return b_; }
  const std::vector<std::pair<double, double>>& breakpoints() const { return pts_; }

 private:
  explicit KFunction(Tag t) : tag_(t) {}
  Tag tag_;
  double a_ = 0, b_ = 0;
  std::vector<std::pair<double, double>> pts_;
};

/* ------------------------------------------------------------------ */
/* class-KLD decay functions                                           */
/* ------------------------------------------------------------------ */

namespace detail {
/* orbit cache for iterated decay maps: one lazily extended orbit per
 * distinct start value, guarded for shared use across threads */
struct OrbitCache {
  std::mutex m;
  std::map<std::uint64_t, std::vector<double>> orbits;
};
inline std::uint64_t key_of(double c) {
  std::uint64_t k;
  std::memcpy(&k, &c, sizeof k);
  return k;
}
}  // namespace detail

class KldFunction {
 public:
  enum class Tag { Zero, Exponential, LinearDecay, Iterated };

  KldFunction() : KldFunction(zero()) {}

  static KldFunction zero() { return KldFunction(Tag::Zero); }

  /* (c, t) -> bp^t * c for bp in (0,1) */
  static KldFunction exponential(double beta_prime) {
    if (!(beta_prime > 0 && beta_prime < 1))
      throw std::invalid_argument("exponential decay needs beta' in (0,1)");
    KldFunction f(Tag::Exponential);
    f.a_ = beta_prime;
    return f;
  }

  /* (c, t) -> max(c - eta t, 0) for eta > 0 */
  static KldFunction linear_decay(double eta) {
    if (!(eta > 0)) throw std::invalid_argument("linear decay needs eta > 0");
    KldFunction f(Tag::LinearDecay);
    f.a_ = eta;
    return f;
  }

  /* mu(c,0) = c, mu(c,t+1) = g(mu(c,t)); evaluation is capped at
   * `horizon_cap` steps and memoized per start value */
  static KldFunction iterated(std::function<double(double)> g,
                              int horizon_cap = kIteratedHorizonCap) {
    KldFunction f(Tag::Iterated);
    f.g_ = std::move(g);
    f.cap_ = horizon_cap;
    f.cache_ = std::make_shared<detail::OrbitCache>();
    return f;
  }

  double operator()(double c, int t) const { return eval(c, t); }

  double eval(double c, int t) const {
    if (c < 0) c = 0;
    if (t < 0) throw std::invalid_argument("decay time must be a natural number");
    switch (tag_) {
      case Tag::Zero: return 0.0;
      case Tag::Exponential: return std::pow(a_, t) * c;
      case Tag::LinearDecay: return std::max(c - a_ * t, 0.0);
      case Tag::Iterated: {
        if (t > cap_)
          throw std::domain_error("iterated decay evaluated beyond its horizon cap");
        std::lock_guard<std::mutex> lock(cache_->m);
        auto& orbit = cache_->orbits[detail::key_of(c)];
        if (orbit.empty()) orbit.push_back(c);
        while (static_cast<int>(orbit.size()) <= t) orbit.push_back(g_(orbit.back()));
        return orbit[static_cast<std::size_t>(t)];
      }
    }
    return 0.0;
  }

  bool is_zero() const { return tag_ == Tag::Zero; }
  Tag tag() const { return tag_; }
  double rate() const { return a_; }

  /* finite-grid check of the KLD axioms: identity at t=0, the semigroup
   * law, monotone in c, nonincreasing in t */
  std::optional<std::string> check_kld_axioms(const std::vector<double>& grid = axiom_c_grid(),
                                              int t_max = kAxiomTimeMax,
                                              double tol = kAxiomTol) const {
    std::ostringstream os;
    for (double c : grid) {
      if (std::abs(eval(c, 0) - c) > tol && tag_ != Tag::Zero) {
        os << "mu(c,0) != c at c=" << c;
        return os.str();
      }
      double prev = eval(c, 0);
      for (int t = 1; t <= t_max; ++t) {
        double v = eval(c, t);
        if (v > prev + tol) {
          os << "mu(c,.) increases at c=" << c << " t=" << t;
          return os.str();
        }
        prev = v;
      }
    }
    for (int t = 0; t <= t_max; ++t) {
      double prev = eval(grid.front(), t);
      for (std::size_t i = 1; i < grid.size(); ++i) {
        double v = eval(grid[i], t);
        if (v < prev - tol) {
          os << "mu(.,t) decreases at c=" << grid[i] << " t=" << t;
          return os.str();
        }
        prev = v;
      }
    }
    for (double c : grid)
      for (int s = 0; s <= t_max; ++s)
        for (int t = 0; s + t <= t_max; ++t)
          if (std::abs(eval(c, s + t) - eval(eval(c, s), t)) > tol) {
            os << "semigroup law fails at c=" << c << " s=" << s << " t=" << t;
            return os.str();
          }
    return std::nullopt;
  }

 private:
  explicit KldFunction(Tag t) : tag_(t) {}
  Tag tag_;
  double a_ = 0;
  int cap_ = kIteratedHorizonCap;
  std::function<double(double)> g_;
  std::shared_ptr<detail::OrbitCache> cache_;
};

inline KldFunction kld_exponential(double beta_prime) { return KldFunction::exponential(beta_prime); }
inline KldFunction kld_linear_decay(double eta) { return KldFunction::linear_decay(eta); }

/* ------------------------------------------------------------------ */
/* certificates and combinators                                        */
/* ------------------------------------------------------------------ */

/* witness that a costed system satisfies the stability inequality
 * O_t <= max_{t' <= t} mu(gamma(I_t'), t - t') + rho on its behaviors */
struct PiodsCertificate {
  KFunction gamma;
  KldFunction mu;
  double rho = 0;
};

/* Splits a shifted gain out of a decay bound:
 *   mu(gamma(c + c'), t) <= mu(gamma'(c), t) + sigma
 * with gamma'(c) = 2 gamma(2c) and sigma = mu(gamma'(c'), 0). */
struct AmplifiedBound {
  KFunction gamma_prime;
  double sigma;
};

inline AmplifiedBound amplify_bound(const KldFunction& mu, const KFunction& gamma, double c_prime) {
  KFunction gp = gamma.amplified();
  return {gp, mu.eval(gp.eval(c_prime), 0)};
}

/* Conjugates a decay function by an invertible gain: the result mu'
 * satisfies gamma(mu(c,t)) = mu'(gamma(c), t). */
inline KldFunction transform_kld(const KldFunction& mu, const KFunction& gamma) {
  if (!gamma.has_inverse())
    throw std::invalid_argument("transform_kld needs an invertible gain");
  return KldFunction::iterated(
      [mu, gamma](double c) { return gamma.eval(mu.eval(gamma.inverse(c), 1)); });
}

/* Bounds the sum of two running maxima by a single one:
 *   max_{t'<=t} mu_a(c,t') + max_{t'<=t} mu_b(c,t') <= max_{t'<=t} mu(2c,t'). */
inline KldFunction max_sum_bound(const KldFunction& mu_a, const KldFunction& mu_b) {
  return KldFunction::iterated([mu_a, mu_b](double c) {
    return std::max(2 * mu_a.eval(c, 1), 2 * mu_b.eval(c, 1));
  });
}

/* Certificate transport across an eps-approximate input-output simulation:
 * (gamma, mu, rho) becomes (2 gamma(2c), mu, mu(gamma'(eps),0) + eps + rho). */
inline PiodsCertificate transport_aiosr(const PiodsCertificate& cert, double epsilon) {
  if (epsilon < 0) throw std::invalid_argument("transport needs epsilon >= 0");
  KFunction gp = cert.gamma.amplified();
  double rho = cert.mu.eval(gp.eval(epsilon), 0) + epsilon + cert.rho;
  return {gp, cert.mu, rho};
}

}  // namespace iods

#endif  // IODS_COMPARE_HH_
