/*
 * monitor.hh
 *
 * Evaluation of the stability inequality on recorded traces: per-step
 * margins against a certificate, an O(1)-per-step incremental bound for
 * the two closed-form decay families, and empirical fitting of minimal
 * certificate parameters over trace ensembles.
 */
#ifndef IODS_MONITOR_HH_
#define IODS_MONITOR_HH_

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iods/compare.hh"
#include "iods/transport.hh"

namespace iods {

/* a trace reduced to its per-step costs */
struct CostTrace {
  std::vector<double> I;
  std::vector<double> O;
};

struct MonitorReport {
  bool holds = true;
  std::vector<double> rhs;      /* bound value per step */
  std::vector<double> margins;  /* rhs - O per step */
  double min_margin = kInf;
  std::size_t argmin_t = 0;
};

/* brute-force reference evaluation of the right-hand side, O(T^2) */
inline std::vector<double> piods_rhs_bruteforce(const std::vector<double>& I,
                                                const PiodsCertificate& cert) {
  std::vector<double> rhs(I.size(), 0.0);
  for (std::size_t t = 0; t < I.size(); ++t) {
    double m = 0;
    for (std::size_t tp = 0; tp <= t; ++tp)
      m = std::max(m, cert.mu.eval(cert.gamma.eval(I[tp]), static_cast<int>(t - tp)));
    rhs[t] = m + cert.rho;
  }
  return rhs;
}

/*
 * Stateful O(1)-per-step evaluator of the running maximum
 * max_{t'<=t} mu(gamma(I_t'), t-t') for exponential and linear decay.
 * The result is exact, not an approximation of the brute force.
 */
class IncrementalBound {
 public:
  IncrementalBound(KldFunction mu, KFunction gamma, double rho)
      : mu_(std::move(mu)), gamma_(std::move(gamma)), rho_(rho) {
    if (mu_.tag() != KldFunction::Tag::Exponential &&
        mu_.tag() != KldFunction::Tag::LinearDecay && mu_.tag() != KldFunction::Tag::Zero)
      throw std::invalid_argument("incremental bound supports exponential and linear decay");
  }

  /* feed I_t, returns rhs_t = running max + rho */
  double push(double I_t) {
    double g = gamma_.eval(I_t);
    switch (mu_.tag()) {
      case KldFunction::Tag::Exponential: b_ = std::max(mu_.rate() * b_, g); break;
      case KldFunction::Tag::LinearDecay: b_ = std::max({b_ - mu_.rate(), g, 0.0}); break;
      case KldFunction::Tag::Zero: b_ = 0.0; break;
      default: break;
    }
    return b_ + rho_;
  }

  double current() const { return b_ + rho_; }
  void reset() { b_ = 0; }

 private:
  KldFunction mu_;
  KFunction gamma_;
  double rho_;
  double b_ = 0;
};

/* factory mirroring the certificate; falls back to the brute-force path
 * for decay families without O(1) state */
inline std::optional<IncrementalBound> incremental_bound(const PiodsCertificate& cert) {
  if (cert.mu.tag() == KldFunction::Tag::Exponential ||
      cert.mu.tag() == KldFunction::Tag::LinearDecay || cert.mu.tag() == KldFunction::Tag::Zero)
    return IncrementalBound(cert.mu, cert.gamma, cert.rho);
  return std::nullopt;
}

/* margins of a trace against a certificate; fast path used when available */
inline MonitorReport eval_piods(const CostTrace& trace, const PiodsCertificate& cert,
                                double tol = 1e-9, bool force_bruteforce = false) {
  if (trace.I.size() != trace.O.size())
    throw std::invalid_argument("trace cost sequences differ in length");
  MonitorReport rep;
  std::optional<IncrementalBound> inc;
  if (!force_bruteforce) inc = incremental_bound(cert);
  if (inc) {
    rep.rhs.reserve(trace.I.size());
    for (double i : trace.I) rep.rhs.push_back(inc->push(i));
  } else {
    rep.rhs = piods_rhs_bruteforce(trace.I, cert);
  }
  rep.margins.resize(rep.rhs.size());
  for (std::size_t t = 0; t < rep.rhs.size(); ++t) {
    rep.margins[t] = rep.rhs[t] - trace.O[t];
    if (rep.margins[t] < rep.min_margin) {
      rep.min_margin = rep.margins[t];
      rep.argmin_t = t;
    }
  }
  if (rep.rhs.empty()) rep.min_margin = 0;
  rep.holds = rep.min_margin >= -tol;
  return rep;
}

/* margins against a transported two-term bound (needs the mismatch costs) */
inline MonitorReport eval_corollary_bound(const CostTrace& trace,
                                          const std::vector<double>& mismatch,
                                          const CorollaryBound& bound, double tol = 1e-9) {
  MonitorReport rep;
  rep.rhs = bound.rhs(trace.I, mismatch);
  rep.margins.resize(rep.rhs.size());
  for (std::size_t t = 0; t < rep.rhs.size(); ++t) {
    rep.margins[t] = rep.rhs[t] - trace.O[t];
    if (rep.margins[t] < rep.min_margin) {
      rep.min_margin = rep.margins[t];
      rep.argmin_t = t;
    }
  }
  if (rep.rhs.empty()) rep.min_margin = 0;
  rep.holds = rep.min_margin >= -tol;
  return rep;
}

/* ------------------------------------------------------------------ */
/* empirical certificate fitting                                       */
/* ------------------------------------------------------------------ */

/* smallest offset making every trace satisfy the inequality; exact */
inline double fit_rho(const std::vector<CostTrace>& traces, const KFunction& gamma,
                      const KldFunction& mu) {
  if (traces.empty()) throw std::invalid_argument("fit_rho needs at least one trace");
  double rho = 0;
  PiodsCertificate base{gamma, mu, 0.0};
  for (const auto& tr : traces) {
    auto rhs = piods_rhs_bruteforce(tr.I, base);
    for (std::size_t t = 0; t < tr.O.size(); ++t) rho = std::max(rho, tr.O[t] - rhs[t]);
  }
  return rho;
}

/* smallest scalar gain (gamma(c) = s c) satisfying every trace at the given
 * decay and offset; monotone bisection since the bound grows with the gain */
inline std::optional<double> fit_gamma(const std::vector<CostTrace>& traces,
                                       const KldFunction& mu, double rho, double tol = 1e-6,
                                       double hi_limit = 1e9) {
  if (traces.empty()) throw std::invalid_argument("fit_gamma needs at least one trace");
  auto passes = [&](double s) {
    PiodsCertificate cert{s > 0 ? KFunction::linear(s) : KFunction::zero(),
                          mu, rho};
    for (const auto& tr : traces)
      if (!eval_piods(tr, cert).holds) return false;
    return true;
  };
  double lo = 0, hi = 1;
  if (!passes(hi)) {
    while (hi < hi_limit && !passes(hi)) hi *= 2;
    if (hi >= hi_limit) return std::nullopt; /* no finite scalar gain works */
    lo = hi / 2;
  }
  if (passes(lo)) return lo;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace iods

#endif  // IODS_MONITOR_HH_
