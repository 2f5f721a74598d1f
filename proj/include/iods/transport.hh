/*
 * transport.hh
 *
 * The constructive trace matcher for contractive simulations, the
 * contraction-bound constants, the input-mismatch function, and the
 * transport of stability certificates across relations.
 */
#ifndef IODS_TRANSPORT_HH_
#define IODS_TRANSPORT_HH_

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iods/checkers.hh"
#include "iods/compare.hh"
#include "iods/relations.hh"

namespace iods {

/* ------------------------------------------------------------------ */
/* trace matching                                                      */
/* ------------------------------------------------------------------ */

/* one step of a concrete behavior presented as raw points */
struct ConcreteStep {
  Vec state_coords;
  std::vector<int> state_disc;
  SideInputPart control;
  SideInputPart dist;
};

enum class MatchPolicy { Greedy, First };

/*
 * A concrete behavior matched by an abstract one. eps follows the
 * recursion eps_0 = kappa, eps_{t+1} = kappa + beta eps_t + lambda sd_t
 * with the realized input distances sd_t; at every step the matched pair
 * must lie inside the eps_t ball. A failure here means the profile's
 * checker accepted an unsound relation.
 */
struct MatchedTracePair {
  bool ok = true;
  std::size_t fail_step = 0;
  std::string error;

  std::vector<int> hat_states;
  std::vector<int> hat_inputs;       /* flat ids */
  std::vector<double> eps;           /* recursion values, one per step */
  std::vector<double> sd;            /* realized input distances */
  std::vector<double> realized_dist; /* d_X(hat_t, xi_t) */
};

inline MatchedTracePair match_trace(const CostedSystem& hat, const RelationProfile& p,
                                    const std::vector<ConcreteStep>& steps,
                                    MatchPolicy policy = MatchPolicy::Greedy,
                                    double tol = kDistTol) {
  if (p.orientation != Orientation::Plain)
    throw std::invalid_argument("trace matching follows plain-orientation relations");
  MatchedTracePair out;
  if (steps.empty()) return out;

  auto fail = [&](std::size_t t, std::string why) {
    out.ok = false;
    out.fail_step = t;
    out.error = std::move(why);
    return out;
  };

  /* initial abstract state within kappa; greedy takes the closest one,
   * ties resolved toward the smaller state id */
  int cur = -1;
  double best = kInf;
  for (int h0 : hat.sys.initial) {
    double d = p.dx.eval(hat.sys.states[h0].coords, hat.sys.states[h0].disc,
                         steps[0].state_coords, steps[0].state_disc, h0, -1);
    if (d < best) {
      best = d;
      cur = h0;
    }
    if (policy == MatchPolicy::First && d <= p.kappa + tol) break;
  }
  if (cur < 0 || best > p.kappa + tol)
    return fail(0, "no abstract initial state within kappa of the first concrete state");

  double eps = p.kappa;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const ConcreteStep& st = steps[t];
    out.hat_states.push_back(cur);
    out.eps.push_back(eps);
    double rd = p.dx.eval(hat.sys.states[cur].coords, hat.sys.states[cur].disc, st.state_coords,
                          st.state_disc, cur, -1);
    out.realized_dist.push_back(rd);
    if (rd > eps + tol) return fail(t, "matched pair left the eps ball");

    /* pair the concrete input */
    int hc = -1, hd = -1;
    switch (p.pu.kind) {
      case InputPairing::Kind::AllWithBot:
        hc = 0;
        hd = 0;
        break;
      case InputPairing::Kind::ControlEqualDistZero: {
        for (std::size_t h = 0; h < hat.sys.n_controls(); ++h)
          if (p.pu.match_control(hat.sys.controls[h].label, hat.sys.controls[h].coords,
                                 hat.sys.controls[h].disc, st.control.label, st.control.coords,
                                 st.control.disc)) {
            hc = static_cast<int>(h);
            break;
          }
        for (std::size_t h = 0; h < hat.sys.n_disturbances(); ++h)
          if (p.pu.match_dist(hat.sys.disturbances[h].disc, st.dist.disc)) {
            hd = static_cast<int>(h);
            break;
          }
        break;
      }
      case InputPairing::Kind::IdentityFlat:
      case InputPairing::Kind::ExplicitPairs:
        throw std::invalid_argument("trace matching supports structural pairings only");
    }
    if (hc < 0 || hd < 0) return fail(t, "concrete input has no paired abstract input");
    int hu = hat.sys.input_id(hc, hd);
    out.hat_inputs.push_back(hu);
    double sd = p.sd.eval(hat.sys.disturbances[hd].coords, st.dist.coords);
    out.sd.push_back(sd);

    double eps_next = p.kappa + p.beta * eps + p.lambda * sd;
    if (t + 1 < steps.size()) {
      const auto& hsucc = hat.sys.succ(cur, hu);
      if (hsucc.empty()) return fail(t, "abstract successor set is empty");
      int nxt = -1;
      double nd = kInf;
      for (int hy : hsucc) {
        double d = p.dx.eval(hat.sys.states[hy].coords, hat.sys.states[hy].disc,
                             steps[t + 1].state_coords, steps[t + 1].state_disc, hy, -1);
        if (d < nd) {
          nd = d;
          nxt = hy;
        }
        if (policy == MatchPolicy::First && d <= eps_next + tol) {
          nxt = hy;
          nd = d;
          break;
        }
      }
      if (nxt < 0 || nd > eps_next + tol)
        return fail(t + 1, "no abstract successor inside the contracted ball");
      cur = nxt;
    }
    eps = eps_next;
  }
  return out;
}

/* finite-system convenience overload */
inline MatchedTracePair match_trace(const CostedSystem& hat, const RelationProfile& p,
                                    const CostedSystem& con, const Behavior& b,
                                    MatchPolicy policy = MatchPolicy::Greedy) {
  std::vector<ConcreteStep> steps;
  for (std::size_t t = 0; t < b.length(); ++t) {
    const auto& st = con.sys.states[b.xs[t]];
    int c = con.sys.control_of(b.us[t]);
    int d = con.sys.disturbance_of(b.us[t]);
    steps.push_back({st.coords, st.disc,
                     {con.sys.controls[c].label, con.sys.controls[c].coords, con.sys.controls[c].disc},
                     {con.sys.disturbances[d].label, con.sys.disturbances[d].coords,
                      con.sys.disturbances[d].disc}});
  }
  return match_trace(hat, p, steps, policy);
}

/* ------------------------------------------------------------------ */
/* contraction bounds and input mismatch                               */
/* ------------------------------------------------------------------ */

/* closed-form constants bounding the eps recursion of a contractive
 * relation: eps_{t+1} <= max_{t'<=t} mu(gd * sd_t', t-t') + kd */
struct ContractionBounds {
  double kappa_delta;
  double gamma_delta;
  KldFunction mu_delta;
};

inline ContractionBounds gamma_bounds(const RelationProfile& p, double beta_prime) {
  if (!(beta_prime > p.beta && beta_prime < 1.0))
    throw std::invalid_argument("gamma_bounds needs beta < beta' < 1");
  return {p.kappa / (1.0 - p.beta), p.lambda / (beta_prime - p.beta),
          KldFunction::exponential(beta_prime)};
}

/*
 * Worst-case input mismatch of a concrete input against any abstract input
 * it relates to. For structural pairings with a zero abstract disturbance
 * this is just the disturbance norm of the concrete input.
 */
struct MismatchFn {
  InputDistance sd;
  /* explicit pairings carry a per-concrete-flat-input table instead */
  std::vector<double> table;

  double eval_dcoords(const Vec& con_dcoords) const {
    if (!table.empty()) throw std::logic_error("tabled mismatch needs flat input ids");
    return sd.eval({}, con_dcoords);
  }
  double eval_flat(int con_u) const {
    if (table.empty()) throw std::logic_error("structural mismatch evaluates on coords");
    return table[static_cast<std::size_t>(con_u)];
  }
};

inline MismatchFn mismatch_gamma(const RelationProfile& p, const CostedSystem* hat = nullptr,
                                 const CostedSystem* con = nullptr) {
  MismatchFn f;
  f.sd = p.sd;
  switch (p.pu.kind) {
    case InputPairing::Kind::ControlEqualDistZero:
    case InputPairing::Kind::AllWithBot:
      return f; /* sup over the unique paired disturbance */
    case InputPairing::Kind::IdentityFlat:
      f.sd = InputDistance::zero();
      return f;
    case InputPairing::Kind::ExplicitPairs: {
      if (!hat || !con)
        throw std::invalid_argument("explicit pairing mismatch needs both systems");
      f.table.assign(con->sys.n_inputs(), 0.0);
      for (auto& [hu, cu] : p.pu.pairs) {
        const Vec& hd = hat->sys.disturbances[hat->sys.disturbance_of(hu)].coords;
        const Vec& cd = con->sys.disturbances[con->sys.disturbance_of(cu)].coords;
        f.table[static_cast<std::size_t>(cu)] =
            std::max(f.table[static_cast<std::size_t>(cu)], p.sd.eval(hd, cd));
      }
      return f;
    }
  }
  return f;
}

/* ------------------------------------------------------------------ */
/* certificate transport                                               */
/* ------------------------------------------------------------------ */

/* exact input-output simulations preserve the certificate unchanged */
inline PiodsCertificate transport_sr(const PiodsCertificate& cert) { return cert; }

/*
 * Right-hand-side evaluator of the stability inequality obtained through a
 * contractive input-output relation whose output gain is subadditive and
 * whose abstract input cost is dominated by the concrete one:
 *
 *   rhs_t = max_{t'<=t} mu_hat(gamma_hat(I_t'), t-t')
 *         + max_{t'<=t} gamma_O(mu_delta(gd' * Gamma_t', t-t'))
 *         + gamma_O(kappa_delta) + rho_hat
 *
 * with gd'(r) = max(r, gamma_delta * r).
 */
struct CorollaryBound {
  PiodsCertificate hat;
  KFunction gamma_O;
  ContractionBounds bounds;

  double constant() const { return gamma_O.eval(bounds.kappa_delta) + hat.rho; }

  double gd_prime(double r) const { return std::max(r, bounds.gamma_delta * r); }

  /* brute-force reference evaluation, O(T^2) */
  std::vector<double> rhs(const std::vector<double>& I, const std::vector<double>& Gamma) const {
    std::size_t T = I.size();
    if (Gamma.size() != T) throw std::invalid_argument("cost sequences differ in length");
    std::vector<double> out(T, 0.0);
    double c = constant();
    for (std::size_t t = 0; t < T; ++t) {
      double m1 = 0, m2 = 0;
      for (std::size_t tp = 0; tp <= t; ++tp) {
        int dt = static_cast<int>(t - tp);
        m1 = std::max(m1, hat.mu.eval(hat.gamma.eval(I[tp]), dt));
        m2 = std::max(m2, gamma_O.eval(bounds.mu_delta.eval(gd_prime(Gamma[tp]), dt)));
      }
      out[t] = m1 + m2 + c;
    }
    return out;
  }
};

inline CorollaryBound transport_acsr(const PiodsCertificate& hat_cert, const RelationProfile& p,
                                     const CostGains& gains, double beta_prime,
                                     bool abstract_I_dominated) {
  if (!abstract_I_dominated)
    throw std::invalid_argument(
        "transport_acsr precondition: abstract input cost must be verified <= concrete input "
        "cost on related tuples");
  if (!gains.gamma_O.subadditive_on_grid())
    throw std::invalid_argument("transport_acsr precondition: output gain must be subadditive");
  return {hat_cert, gains.gamma_O, gamma_bounds(p, beta_prime)};
}

}  // namespace iods

#endif  // IODS_TRANSPORT_HH_
