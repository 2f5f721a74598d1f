/*
 * abstraction.hh
 *
 * Grid-based finite abstractions of contractive switched-affine plants.
 * Abstract states are the grid points of the domain, abstract controls the
 * plant modes crossed with an optional control grid, and the single
 * abstract disturbance is zero. A grid point is a successor of (state,
 * control) when it lies within the covering radius of the nominal
 * successor; successors falling outside the domain are dropped, and pairs
 * whose successor set empties this way are reported and disabled.
 *
 * The returned relation profile has parameters (kappa, beta, 1) with beta
 * the plant's contraction factor: the nominal successor map shifts any
 * related pair by at most beta times its distance, the grid covers within
 * kappa, and an additive disturbance enters with unit gain.
 */
#ifndef IODS_ABSTRACTION_HH_
#define IODS_ABSTRACTION_HH_

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iods/grid.hh"
#include "iods/parallel.hh"
#include "iods/plant.hh"
#include "iods/relations.hh"
#include "iods/system.hh"

namespace iods {

struct AbstractionResult {
  CostedSystem abs;
  RelationProfile profile;
  GridSpec state_grid;
  std::vector<std::pair<int, int>> truncated; /* (state, control) pairs disabled */
  double contraction = 0;
};

inline AbstractionResult abstract_plant(const SwitchedAffinePlant& plant,
                                        const GridSpec& state_grid,
                                        const std::optional<GridSpec>& control_grid,
                                        double kappa) {
  AbstractionResult res;
  res.state_grid = state_grid;
  res.contraction = plant.contraction();
  if (res.contraction >= 1.0) {
    std::ostringstream os;
    os << "plant is not contractive: max operator norm " << res.contraction << " (norm "
       << to_string(plant.norm) << ")";
    throw std::invalid_argument(os.str());
  }
  if (state_grid.empty()) throw std::invalid_argument("state grid is empty");

  /* covering check on a fixed sample lattice, witness kept */
  {
    int samples = 33;
    double worst = 0;
    Vec witness;
    std::vector<int> idx(state_grid.dim(), 0);
    while (true) {
      Vec x(state_grid.dim());
      for (std::size_t i = 0; i < state_grid.dim(); ++i) {
        double t = static_cast<double>(idx[i]) / (samples - 1);
        x[i] = state_grid.domain().lb[i] + t * (state_grid.domain().ub[i] - state_grid.domain().lb[i]);
      }
      double d = distance(x, state_grid.point(state_grid.quantize(x)), state_grid.norm());
      if (d > worst) {
        worst = d;
        witness = x;
      }
      std::size_t i = state_grid.dim();
      bool done = true;
      while (i-- > 0) {
        if (++idx[i] < samples) {
          done = false;
          break;
        }
        idx[i] = 0;
        if (i == 0) break;
      }
      if (done) break;
    }
    if (worst > kappa + kDistTol) {
      std::ostringstream os;
      os.precision(12);
      os << "grid does not cover the domain within kappa: point (";
      for (std::size_t i = 0; i < witness.size(); ++i) os << (i ? "," : "") << witness[i];
      os << ") is " << worst << " away";
      throw std::invalid_argument(os.str());
    }
  }

  FiniteSystem sys;

  /* states: grid points in lexicographic order */
  for (std::size_t i = 0; i < state_grid.size(); ++i)
    sys.states.push_back({state_grid.point_label(i), state_grid.point(i), {}});

  /* initial states: grid points within kappa of the plant initial set */
  for (std::size_t i = 0; i < state_grid.size(); ++i) {
    Vec p = state_grid.point(i);
    double d;
    if (plant.initial_box)
      d = dist_to_box(p, *plant.initial_box, plant.norm);
    else {
      d = kInf;
      for (const auto& q : plant.initial_points) d = std::min(d, distance(p, q, plant.norm));
    }
    if (d <= kappa + kDistTol) sys.initial.push_back(static_cast<int>(i));
  }

  /* controls: modes x control grid offsets */
  std::vector<Vec> offsets;
  if (control_grid) {
    for (std::size_t i = 0; i < control_grid->size(); ++i) offsets.push_back(control_grid->point(i));
  } else {
    offsets.push_back({});
  }
  for (std::size_t m = 0; m < plant.modes.size(); ++m)
    for (const auto& o : offsets) {
      InputPart c;
      c.label = plant.modes[m].label;
      if (!o.empty()) {
        std::ostringstream os;
        os.precision(12);
        os << c.label << "@(";
        for (std::size_t i = 0; i < o.size(); ++i) os << (i ? "," : "") << o[i];
        os << ")";
        c.label = os.str();
      }
      c.coords = o;
      c.disc = {static_cast<int>(m)};
      sys.controls.push_back(std::move(c));
    }

  /* the single abstract disturbance: zero */
  sys.disturbances.push_back({"bot", Vec(plant.dim(), 0.0), {}});
  sys.split_declared = true;
  sys.finalize();

  /* transitions: grid points within kappa of the nominal successor; only
   * the cells intersecting that ball are visited */
  const std::size_t n_states = sys.n_states();
  const std::size_t n_ctrl = sys.controls.size();
  std::vector<std::vector<std::size_t>> succ(n_states * n_ctrl);
  struct Noop {};
  parallel_chunks<Noop>(
      n_states,
      [&](std::size_t beg, std::size_t end, Noop&) {
        std::vector<std::size_t> ball;
        for (std::size_t x = beg; x < end; ++x) {
          Vec p = state_grid.point(x);
          std::size_t ci = 0;
          for (std::size_t m = 0; m < plant.modes.size(); ++m)
            for (const auto& o : offsets) {
              Vec center = plant.successor(m, p, o, {});
              state_grid.ids_in_ball(center, kappa, ball);
              succ[x * n_ctrl + ci] = ball;
              ++ci;
            }
        }
      },
      [](Noop&, Noop&) {});

  for (std::size_t x = 0; x < n_states; ++x)
    for (std::size_t c = 0; c < n_ctrl; ++c) {
      const auto& sc = succ[x * n_ctrl + c];
      if (sc.empty()) {
        res.truncated.push_back({static_cast<int>(x), static_cast<int>(c)});
        continue;
      }
      std::vector<int> ids(sc.begin(), sc.end());
      sys.set_succ(static_cast<int>(x), sys.input_id(static_cast<int>(c), 0), std::move(ids));
    }

  res.abs.sys = std::move(sys);
  res.abs.I = CostModel::zero();
  res.abs.O = CostModel::zero();

  res.profile.orientation = plant.has_control() ? Orientation::Alternating : Orientation::Plain;
  res.profile.dx = StateDistance::ball(plant.norm);
  res.profile.pu = plant.has_control() ? InputPairing::control_equal() : InputPairing::all_with_bot();
  res.profile.sd = InputDistance::disturbance_gap(plant.norm);
  res.profile.kappa = kappa;
  res.profile.beta = res.contraction;
  res.profile.lambda = 1.0;
  return res;
}

/* nearest grid state for a measured plant state (protocol initialization) */
inline int quantize_state(const GridSpec& grid, const Vec& x) {
  return static_cast<int>(grid.quantize(x));
}

}  // namespace iods

#endif  // IODS_ABSTRACTION_HH_
