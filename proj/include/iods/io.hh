/*
 * io.hh
 *
 * JSON formats for systems, plants, profiles, certificates, and targets,
 * plus the CSV trace formats. Configuration errors carry a JSON-pointer
 * style path to the offending field.
 */
#ifndef IODS_IO_HH_
#define IODS_IO_HH_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "iods/compare.hh"
#include "iods/monitor.hh"
#include "iods/plant.hh"
#include "iods/refine.hh"
#include "iods/relations.hh"
#include "iods/synthesis.hh"
#include "iods/system.hh"

namespace iods {

using Json = nlohmann::json;

struct ConfigError : std::runtime_error {
  std::string pointer;
  ConfigError(std::string ptr, const std::string& what)
      : std::runtime_error(ptr + ": " + what), pointer(std::move(ptr)) {}
};

namespace detail {
inline const Json& at(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "/" + key, "missing field");
  return j.at(key);
}
inline Norm norm_of_string(const std::string& s, const std::string& path) {
  if (s == "inf") return Norm::Inf;
  if (s == "two") return Norm::Two;
  throw ConfigError(path, "unknown norm '" + s + "' (expected inf|two)");
}
}  // namespace detail

/* ------------------------------------------------------------------ */
/* systems                                                             */
/* ------------------------------------------------------------------ */

inline Json input_part_json(const InputPart& p) {
  Json j;
  j["label"] = p.label;
  if (!p.coords.empty()) j["coords"] = p.coords;
  if (!p.disc.empty()) j["disc"] = p.disc;
  return j;
}

inline InputPart input_part_from(const Json& j, const std::string& path) {
  InputPart p;
  if (j.is_string()) {
    p.label = j.get<std::string>();
    return p;
  }
  p.label = detail::at(j, "label", path).get<std::string>();
  if (j.contains("coords")) p.coords = j["coords"].get<Vec>();
  if (j.contains("disc")) p.disc = j["disc"].get<std::vector<int>>();
  return p;
}

inline Json system_json(const FiniteSystem& s) {
  Json j;
  for (const auto& st : s.states) {
    Json js;
    js["label"] = st.label;
    if (!st.coords.empty()) js["coords"] = st.coords;
    if (!st.disc.empty()) js["disc"] = st.disc;
    j["states"].push_back(js);
  }
  j["initial"] = Json::array();
  for (int x : s.initial) j["initial"].push_back(s.states[x].label);
  if (s.split_declared) {
    for (const auto& c : s.controls) j["inputs"]["control"].push_back(input_part_json(c));
    for (const auto& d : s.disturbances) j["inputs"]["disturbance"].push_back(input_part_json(d));
  } else {
    for (const auto& d : s.disturbances) j["inputs"]["flat"].push_back(input_part_json(d));
  }
  j["transitions"] = Json::array();
  for (int x = 0; x < static_cast<int>(s.n_states()); ++x)
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u)
      for (int y : s.succ(x, u))
        j["transitions"].push_back({s.states[x].label, s.input_label(u), s.states[y].label});
  return j;
}

inline FiniteSystem system_from_json(const Json& j, const std::string& path = "") {
  FiniteSystem s;
  for (const auto& js : detail::at(j, "states", path)) {
    StateInfo st;
    if (js.is_string())
      st.label = js.get<std::string>();
    else {
      st.label = detail::at(js, "label", path + "/states").get<std::string>();
      if (js.contains("coords")) st.coords = js["coords"].get<Vec>();
      if (js.contains("disc")) st.disc = js["disc"].get<std::vector<int>>();
    }
    s.states.push_back(std::move(st));
  }
  /* states without coords get their id as discrete signature so identity
   * relations are expressible */
  bool any_named_disc = false;
  for (auto& st : s.states)
    if (!st.disc.empty()) any_named_disc = true;
  if (!any_named_disc)
    for (std::size_t i = 0; i < s.states.size(); ++i)
      if (s.states[i].coords.empty()) s.states[i].disc = {static_cast<int>(i)};

  const Json& ji = detail::at(j, "inputs", path);
  if (ji.contains("flat")) {
    for (const auto& jd : ji["flat"]) s.disturbances.push_back(input_part_from(jd, path + "/inputs/flat"));
    s.controls.push_back({"", {}, {}});
    s.split_declared = false;
  } else {
    for (const auto& jc : detail::at(ji, "control", path + "/inputs"))
      s.controls.push_back(input_part_from(jc, path + "/inputs/control"));
    for (const auto& jd : detail::at(ji, "disturbance", path + "/inputs"))
      s.disturbances.push_back(input_part_from(jd, path + "/inputs/disturbance"));
    s.split_declared = true;
  }
  /* the no-disturbance symbol must sit at id 0 */
  for (std::size_t d = 0; d < s.disturbances.size(); ++d)
    if (s.disturbances[d].label == "bot" && d != 0) std::swap(s.disturbances[0], s.disturbances[d]);

  for (const auto& jl : detail::at(j, "initial", path)) {
    int id = s.state_id(jl.get<std::string>());
    if (id < 0) throw ConfigError(path + "/initial", "unknown state " + jl.get<std::string>());
    s.initial.push_back(id);
  }
  s.finalize();

  auto input_by_label = [&](const std::string& l) {
    for (int u = 0; u < static_cast<int>(s.n_inputs()); ++u)
      if (s.input_label(u) == l) return u;
    return -1;
  };
  std::size_t k = 0;
  for (const auto& jt : detail::at(j, "transitions", path)) {
    std::string p = path + "/transitions/" + std::to_string(k++);
    if (!jt.is_array() || jt.size() != 3) throw ConfigError(p, "expected [state, input, successor]");
    int x = s.state_id(jt[0].get<std::string>());
    int u = input_by_label(jt[1].get<std::string>());
    int y = s.state_id(jt[2].get<std::string>());
    if (x < 0) throw ConfigError(p, "unknown state " + jt[0].get<std::string>());
    if (u < 0) throw ConfigError(p, "unknown input " + jt[1].get<std::string>());
    if (y < 0) throw ConfigError(p, "unknown successor " + jt[2].get<std::string>());
    s.add_transition(x, u, y);
  }
  return s;
}

/* costs table attached to a system file */
inline CostedSystem costed_system_from_json(const Json& j, const std::string& path = "") {
  CostedSystem cs;
  cs.sys = system_from_json(j, path);
  if (j.contains("costs")) {
    std::size_t n = cs.sys.n_states() * cs.sys.n_inputs();
    std::vector<double> vi(n, 0.0), vo(n, 0.0);
    auto input_by_label = [&](const std::string& l) {
      for (int u = 0; u < static_cast<int>(cs.sys.n_inputs()); ++u)
        if (cs.sys.input_label(u) == l) return u;
      return -1;
    };
    std::size_t k = 0;
    for (const auto& jc : j["costs"]) {
      std::string p = path + "/costs/" + std::to_string(k++);
      int x = cs.sys.state_id(detail::at(jc, "state", p).get<std::string>());
      int u = input_by_label(detail::at(jc, "input", p).get<std::string>());
      if (x < 0 || u < 0) throw ConfigError(p, "unknown state or input");
      vi[static_cast<std::size_t>(x) * cs.sys.n_inputs() + u] = detail::at(jc, "I", p).get<double>();
      vo[static_cast<std::size_t>(x) * cs.sys.n_inputs() + u] = detail::at(jc, "O", p).get<double>();
    }
    cs.I = CostModel::table(cs.sys.n_states(), cs.sys.n_inputs(), std::move(vi));
    cs.O = CostModel::table(cs.sys.n_states(), cs.sys.n_inputs(), std::move(vo));
  }
  return cs;
}

inline Json costed_system_json(const CostedSystem& cs) {
  Json j = system_json(cs.sys);
  if (!cs.I.is_zero() || !cs.O.is_zero()) {
    j["costs"] = Json::array();
    for (int x = 0; x < static_cast<int>(cs.sys.n_states()); ++x)
      for (int u = 0; u < static_cast<int>(cs.sys.n_inputs()); ++u) {
        double I = cs.cost_I(x, u), O = cs.cost_O(x, u);
        if (I != 0 || O != 0)
          j["costs"].push_back({{"state", cs.sys.states[x].label},
                                {"input", cs.sys.input_label(u)},
                                {"I", I},
                                {"O", O}});
      }
  }
  return j;
}

/* ------------------------------------------------------------------ */
/* cost models                                                         */
/* ------------------------------------------------------------------ */

inline Json cost_model_json(const CostModel& m) {
  switch (m.kind()) {
    case CostModel::Kind::Zero: return {{"rule", "zero"}};
    case CostModel::Kind::Table:
      return {{"rule", "table"}, {"rows", m.table_rows()}, {"cols", m.table_cols()},
              {"values", m.values()}};
    case CostModel::Kind::DistToBox:
      return {{"rule", "dist-to-box"}, {"lb", m.box().lb}, {"ub", m.box().ub},
              {"norm", to_string(m.norm())}, {"first", m.first()}, {"count", m.count()}};
    case CostModel::Kind::BlockDistance:
      return {{"rule", "block-distance"}, {"a", m.first()}, {"b", m.second()},
              {"count", m.count()}, {"norm", to_string(m.norm())}, {"offset", m.offset()}};
    case CostModel::Kind::DiscIndicator:
      return {{"rule", "disc-indicator"}, {"index", m.first()}, {"values", m.values()}};
    case CostModel::Kind::DisturbanceNorm:
      return {{"rule", "disturbance-norm"}, {"norm", to_string(m.norm())}, {"first", m.first()},
              {"count", m.count()}};
    case CostModel::Kind::Sum:
      return {{"rule", "sum"}, {"a", cost_model_json(m.children()[0])},
              {"b", cost_model_json(m.children()[1])}};
    case CostModel::Kind::Scale:
      return {{"rule", "scale"}, {"factor", m.offset()},
              {"inner", cost_model_json(m.children()[0])}};
  }
  return {};
}

inline CostModel cost_model_from_json(const Json& j, const std::string& path = "") {
  std::string rule = detail::at(j, "rule", path).get<std::string>();
  if (rule == "zero") return CostModel::zero();
  if (rule == "table")
    return CostModel::table(j["rows"].get<std::size_t>(), j["cols"].get<std::size_t>(),
                            j["values"].get<std::vector<double>>());
  if (rule == "dist-to-box")
    return CostModel::dist_to_box(Box(j["lb"].get<Vec>(), j["ub"].get<Vec>()),
                                  detail::norm_of_string(j["norm"].get<std::string>(), path),
                                  j.value("first", 0), j.value("count", -1));
  if (rule == "block-distance")
    return CostModel::block_distance(j["a"].get<int>(), j["b"].get<int>(), j["count"].get<int>(),
                                     detail::norm_of_string(j["norm"].get<std::string>(), path),
                                     j.value("offset", 0.0));
  if (rule == "disc-indicator")
    return CostModel::disc_indicator(j["index"].get<int>(),
                                     j["values"].get<std::vector<double>>());
  if (rule == "disturbance-norm")
    return CostModel::disturbance_norm(detail::norm_of_string(j["norm"].get<std::string>(), path),
                                       j.value("first", 0), j.value("count", -1));
  if (rule == "sum")
    return CostModel::sum(cost_model_from_json(j["a"], path + "/a"),
                          cost_model_from_json(j["b"], path + "/b"));
  if (rule == "scale")
    return CostModel::scale(j["factor"].get<double>(),
                            cost_model_from_json(j["inner"], path + "/inner"));
  throw ConfigError(path + "/rule", "unknown cost rule " + rule);
}

inline Json relation_json(const ExplicitRelation& r) {
  Json j;
  j["tuples"] = r.tuples;
  return j;
}

inline ExplicitRelation relation_from_json(const Json& j, const std::string& path = "") {
  ExplicitRelation r;
  r.tuples = detail::at(j, "tuples", path).get<std::vector<std::array<int, 4>>>();
  return r;
}

/* hybrid plant: switched-affine core plus finite factors and cost rules */
inline Json hybrid_json(const HybridPlant& h);
inline HybridPlant hybrid_from_json(const Json& j, const std::string& path = "");

/* ------------------------------------------------------------------ */
/* plants                                                              */
/* ------------------------------------------------------------------ */

inline Json plant_json(const SwitchedAffinePlant& p) {
  Json j;
  for (const auto& m : p.modes) {
    Json jm;
    jm["label"] = m.label;
    jm["A"] = m.A;
    jm["B"] = m.B;
    j["modes"].push_back(jm);
  }
  j["domain"] = {{"lb", p.domain.lb}, {"ub", p.domain.ub}};
  j["norm"] = to_string(p.norm);
  if (p.control_box) j["control_box"] = {{"lb", p.control_box->lb}, {"ub", p.control_box->ub}};
  j["disturbance_bound"] = p.disturbance_bound;
  if (p.initial_box) j["initial_box"] = {{"lb", p.initial_box->lb}, {"ub", p.initial_box->ub}};
  if (!p.initial_points.empty()) j["initial_points"] = p.initial_points;
  return j;
}

inline SwitchedAffinePlant plant_from_json(const Json& j, const std::string& path = "") {
  SwitchedAffinePlant p;
  for (const auto& jm : detail::at(j, "modes", path)) {
    PlantMode m;
    m.label = jm.contains("label") ? jm["label"].get<std::string>()
                                   : std::to_string(p.modes.size() + 1);
    m.A = detail::at(jm, "A", path + "/modes").get<Matrix>();
    m.B = detail::at(jm, "B", path + "/modes").get<Vec>();
    p.modes.push_back(std::move(m));
  }
  const Json& jd = detail::at(j, "domain", path);
  p.domain = Box(detail::at(jd, "lb", path + "/domain").get<Vec>(),
                 detail::at(jd, "ub", path + "/domain").get<Vec>());
  p.norm = detail::norm_of_string(detail::at(j, "norm", path).get<std::string>(), path + "/norm");
  if (j.contains("control_box"))
    p.control_box = Box(j["control_box"]["lb"].get<Vec>(), j["control_box"]["ub"].get<Vec>());
  if (j.contains("disturbance_bound")) p.disturbance_bound = j["disturbance_bound"].get<double>();
  if (j.contains("initial_box"))
    p.initial_box = Box(j["initial_box"]["lb"].get<Vec>(), j["initial_box"]["ub"].get<Vec>());
  if (j.contains("initial_points")) p.initial_points = j["initial_points"].get<std::vector<Vec>>();
  return p;
}

inline Json hybrid_json(const HybridPlant& h) {
  Json j;
  j["plant"] = plant_json(h.plant);
  for (const auto& f : h.factors) j["factors"].push_back(system_json(f));
  if (h.zero_control_factor >= 0)
    j["zero_control_when"] = {{"factor", h.zero_control_factor}, {"state", h.zero_control_state}};
  j["costs"] = {{"I", cost_model_json(h.I)}, {"O", cost_model_json(h.O)}};
  return j;
}

inline HybridPlant hybrid_from_json(const Json& j, const std::string& path) {
  HybridPlant h;
  h.plant = plant_from_json(detail::at(j, "plant", path), path + "/plant");
  if (j.contains("factors"))
    for (const auto& jf : j["factors"]) h.factors.push_back(system_from_json(jf, path + "/factors"));
  if (j.contains("zero_control_when")) {
    h.zero_control_factor = j["zero_control_when"]["factor"].get<int>();
    h.zero_control_state = j["zero_control_when"]["state"].get<int>();
  }
  if (j.contains("costs")) {
    h.I = cost_model_from_json(j["costs"]["I"], path + "/costs/I");
    h.O = cost_model_from_json(j["costs"]["O"], path + "/costs/O");
  }
  return h;
}

/* ------------------------------------------------------------------ */
/* profiles, certificates, targets                                     */
/* ------------------------------------------------------------------ */

inline Json profile_json(const RelationProfile& p) {
  Json j;
  j["orientation"] = p.orientation == Orientation::Plain ? "plain" : "alternating";
  switch (p.dx.kind) {
    case StateDistance::Kind::CoordBall:
      j["dX"] = {{"kind", "norm"}, {"norm", to_string(p.dx.norm)}};
      if (!p.dx.hat_idx.empty()) {
        j["dX"]["hat_coords"] = p.dx.hat_idx;
        j["dX"]["con_coords"] = p.dx.con_idx;
        j["dX"]["hat_disc"] = p.dx.hat_disc_idx;
        j["dX"]["con_disc"] = p.dx.con_disc_idx;
      }
      break;
    case StateDistance::Kind::Zero: j["dX"] = {{"kind", "zero"}}; break;
    case StateDistance::Kind::Table:
      j["dX"] = {{"kind", "table"}, {"rows", p.dx.rows}, {"cols", p.dx.cols},
                 {"values", p.dx.values}};
      break;
  }
  switch (p.pu.kind) {
    case InputPairing::Kind::ControlEqualDistZero: j["PU"] = {{"rule", "control-equal"}}; break;
    case InputPairing::Kind::AllWithBot: j["PU"] = {{"rule", "all-with-bot"}}; break;
    case InputPairing::Kind::IdentityFlat: j["PU"] = {{"rule", "identity"}}; break;
    case InputPairing::Kind::ExplicitPairs: j["PU"] = {{"pairs", p.pu.pairs}}; break;
  }
  switch (p.sd.kind) {
    case InputDistance::Kind::Zero: j["sd"] = {{"rule", "zero"}}; break;
    case InputDistance::Kind::DisturbanceGap:
      j["sd"] = {{"rule", "disturbance-norm"}, {"norm", to_string(p.sd.norm)}};
      break;
    case InputDistance::Kind::ConBlockDifference:
      j["sd"] = {{"rule", "block-difference"}, {"norm", to_string(p.sd.norm)},
                 {"a", p.sd.a_first}, {"b", p.sd.b_first}, {"count", p.sd.count}};
      break;
  }
  j["kappa"] = p.kappa;
  j["beta"] = p.beta;
  j["lambda"] = p.lambda;
  return j;
}

inline RelationProfile profile_from_json(const Json& j, const std::string& path = "") {
  RelationProfile p;
  std::string o = detail::at(j, "orientation", path).get<std::string>();
  if (o == "plain")
    p.orientation = Orientation::Plain;
  else if (o == "alternating")
    p.orientation = Orientation::Alternating;
  else
    throw ConfigError(path + "/orientation", "expected plain|alternating");
  const Json& jd = detail::at(j, "dX", path);
  std::string dk = detail::at(jd, "kind", path + "/dX").get<std::string>();
  if (dk == "norm") {
    p.dx = StateDistance::ball(
        detail::norm_of_string(detail::at(jd, "norm", path + "/dX").get<std::string>(), path));
    if (jd.contains("hat_coords")) {
      p.dx.hat_idx = jd["hat_coords"].get<std::vector<int>>();
      p.dx.con_idx = jd["con_coords"].get<std::vector<int>>();
      p.dx.hat_disc_idx = jd["hat_disc"].get<std::vector<int>>();
      p.dx.con_disc_idx = jd["con_disc"].get<std::vector<int>>();
    }
  } else if (dk == "zero")
    p.dx = StateDistance::zero();
  else if (dk == "table")
    p.dx = StateDistance::table(jd["rows"].get<std::size_t>(), jd["cols"].get<std::size_t>(),
                                jd["values"].get<std::vector<double>>());
  else
    throw ConfigError(path + "/dX/kind", "expected norm|zero|table");

  const Json& jp = detail::at(j, "PU", path);
  if (jp.contains("pairs"))
    p.pu = InputPairing::explicit_pairs(jp["pairs"].get<std::vector<std::pair<int, int>>>());
  else {
    std::string rule = detail::at(jp, "rule", path + "/PU").get<std::string>();
    if (rule == "control-equal")
      p.pu = InputPairing::control_equal();
    else if (rule == "all-with-bot")
      p.pu = InputPairing::all_with_bot();
    else if (rule == "identity")
      p.pu = InputPairing::identity();
    else
      throw ConfigError(path + "/PU/rule", "unknown pairing rule");
  }

  const Json& js = detail::at(j, "sd", path);
  std::string rule = detail::at(js, "rule", path + "/sd").get<std::string>();
  if (rule == "zero")
    p.sd = InputDistance::zero();
  else if (rule == "disturbance-norm")
    p.sd = InputDistance::disturbance_gap(
        detail::norm_of_string(detail::at(js, "norm", path + "/sd").get<std::string>(), path));
  else if (rule == "block-difference")
    p.sd = InputDistance::con_block_difference(
        detail::norm_of_string(detail::at(js, "norm", path + "/sd").get<std::string>(), path),
        js["a"].get<int>(), js["b"].get<int>(), js["count"].get<int>());
  else
    throw ConfigError(path + "/sd/rule", "unknown input distance rule");

  p.kappa = detail::at(j, "kappa", path).get<double>();
  p.beta = detail::at(j, "beta", path).get<double>();
  p.lambda = detail::at(j, "lambda", path).get<double>();
  return p;
}

inline Json kfunction_json(const KFunction& g) {
  switch (g.tag()) {
    case KFunction::Tag::Zero: return {{"tag", "zero"}};
    case KFunction::Tag::Linear: return {{"tag", "linear"}, {"slope", g.slope()}};
    case KFunction::Tag::Power:
      return {{"tag", "power"}, {"scale", g.slope()}, {"exponent", g.exponent()}};
    case KFunction::Tag::Table:
      return {{"tag", "table"}, {"points", g.breakpoints()}, {"final_slope", g.slope()}};
  }
  return {};
}

inline KFunction kfunction_from_json(const Json& j, const std::string& path = "") {
  std::string tag = detail::at(j, "tag", path).get<std::string>();
  if (tag == "zero") return KFunction::zero();
  if (tag == "linear") return KFunction::linear(detail::at(j, "slope", path).get<double>());
  if (tag == "power")
    return KFunction::power(detail::at(j, "scale", path).get<double>(),
                            detail::at(j, "exponent", path).get<double>());
  if (tag == "table")
    return KFunction::table(j["points"].get<std::vector<std::pair<double, double>>>(),
                            j["final_slope"].get<double>());
  throw ConfigError(path + "/tag", "unknown gain tag");
}

inline Json kld_json(const KldFunction& m) {
  switch (m.tag()) {
    case KldFunction::Tag::Zero: return {{"tag", "zero"}};
    case KldFunction::Tag::Exponential: return {{"tag", "exponential"}, {"beta_prime", m.rate()}};
    case KldFunction::Tag::LinearDecay: return {{"tag", "linear-decay"}, {"eta", m.rate()}};
    case KldFunction::Tag::Iterated:
      throw std::invalid_argument("iterated decay functions have no closed serialized form");
  }
  return {};
}

inline KldFunction kld_from_json(const Json& j, const std::string& path = "") {
  std::string tag = detail::at(j, "tag", path).get<std::string>();
  if (tag == "zero") return KldFunction::zero();
  if (tag == "exponential")
    return KldFunction::exponential(detail::at(j, "beta_prime", path).get<double>());
  if (tag == "linear-decay")
    return KldFunction::linear_decay(detail::at(j, "eta", path).get<double>());
  throw ConfigError(path + "/tag", "unknown decay tag");
}

inline Json gains_json(const CostGains& g) {
  return {{"gamma_I", kfunction_json(g.gamma_I)}, {"gamma_O", kfunction_json(g.gamma_O)}};
}

inline CostGains gains_from_json(const Json& j, const std::string& path = "") {
  return {kfunction_from_json(detail::at(j, "gamma_I", path), path + "/gamma_I"),
          kfunction_from_json(detail::at(j, "gamma_O", path), path + "/gamma_O")};
}

inline Json certificate_json(const PiodsCertificate& c) {
  return {{"gamma", kfunction_json(c.gamma)}, {"mu", kld_json(c.mu)}, {"rho", c.rho}};
}

inline PiodsCertificate certificate_from_json(const Json& j, const std::string& path = "") {
  return {kfunction_from_json(detail::at(j, "gamma", path), path + "/gamma"),
          kld_from_json(detail::at(j, "mu", path), path + "/mu"),
          detail::at(j, "rho", path).get<double>()};
}

inline Json target_json(const SynthesisTarget& t) {
  return {{"gamma", t.gamma}, {"eta", t.eta}, {"rho", t.rho}};
}

inline SynthesisTarget target_from_json(const Json& j, const std::string& path = "") {
  return {detail::at(j, "gamma", path).get<double>(), detail::at(j, "eta", path).get<double>(),
          detail::at(j, "rho", path).get<double>()};
}

/* ------------------------------------------------------------------ */
/* CSV traces                                                          */
/* ------------------------------------------------------------------ */

inline void write_trace_csv(std::ostream& os, const FiniteSystem& s, const Behavior& b) {
  os << "t,state,input,I,O\n";
  for (std::size_t t = 0; t < b.length(); ++t) {
    os << t << "," << s.states[b.xs[t]].label << "," << s.input_label(b.us[t]) << ",";
    os << (t < b.cost_I.size() ? b.cost_I[t] : 0.0) << ","
       << (t < b.cost_O.size() ? b.cost_O[t] : 0.0) << "\n";
  }
}

inline CostTrace read_costs_csv(std::istream& is) {
  CostTrace tr;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty trace file");
  /* locate the I and O columns by header name */
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  int icol = -1, ocol = -1;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "I") icol = static_cast<int>(i);
    if (cols[i] == "O") ocol = static_cast<int>(i);
  }
  if (icol < 0 || ocol < 0) throw std::runtime_error("trace file lacks I/O columns");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c;
    std::vector<std::string> vals;
    while (std::getline(ss, c, ',')) vals.push_back(c);
    tr.I.push_back(std::stod(vals[static_cast<std::size_t>(icol)]));
    tr.O.push_back(std::stod(vals[static_cast<std::size_t>(ocol)]));
  }
  return tr;
}

inline void write_run_log_csv(std::ostream& os, const TraceLog& log, std::size_t plant_dim) {
  os << "t";
  for (std::size_t i = 0; i < plant_dim; ++i) os << ",x" << i;
  os << ",x_factors,hat,level";
  for (std::size_t i = 0; i < plant_dim; ++i) os << ",uc" << i;
  for (std::size_t i = 0; i < plant_dim; ++i) os << ",ud" << i;
  os << ",factor_inputs,eps,sd,I,O,bound,margin\n";
  os.precision(17);
  for (const auto& s : log.steps) {
    os << s.t;
    for (std::size_t i = 0; i < plant_dim; ++i) os << "," << s.x.x[i];
    os << ",";
    for (std::size_t i = 0; i < s.x.factor_ids.size(); ++i)
      os << (i ? ";" : "") << s.x.factor_ids[i];
    os << "," << s.hat_state << "," << s.level;
    for (std::size_t i = 0; i < plant_dim; ++i) os << "," << (i < s.u_c.size() ? s.u_c[i] : 0.0);
    for (std::size_t i = 0; i < plant_dim; ++i) os << "," << (i < s.d.w.size() ? s.d.w[i] : 0.0);
    os << ",";
    for (std::size_t i = 0; i < s.d.factor_inputs.size(); ++i)
      os << (i ? ";" : "") << s.d.factor_inputs[i];
    os << "," << s.eps << "," << s.sd << "," << s.I << "," << s.O << "," << s.bound << ","
       << s.margin << "\n";
  }
}

inline void write_margins_csv(std::ostream& os, const MonitorReport& rep, const CostTrace& tr) {
  os << "t,I,O,rhs,margin\n";
  os.precision(17);
  for (std::size_t t = 0; t < rep.rhs.size(); ++t)
    os << t << "," << tr.I[t] << "," << tr.O[t] << "," << rep.rhs[t] << "," << rep.margins[t]
       << "\n";
}

inline Json monitor_summary_json(const MonitorReport& rep) {
  return {{"verdict", rep.holds},
          {"min_margin", rep.min_margin},
          {"argmin_t", rep.argmin_t},
          {"steps", rep.rhs.size()}};
}

inline Json verdict_json(const RelationVerdict& v) {
  Json j;
  j["holds"] = v.holds;
  j["exhaustive"] = v.exhaustive;
  j["pairs_checked"] = v.pairs_checked;
  j["obligations"] = v.obligations;
  if (v.ce) {
    j["counterexample"] = {{"clause", v.ce->clause},
                           {"abstract_state", v.ce->hat_state},
                           {"concrete_state", v.ce->con_state},
                           {"input", v.ce->input},
                           {"detail", v.ce->detail}};
  }
  return j;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  Json j;
  is >> j;
  return j;
}

inline void save_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

}  // namespace iods

#endif  // IODS_IO_HH_
