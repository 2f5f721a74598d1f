/*
 * iods_cli.cpp
 *
 * Command-line front end: build abstractions, compose systems, check
 * relations, synthesize and verify controllers, refine and simulate closed
 * loops, monitor traces, render plots, and run the bundled case studies.
 *
 * Exit codes: 0 pass, 1 failed verdict, 2 usage or configuration error.
 */
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "iods/abstraction.hh"
#include "iods/checkers.hh"
#include "iods/compose.hh"
#include "iods/io.hh"
#include "iods/monitor.hh"
#include "iods/parallel.hh"
#include "iods/plot.hh"
#include "iods/refine.hh"
#include "iods/scenarios.hh"
#include "iods/synthesis.hh"
#include "iods/transport.hh"

namespace fs = std::filesystem;
using namespace iods;

namespace {

struct Global {
  std::string out = ".";
  std::uint64_t seed = 20260809;
  int threads = 0;
};

std::string out_path(const Global& g, const std::string& name) {
  fs::create_directories(g.out);
  return (fs::path(g.out) / name).string();
}

GridSpec grid_from_config(const Json& j, const Box& box, Norm norm, const std::string& path) {
  Vec eta;
  const Json& je = detail::at(j, "eta", path);
  if (je.is_number())
    eta.assign(box.dim(), je.get<double>());
  else
    eta = je.get<Vec>();
  double kappa = detail::at(j, "kappa", path).get<double>();
  return GridSpec(box, eta, kappa, norm);
}

Synchronizer sync_from_config(const Json& j, const std::string& path) {
  if (j.contains("pairs")) {
    return Synchronizer::explicit_tuples(j["pairs"].get<std::vector<std::array<int, 4>>>());
  }
  if (j.contains("profile")) {
    return Synchronizer::with_profile(
        profile_from_json(load_json_file(j["profile"].get<std::string>()), path));
  }
  std::string rule = detail::at(j, "rule", path).get<std::string>();
  if (rule == "full") return Synchronizer::full_product();
  if (rule == "zero-control-when")
    return Synchronizer::zero_control_when(detail::at(j, "state", path).get<int>());
  throw ConfigError(path + "/rule", "unknown synchronizer rule " + rule);
}

SamplingSpec sampling_from_config(const Json& j, const HybridPlant& hp, const std::string& path) {
  SamplingSpec s;
  if (j.contains("state_box"))
    s.state_box = Box(j["state_box"]["lb"].get<Vec>(), j["state_box"]["ub"].get<Vec>());
  else
    s.state_box = hp.plant.domain;
  if (j.contains("resolution")) {
    const Json& jr = j["resolution"];
    if (jr.is_number())
      s.resolution.assign(hp.plant.dim(), jr.get<double>());
    else
      s.resolution = jr.get<Vec>();
  } else {
    throw ConfigError(path + "/resolution", "missing field");
  }
  if (j.contains("control_offsets")) s.control_offsets = j["control_offsets"].get<std::vector<Vec>>();
  if (j.contains("disturbance_samples"))
    s.disturbance_samples = j["disturbance_samples"].get<std::vector<Vec>>();
  else
    s.disturbance_samples = {Vec(hp.plant.dim(), 0.0)};
  return s;
}

int cmd_abstract(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  SwitchedAffinePlant plant = plant_from_json(detail::at(cfg, "plant", ""), "/plant");
  double kappa = detail::at(cfg, "kappa", "").get<double>();
  GridSpec sg = grid_from_config(detail::at(cfg, "state_grid", ""), plant.domain, plant.norm,
                                 "/state_grid");
  std::optional<GridSpec> cg;
  if (cfg.contains("control_grid")) {
    if (!plant.control_box) throw ConfigError("/control_grid", "plant has no control box");
    cg = grid_from_config(cfg["control_grid"], *plant.control_box, plant.norm, "/control_grid");
  }
  auto res = abstract_plant(plant, sg, cg, kappa);
  save_json_file(out_path(g, "abstraction.json"), costed_system_json(res.abs));
  save_json_file(out_path(g, "profile.json"), profile_json(res.profile));
  Json rep;
  rep["states"] = res.abs.sys.n_states();
  rep["contraction"] = res.contraction;
  rep["truncated_pairs"] = res.truncated.size();
  save_json_file(out_path(g, "abstract_report.json"), rep);
  std::cout << "abstraction: " << res.abs.sys.n_states() << " states, contraction "
            << res.contraction << ", " << res.truncated.size() << " truncated pairs\n";
  return 0;
}

int cmd_compose(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  CostedSystem left = costed_system_from_json(load_json_file(detail::at(cfg, "left", "")), "/left");
  CostedSystem right =
      costed_system_from_json(load_json_file(detail::at(cfg, "right", "")), "/right");
  Synchronizer sync = sync_from_config(detail::at(cfg, "synchronizer", ""), "/synchronizer");
  ComposedSystem comp = compose(left, right, sync);
  if (cfg.contains("costs")) {
    comp.cs.I = cost_model_from_json(cfg["costs"]["I"], "/costs/I");
    comp.cs.O = cost_model_from_json(cfg["costs"]["O"], "/costs/O");
  }
  save_json_file(out_path(g, "composite.json"), costed_system_json(comp.cs));
  std::cout << "composite: " << comp.cs.sys.n_states() << " states, "
            << comp.cs.sys.n_inputs() << " inputs\n";
  return 0;
}

int cmd_check_relation(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  CostedSystem hat =
      costed_system_from_json(load_json_file(detail::at(cfg, "abstract", "")), "/abstract");
  RelationProfile profile =
      profile_from_json(load_json_file(detail::at(cfg, "profile", "")), "/profile");
  CostGains gains;
  bool have_gains = cfg.contains("gains");
  if (have_gains) gains = gains_from_json(cfg["gains"], "/gains");
  CheckOptions opt;
  if (cfg.contains("pair_window")) opt.pair_window = cfg["pair_window"].get<double>();

  RelationVerdict v;
  const Json& jc = detail::at(cfg, "concrete", "");
  if (jc.contains("hybrid") || jc.contains("plant")) {
    HybridPlant hp = jc.contains("hybrid") ? hybrid_from_json(jc["hybrid"], "/concrete/hybrid")
                                           : HybridPlant{plant_from_json(jc["plant"], "/concrete"),
                                                         {}, -1, -1, CostModel::zero(),
                                                         CostModel::zero()};
    SamplingSpec spec = sampling_from_config(detail::at(jc, "sampling", "/concrete"), hp,
                                             "/concrete/sampling");
    SampledHybridSide side(hp, spec);
    v = profile.orientation == Orientation::Plain
            ? check_acsr(side, hat, profile, have_gains ? &gains : nullptr, opt)
            : check_acasr(side, hat, profile, have_gains ? &gains : nullptr, opt);
  } else {
    CostedSystem con =
        costed_system_from_json(load_json_file(detail::at(jc, "system", "/concrete")), "/concrete");
    v = profile.orientation == Orientation::Plain
            ? check_acsr(con, hat, profile, have_gains ? &gains : nullptr, opt)
            : check_acasr(con, hat, profile, have_gains ? &gains : nullptr, opt);
  }
  save_json_file(out_path(g, "verdict.json"), verdict_json(v));
  std::cout << "relation " << v.describe() << "\n";
  return v.holds ? 0 : 1;
}

int cmd_synthesize(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  CostedSystem cs =
      costed_system_from_json(load_json_file(detail::at(cfg, "system", "")), "/system");
  SynthesisTarget target = target_from_json(detail::at(cfg, "target", ""), "/target");
  auto res = synthesize(cs, target);
  Json rep;
  rep["realizable"] = res.realizable;
  rep["rounds"] = res.rounds;
  rep["positions"] = res.n_positions;
  if (!res.realizable) {
    for (int x : res.losing_initials)
      rep["losing_initials"].push_back(cs.sys.states[x].label);
    save_json_file(out_path(g, "synthesis_report.json"), rep);
    std::cout << "UNREALIZABLE: " << res.losing_initials.size() << " losing initial states\n";
    return 1;
  }
  rep["controller_states"] = res.controller.sys.n_states();
  save_json_file(out_path(g, "controller.json"), costed_system_json(res.controller));
  save_json_file(out_path(g, "controller_relation.json"), relation_json(res.controller_rel));
  save_json_file(out_path(g, "synthesis_report.json"), rep);
  std::cout << "controller: " << res.controller.sys.n_states() << " states ("
            << res.rounds << " rounds)\n";
  return 0;
}

int cmd_verify(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  CostedSystem cs =
      costed_system_from_json(load_json_file(detail::at(cfg, "system", "")), "/system");
  SynthesisTarget target = target_from_json(detail::at(cfg, "target", ""), "/target");
  auto res = verify_closed_loop(cs, target);
  Json rep;
  rep["holds"] = res.holds;
  rep["positions_explored"] = res.positions_explored;
  if (!res.holds) {
    rep["violation"] = {{"state", cs.sys.states[res.state].label},
                        {"input", cs.sys.input_label(res.input)},
                        {"output_cost", res.output_cost},
                        {"bound", res.bound}};
    for (int x : res.path_states) rep["path"].push_back(cs.sys.states[x].label);
  }
  save_json_file(out_path(g, "verify_report.json"), rep);
  std::cout << "closed loop " << (res.holds ? "holds" : "fails") << " ("
            << res.positions_explored << " positions)\n";
  return res.holds ? 0 : 1;
}

struct RefineInputs {
  HybridPlant hybrid;
  CostedSystem abstraction;
  RelationProfile profile;
  CostGains gains;
  SynthesisTarget target;
  SynthesisResult game;
  double beta_prime;
};

RefineInputs load_refine_inputs(const Json& cfg) {
  RefineInputs in;
  in.hybrid = hybrid_from_json(detail::at(cfg, "hybrid", ""), "/hybrid");
  in.abstraction =
      costed_system_from_json(load_json_file(detail::at(cfg, "abstraction", "")), "/abstraction");
  if (cfg.contains("abstract_costs")) {
    in.abstraction.I = cost_model_from_json(cfg["abstract_costs"]["I"], "/abstract_costs/I");
    in.abstraction.O = cost_model_from_json(cfg["abstract_costs"]["O"], "/abstract_costs/O");
  }
  in.profile = profile_from_json(load_json_file(detail::at(cfg, "profile", "")), "/profile");
  in.gains = gains_from_json(detail::at(cfg, "gains", ""), "/gains");
  in.target = target_from_json(detail::at(cfg, "target", ""), "/target");
  CostedSystem controller =
      costed_system_from_json(load_json_file(detail::at(cfg, "controller", "")), "/controller");
  ExplicitRelation rel =
      relation_from_json(load_json_file(detail::at(cfg, "relation", "")), "/relation");
  in.game = rebuild_game(in.abstraction, in.target, std::move(controller), std::move(rel));
  in.beta_prime = cfg.value("beta_prime", 0.5 * (1 + in.profile.beta));
  return in;
}

int cmd_refine(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  RefineInputs in = load_refine_inputs(cfg);
  RefinedController rc = refine(in.hybrid, in.abstraction, in.profile, in.gains, in.game,
                                in.target, in.beta_prime, cfg.value("abstract_I_dominated", true));
  save_json_file(out_path(g, "refined_controller.json"), costed_system_json(rc.controller.cs));
  save_json_file(out_path(g, "refined_profile.json"), profile_json(rc.refined));
  Json rep;
  rep["controller_states"] = rc.controller.cs.sys.n_states();
  rep["kappa_delta"] = rc.bound.bounds.kappa_delta;
  rep["gamma_delta"] = rc.bound.bounds.gamma_delta;
  rep["constant"] = rc.bound.constant();
  save_json_file(out_path(g, "refine_report.json"), rep);
  std::cout << "refined controller: " << rc.controller.cs.sys.n_states()
            << " composite states, transported constant " << rc.bound.constant() << "\n";
  return 0;
}

int cmd_simulate(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  RefineInputs in = load_refine_inputs(cfg);
  RefinedController rc = refine(in.hybrid, in.abstraction, in.profile, in.gains, in.game,
                                in.target, in.beta_prime, cfg.value("abstract_I_dominated", true));

  int horizon = cfg.value("horizon", 50);
  int runs = cfg.value("runs", 1);
  const Json& jd = detail::at(cfg, "disturbance", "");
  double min_margin = kInf;
  int blocked = 0;
  for (int run = 0; run < runs; ++run) {
    DisturbanceOracle oracle;
    if (jd.contains("script")) {
      std::vector<Disturbance> script;
      for (const auto& js : jd["script"]) {
        Disturbance d;
        d.w = js["w"].get<Vec>();
        if (js.contains("factors")) d.factor_inputs = js["factors"].get<std::vector<int>>();
        script.push_back(d);
      }
      oracle = scripted_oracle(script);
    } else {
      const Json& jr = detail::at(jd, "random", "/disturbance");
      oracle = random_oracle(
          in.hybrid, detail::at(jr, "bound", "/disturbance/random").get<double>(),
          in.hybrid.plant.norm, jr.value("seed", g.seed) + 977 * static_cast<std::uint64_t>(run),
          jr.value("factor_probs", std::vector<double>{}));
    }
    HybridPlant::State x0;
    x0.x = detail::at(cfg, "initial", "").get<Vec>();
    x0.factor_ids.assign(in.hybrid.factors.size(), 0);
    if (cfg.contains("initial_factors"))
      x0.factor_ids = cfg["initial_factors"].get<std::vector<int>>();
    TraceLog log = run_closed_loop(rc, x0, oracle, horizon);
    if (log.blocked) blocked++;
    for (const auto& st : log.steps) min_margin = std::min(min_margin, st.margin);
    std::ofstream os(out_path(g, "run" + std::to_string(run) + ".csv"));
    write_run_log_csv(os, log, in.hybrid.plant.dim());
  }
  Json rep;
  rep["runs"] = runs;
  rep["blocked"] = blocked;
  rep["min_margin"] = min_margin;
  save_json_file(out_path(g, "simulate_report.json"), rep);
  std::cout << "simulated " << runs << " runs, " << blocked
            << " blocked, min margin " << min_margin << "\n";
  return (blocked == 0 && min_margin >= -1e-9) ? 0 : 1;
}

int cmd_monitor(const Global& g, const std::string& config) {
  Json cfg = load_json_file(config);
  std::ifstream is(detail::at(cfg, "trace", "").get<std::string>());
  if (!is) throw ConfigError("/trace", "cannot open trace file");
  CostTrace tr = read_costs_csv(is);
  PiodsCertificate cert =
      certificate_from_json(load_json_file(detail::at(cfg, "certificate", "")), "/certificate");
  auto rep = eval_piods(tr, cert);
  {
    std::ofstream os(out_path(g, "margins.csv"));
    write_margins_csv(os, rep, tr);
  }
  Json s = monitor_summary_json(rep);
  if (cfg.value("fit", false)) {
    s["fitted_rho"] = fit_rho({tr}, cert.gamma, cert.mu);
    auto fg = fit_gamma({tr}, cert.mu, cert.rho);
    if (fg) s["fitted_gamma"] = *fg;
  }
  save_json_file(out_path(g, "monitor_summary.json"), s);
  std::cout << "monitor: " << (rep.holds ? "holds" : "fails") << ", min margin "
            << rep.min_margin << " at t=" << rep.argmin_t << "\n";
  return rep.holds ? 0 : 1;
}

int cmd_plot(const Global& g, const std::string& log_file, const std::string& out_file) {
  std::ifstream is(log_file);
  if (!is) throw std::runtime_error("cannot open " + log_file);
  std::string line;
  std::getline(is, line);
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  int ocol = -1, bcol = -1;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "O") ocol = static_cast<int>(i);
    if (cols[i] == "bound" || cols[i] == "rhs") bcol = static_cast<int>(i);
  }
  if (ocol < 0 || bcol < 0) throw std::runtime_error("log lacks O and bound/rhs columns");
  PlotSeries so{"output cost", "#c0392b", {}}, sb{"bound", "#2980b9", {}};
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c;
    std::vector<std::string> vals;
    while (std::getline(ss, c, ',')) vals.push_back(c);
    so.values.push_back(std::stod(vals[static_cast<std::size_t>(ocol)]));
    sb.values.push_back(std::stod(vals[static_cast<std::size_t>(bcol)]));
  }
  std::ofstream os(out_path(g, out_file));
  write_svg_plot(os, {so, sb}, "trace vs bound");
  std::cout << "wrote " << out_file << " (" << so.values.size() << " steps)\n";
  return 0;
}

int cmd_example(const Global& g, const std::string& which, double scale, int runs, int horizon) {
  ScenarioOptions opt;
  opt.seed = g.seed;
  if (scale > 0) opt.scale = scale;
  if (runs > 0) opt.runs = runs;
  if (horizon > 0) opt.horizon = horizon;
  std::string report;
  bool pass = false;
  if (which == "e1") {
    if (scale <= 0) opt.scale = 1;
    auto r = run_example_e1(opt);
    report = r.report;
    pass = r.pass;
    save_json_file(out_path(g, "e1_abstraction.json"), costed_system_json(r.abs.abs));
    save_json_file(out_path(g, "e1_profile.json"), profile_json(r.abs.profile));
    save_json_file(out_path(g, "e1_certificate.json"), certificate_json(r.cert));
  } else if (which == "boost") {
    if (scale <= 0) opt.scale = 20;
    auto r = run_example_boost(opt);
    report = r.report;
    pass = r.pass;
    save_json_file(out_path(g, "boost_abstraction.json"), costed_system_json(r.abs.abs));
    save_json_file(out_path(g, "boost_profile.json"), profile_json(r.abs.profile));
    if (r.game.realizable) {
      save_json_file(out_path(g, "boost_controller.json"),
                     costed_system_json(r.game.controller));
      save_json_file(out_path(g, "boost_controller_relation.json"),
                     relation_json(r.game.controller_rel));
    }
  } else if (which == "robot") {
    RobotOptions ropt;
    ropt.seed = g.seed;
    ropt.scale = scale > 0 ? scale : 4;
    if (runs > 0) ropt.runs = runs;
    ropt.horizon = horizon > 0 ? horizon : 40;
    auto r = run_example_robot(ropt);
    report = r.report;
    pass = r.pass;
    save_json_file(out_path(g, "robot_abstraction.json"), costed_system_json(r.abs123));
    save_json_file(out_path(g, "robot_profile.json"), profile_json(r.profile123));
    if (r.game.realizable) {
      save_json_file(out_path(g, "robot_controller.json"),
                     costed_system_json(r.game.controller));
      save_json_file(out_path(g, "robot_controller_relation.json"),
                     relation_json(r.game.controller_rel));
    }
  } else {
    std::cerr << "unknown example '" << which << "' (expected e1|boost|robot)\n";
    return 2;
  }
  std::cout << report;
  {
    std::ofstream os(out_path(g, which + "_report.txt"));
    os << report;
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust symbolic control toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");

  std::string config, which, logf, outf = "plot.svg";
  double scale = -1;
  int runs = -1, horizon = -1;

  auto* c_abs = app.add_subcommand("abstract", "grid abstraction of a plant");
  c_abs->add_option("--config", config)->required();
  auto* c_comp = app.add_subcommand("compose", "synchronized composition");
  c_comp->add_option("--config", config)->required();
  auto* c_chk = app.add_subcommand("check-relation", "relation checker");
  c_chk->add_option("--config", config)->required();
  auto* c_syn = app.add_subcommand("synthesize", "safety-game synthesis");
  c_syn->add_option("--config", config)->required();
  auto* c_ver = app.add_subcommand("verify", "exhaustive closed-loop check");
  c_ver->add_option("--config", config)->required();
  auto* c_ref = app.add_subcommand("refine", "controller refinement");
  c_ref->add_option("--config", config)->required();
  auto* c_sim = app.add_subcommand("simulate", "closed-loop simulation");
  c_sim->add_option("--config", config)->required();
  auto* c_mon = app.add_subcommand("monitor", "trace monitoring");
  c_mon->add_option("--config", config)->required();
  auto* c_ex = app.add_subcommand("example", "run a bundled case study");
  c_ex->add_option("name", which, "e1|boost|robot")->required();
  c_ex->add_option("--scale", scale, "grid scaling factor");
  c_ex->add_option("--runs", runs, "number of monitored runs");
  c_ex->add_option("--horizon", horizon, "steps per run");
  auto* c_plot = app.add_subcommand("plot", "render trace-vs-bound SVG");
  c_plot->add_option("--log", logf)->required();
  c_plot->add_option("--svg", outf, "output file name");

  CLI11_PARSE(app, argc, argv);
  if (g.threads > 0) thread_count() = g.threads;

  try {
    if (c_abs->parsed()) return cmd_abstract(g, config);
    if (c_comp->parsed()) return cmd_compose(g, config);
    if (c_chk->parsed()) return cmd_check_relation(g, config);
    if (c_syn->parsed()) return cmd_synthesize(g, config);
    if (c_ver->parsed()) return cmd_verify(g, config);
    if (c_ref->parsed()) return cmd_refine(g, config);
    if (c_sim->parsed()) return cmd_simulate(g, config);
    if (c_mon->parsed()) return cmd_monitor(g, config);
    if (c_ex->parsed()) return cmd_example(g, which, scale, runs, horizon);
    if (c_plot->parsed()) return cmd_plot(g, logf, outf);
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.pointer << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
