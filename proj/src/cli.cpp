#include "synctrans/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "synctrans/angles.hpp"
#include "synctrans/branch_tracker.hpp"
#include "synctrans/error.hpp"
#include "synctrans/io.hpp"
#include "synctrans/phase_sweep.hpp"

#ifndef SYNCTRANS_VERSION
#define SYNCTRANS_VERSION "0.0.0"
#endif

namespace synctrans {

namespace {

struct Common {
  std::string out = ".";
  std::uint64_t seed = 1;
  int threads = 0;
};

struct OscillatorOpts {
  double A = 0.9;
  double B = 2.3;
  double r = 0.5;
  double shift = 0.0;
  std::string coupling_file;

  void add(CLI::App* cmd) {
    cmd->add_option("--A", A, "Brusselator parameter A")->capture_default_str();
    cmd->add_option("--B", B, "Brusselator parameter B")->capture_default_str();
    cmd->add_option("--hmm-r", r, "second-harmonic weight of the target interaction")->capture_default_str();
    cmd->add_option("--hmm-shift", shift, "phase shift of the target interaction (rad)")->capture_default_str();
    cmd->add_option("--coupling", coupling_file, "JSON file with k1, k2, tau1, tau2 (skips the fit)");
  }
};

// Limit cycle, PRC and fitted feedback shared by the Brusselator commands.
struct Oscillator {
  BrusselatorParams params;
  LimitCycle lc;
  PhaseResponseCurve prc;
  EngineeredCoupling coupling;
};

Oscillator prepare(const OscillatorOpts& o) {
  Oscillator osc;
  osc.params = {o.A, o.B};
  try {
    osc.params.validate();
  } catch (const NumericalError& e) {
    throw ConfigError(e.what());
  }
  osc.lc = find_limit_cycle(osc.params);
  osc.prc = compute_prc(osc.lc, osc.params);
  if (!o.coupling_file.empty()) {
    osc.coupling = engineered_coupling_from_json(read_file(o.coupling_file));
  } else {
    osc.coupling = engineer_coupling(osc.prc, osc.lc, HmmTarget{o.r, o.shift, -1.0});
  }
  return osc;
}

double parse_scalar(const std::string& text, double period) {
  // a one-point grid accepts the same 'T' suffix as the grid syntax
  return parse_grid(text + ":" + text + ":1", period).front();
}

InitialCondition parse_ic(const std::string& text) {
  if (text == "in") return InitialCondition::in_phase();
  if (text == "anti") return InitialCondition::anti_phase();
  if (text.rfind("out:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double a = std::stod(text.substr(4), &used);
      if (used == text.size() - 4) return InitialCondition::out_of_phase(a);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("initial condition '" + text + "' must be in, anti or out:<alpha>");
}

std::string path_in(const Common& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

// Resolved values of the options that apply to this run: the global ones and
// those of the selected subcommand.
nlohmann::json resolved_options(const CLI::App& app, const CLI::App& sub) {
  nlohmann::json out = nlohmann::json::object();
  auto collect = [&](const CLI::App& a) {
    for (const CLI::Option* opt : a.get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config" || name == "version") continue;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        out[name] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
      } else {
        out[name] = opt->get_default_str();
      }
    }
  };
  collect(app);
  collect(sub);
  return out;
}

std::string tag_name(const std::optional<Criticality>& t) {
  return t ? std::string(to_string(*t)) : "None";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Synchronization transitions of delay-coupled oscillators"};
  app.set_version_flag("--version", SYNCTRANS_VERSION);
  app.set_config("--config", "", "TOML/INI file with option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--out", common.out, "output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "seed for sweep perturbations")->capture_default_str();
  app.add_option("--threads", common.threads, "worker threads (0 = OpenMP default)")->capture_default_str();

  // crit-map
  auto* crit = app.add_subcommand("crit-map", "criticality of the in-phase/anti-phase pitchforks over (r, s)");
  double gamma2 = 0.2, gamma3 = 0.5;
  std::string r_grid = "-0.3:0.3:121", s_grid = "-0.3:0.3:121";
  crit->add_option("--gamma2", gamma2)->capture_default_str();
  crit->add_option("--gamma3", gamma3)->capture_default_str();
  crit->add_option("--r", r_grid, "grid lo:hi:count")->capture_default_str();
  crit->add_option("--s", s_grid, "grid lo:hi:count")->capture_default_str();

  // phase-sweep
  auto* psweep = app.add_subcommand("phase-sweep", "ascending then descending pseudocontinuation in alpha");
  std::string harmonics_json;
  double ps_r = 0.12, ps_s = -0.12, ps_g2 = 0.2, ps_g3 = 0.5;
  std::string alpha_grid = "1.2:2.0:81";
  SweepProtocol proto;
  double psi_init = 0.1;
  psweep->add_option("--harmonics", harmonics_json, "coupling as JSON [{m, a, gamma}, ...]");
  psweep->add_option("--r", ps_r, "a_2 when --harmonics is absent")->capture_default_str();
  psweep->add_option("--s", ps_s, "a_3 when --harmonics is absent")->capture_default_str();
  psweep->add_option("--gamma2", ps_g2)->capture_default_str();
  psweep->add_option("--gamma3", ps_g3)->capture_default_str();
  psweep->add_option("--alpha", alpha_grid, "grid lo:hi:count")->capture_default_str();
  psweep->add_option("--settle", proto.settle_time, "time units per grid point")->capture_default_str();
  psweep->add_option("--perturbation", proto.perturbation_scale)->capture_default_str();
  psweep->add_option("--step", proto.integrator_step)->capture_default_str();
  psweep->add_option("--psi-init", psi_init)->capture_default_str();

  // bif-point
  auto* bif = app.add_subcommand("bif-point", "locate and classify pitchforks of psi = 0 or psi = pi");
  std::string base_text = "0";
  bool normalize = false;
  double tol_c = kDefaultCriticalityTol;
  bif->add_option("--harmonics", harmonics_json, "coupling as JSON [{m, a, gamma}, ...]")->required();
  bif->add_option("--base", base_text, "0 or pi")->capture_default_str()->check(CLI::IsMember({"0", "pi"}));
  bif->add_flag("--normalize", normalize, "rescale so that a_1 = 1 and gamma_1 = 0");
  bif->add_option("--tol-c", tol_c)->capture_default_str();

  // Brusselator commands
  OscillatorOpts osc_opts;
  auto* eng = app.add_subcommand("engineer", "limit cycle, PRC and fitted delayed feedback");
  osc_opts.add(eng);
  std::size_t quad_points = 512;
  eng->add_option("--points", quad_points, "quadrature points for the realized interaction")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "one run of the coupled pair");
  osc_opts.add(sim);
  double K = 0.05, alpha = kPi / 3, periods = 200, steps_per_period = 2000;
  std::string tau_text = "0.25T";
  std::size_t every = 10;
  sim->add_option("--K", K)->capture_default_str();
  sim->add_option("--tau", tau_text, "common delay; suffix T for periods")->capture_default_str();
  sim->add_option("--alpha", alpha, "initial phase lag of oscillator 2")->capture_default_str();
  sim->add_option("--periods", periods)->capture_default_str();
  sim->add_option("--steps-per-period", steps_per_period)->capture_default_str();
  sim->add_option("--every", every, "write every n-th sample")->capture_default_str();

  auto* tsweep = app.add_subcommand("tau-sweep", "quasi-static sweep of the common delay");
  osc_opts.add(tsweep);
  std::string tau_grid = "0:0.5T:51", direction = "both", ic_text = "in";
  SweepSettings sweep;
  double threshold = 0.5;
  tsweep->add_option("--K", K)->capture_default_str();
  tsweep->add_option("--tau", tau_grid, "grid lo:hi:count; suffix T for periods")->capture_default_str();
  tsweep->add_option("--direction", direction)->capture_default_str()->check(
      CLI::IsMember({"forward", "backward", "both"}));
  tsweep->add_option("--ic", ic_text, "in, anti or out:<alpha>")->capture_default_str();
  tsweep->add_option("--settle", sweep.settle_periods, "periods")->capture_default_str();
  tsweep->add_option("--tail", sweep.tail_periods, "periods")->capture_default_str();
  tsweep->add_option("--steps-per-period", sweep.steps_per_period)->capture_default_str();
  tsweep->add_option("--perturbation", sweep.perturbation)->capture_default_str();
  tsweep->add_option("--threshold", threshold, "bistability threshold (rad)")->capture_default_str();

  auto* pmap = app.add_subcommand("param-map", "attractors over (K, tau) from several initial conditions");
  osc_opts.add(pmap);
  std::string K_grid = "0.01:0.20:20";
  std::vector<std::string> ic_list{"in", "anti", "out:1.0471975511965976", "out:2.0943951023931953"};
  MapSettings map_settings;
  pmap->add_option("--K", K_grid, "grid lo:hi:count")->capture_default_str();
  pmap->add_option("--tau", tau_grid, "grid lo:hi:count; suffix T for periods")->capture_default_str();
  pmap->add_option("--ic", ic_list, "initial conditions")->capture_default_str();
  pmap->add_option("--settle", map_settings.settle_periods, "periods")->capture_default_str();
  pmap->add_option("--tail", map_settings.tail_periods, "periods")->capture_default_str();
  pmap->add_option("--steps-per-period", map_settings.steps_per_period)->capture_default_str();
  pmap->add_option("--ic-kick", map_settings.ic_kick, "phase offset added to every initial condition (rad)")
      ->capture_default_str();

  auto* fb = app.add_subcommand("feedback-sim", "delayed mean-field feedback on the uncoupled pair");
  OscillatorOpts fb_opts;
  fb->add_option("--A", fb_opts.A)->capture_default_str();
  fb->add_option("--B", fb_opts.B)->capture_default_str();
  fb->add_option("--K", K)->capture_default_str();
  fb->add_option("--tau", tau_text, "delay; suffix T for periods")->capture_default_str();
  fb->add_option("--alpha", alpha, "initial phase lag of oscillator 2")->capture_default_str();
  fb->add_option("--periods", periods)->capture_default_str();
  fb->add_option("--steps-per-period", steps_per_period)->capture_default_str();
  fb->add_option("--every", every, "write every n-th sample")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  nlohmann::json result;
  try {
    if (common.threads > 0) omp_set_num_threads(common.threads);
    std::filesystem::create_directories(common.out);

    if (crit->parsed()) {
      const auto map = criticality_map(gamma2, gamma3, parse_grid(r_grid), parse_grid(s_grid));
      CsvWriter csv(path_in(common, "crit_map.csv"), {"r", "s", "tag0", "tag_pi", "combined"});
      for (std::size_t ir = 0; ir < map.r_grid.size(); ++ir)
        for (std::size_t is = 0; is < map.s_grid.size(); ++is) {
          const auto k = map.index(ir, is);
          csv.row()
              .add(map.r_grid[ir])
              .add(map.s_grid[is])
              .add(tag_name(map.class0[k]))
              .add(tag_name(map.class_pi[k]))
              .add(to_string(map.combined[k]));
        }
    } else if (psweep->parsed()) {
      const auto c = harmonics_json.empty() ? HarmonicCoupling::three_harmonic(ps_r, ps_s, ps_g2, ps_g3)
                                            : harmonic_coupling_from_json(harmonics_json);
      proto.alpha_grid = parse_grid(alpha_grid);
      proto.rng_seed = common.seed;
      const auto up = pseudocontinuation_sweep(c, proto, psi_init);
      SweepProtocol down = proto;
      std::reverse(down.alpha_grid.begin(), down.alpha_grid.end());
      down.rng_seed = common.seed + 1;
      const auto dn = pseudocontinuation_sweep(c, down, up.back().psi_star);
      CsvWriter csv(path_in(common, "phase_sweep.csv"), {"alpha", "psi_star", "direction"});
      for (const auto& pt : up) csv.row().add(pt.alpha).add(pt.psi_star).add("ascending");
      for (const auto& pt : dn) csv.row().add(pt.alpha).add(pt.psi_star).add("descending");
    } else if (bif->parsed()) {
      const auto c = harmonic_coupling_from_json(
          harmonics_json, normalize ? HarmonicCoupling::Normalize::Yes : HarmonicCoupling::Normalize::No);
      const Base base = base_text == "pi" ? Base::Pi : Base::Zero;
      const auto roots = find_all_bifurcations(c, base, 0.0, kPi);
      const auto central = find_central_bifurcation(c, base);
      if (!central) throw NumericalError(ErrorCode::NoSignChange, "D1 has no root in (0, pi)");
      nlohmann::json all = nlohmann::json::array();
      for (const auto& r : roots) {
        auto j = nlohmann::json::parse(to_json(classify_criticality(c, base, r.alpha, tol_c), base));
        j["ill_conditioned"] = r.ill_conditioned;
        all.push_back(j);
      }
      const auto cls = classify_criticality(c, base, central->alpha, tol_c);
      auto cj = nlohmann::json::parse(to_json(cls, base));
      cj["ill_conditioned"] = central->ill_conditioned;
      write_file(path_in(common, "bif_point.json"), nlohmann::json{{"central", cj}, {"roots", all}}.dump(2) + "\n");
      std::cout << "alpha_star=" << format_double(cls.alpha_star) << " tag=" << to_string(cls.tag)
                << " d1=" << format_double(cls.d1) << " d3=" << format_double(cls.d3) << '\n';
    } else if (eng->parsed()) {
      const auto osc = prepare(osc_opts);
      const HmmTarget target{osc_opts.r, osc_opts.shift, -1.0};
      const auto gamma = validate_interaction(osc.prc, osc.lc, osc.coupling, quad_points);
      const auto err = interaction_error(gamma, target);
      write_file(path_in(common, "limit_cycle.json"), to_json(osc.lc) + "\n");
      write_file(path_in(common, "prc.json"), to_json(osc.prc) + "\n");
      write_file(path_in(common, "coupling.json"), to_json(osc.coupling) + "\n");
      CsvWriter csv(path_in(common, "interaction.csv"), {"phi", "gamma", "target"});
      for (std::size_t j = 0; j < gamma.size(); ++j) {
        const double phi = kTwoPi * static_cast<double>(j) / static_cast<double>(gamma.size());
        csv.row().add(phi).add(gamma[j]).add(target(phi));
      }
      result = {{"period", osc.lc.period},
                {"relative_l2_error", err.relative_l2},
                {"third_to_first_energy", err.third_to_first},
                {"prc_normalization_residual", osc.prc.normalization_residual}};
      std::cout << "T=" << format_double(osc.lc.period) << " coupling=" << to_json(osc.coupling)
                << " rel_l2=" << format_double(err.relative_l2) << '\n';
    } else if (sim->parsed()) {
      auto osc = prepare(osc_opts);
      const double T = osc.lc.period;
      osc.coupling.K = K;
      osc.coupling.tau = parse_scalar(tau_text, T);
      const auto res = integrate_dde(make_coupled_system(osc.params, osc.coupling),
                                     coupled_history(osc.lc, alpha), periods * T, T / steps_per_period);
      write_trajectory_csv(path_in(common, "trajectory.csv"), res.trajectory, {"x1", "y1", "x2", "y2"}, every);
      const auto stats = summarize_unchecked(res.trajectory, 0, 2);
      result = nlohmann::json::parse(to_json(stats));
      result["class"] = std::string(to_string(stats.spread <= 0.05 ? classify_psi(stats.psi) : AttractorClass::NotLocked));
      write_file(path_in(common, "summary.json"), result.dump(2) + "\n");
    } else if (tsweep->parsed()) {
      auto osc = prepare(osc_opts);
      const double T = osc.lc.period;
      osc.coupling.K = K;
      const auto grid = parse_grid(tau_grid, T);
      const auto ic = parse_ic(ic_text);
      sweep.seed = common.seed;
      std::vector<BranchSummary> rows;
      std::optional<std::vector<BranchSummary>> fw, bw;
      if (direction != "backward") fw = tau_sweep(osc.params, osc.lc, osc.coupling, grid, Direction::Forward, ic, sweep);
      if (direction != "forward") {
        SweepSettings s2 = sweep;
        s2.seed = common.seed + 1;
        bw = tau_sweep(osc.params, osc.lc, osc.coupling, grid, Direction::Backward, ic, s2);
      }
      if (fw) rows.insert(rows.end(), fw->begin(), fw->end());
      if (bw) rows.insert(rows.end(), bw->begin(), bw->end());
      write_sweep_csv(path_in(common, "tau_sweep.csv"), rows, T);
      if (fw && bw)
        write_file(path_in(common, "bistability.json"), to_json(detect_bistability(*fw, *bw, threshold)) + "\n");
    } else if (pmap->parsed()) {
      const auto osc = prepare(osc_opts);
      const double T = osc.lc.period;
      std::vector<InitialCondition> ics;
      for (const auto& t : ic_list) ics.push_back(parse_ic(t));
      const auto map = two_param_map(osc.params, osc.lc, osc.coupling, parse_grid(K_grid), parse_grid(tau_grid, T),
                                     ics, map_settings);
      write_map_csv(path_in(common, "param_map.csv"), map, T);
    } else if (fb->parsed()) {
      BrusselatorParams p{fb_opts.A, fb_opts.B};
      try {
        p.validate();
      } catch (const NumericalError& e) {
        throw ConfigError(e.what());
      }
      const auto lc = find_limit_cycle(p);
      const double T = lc.period;
      const auto traj = mean_field_feedback_sim(p, lc, K, parse_scalar(tau_text, T), periods * T, alpha, steps_per_period);
      write_trajectory_csv(path_in(common, "feedback.csv"), traj, {"x1", "y1", "x2", "y2"}, every);
      const auto stats = summarize_unchecked(traj, 0, 2);
      result = nlohmann::json::parse(to_json(stats));
      result["class"] = std::string(to_string(stats.spread <= 0.05 ? classify_psi(stats.psi) : AttractorClass::NotLocked));
      write_file(path_in(common, "summary.json"), result.dump(2) + "\n");
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const CLI::App& sub = *app.get_subcommands().front();
  nlohmann::json manifest{{"toolkit", "synctrans"},
                          {"version", SYNCTRANS_VERSION},
                          {"command", sub.get_name()},
                          {"config", resolved_options(app, sub)},
                          {"seed", common.seed},
                          {"threads", common.threads},
                          {"wall_time_s", wall}};
  if (!result.is_null()) manifest["result"] = result;
  try {
    write_file(path_in(common, "manifest.json"), manifest.dump(2) + "\n");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace synctrans
