// udd: command-line front end for pulse schedules, the scaling-identity
// verifier, and spin-bath simulations.
//
// Exit codes: 0 success, 1 threshold failure (verify), 2 usage error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "udd/experiment.hpp"

namespace {

/// Experiment flags shared by simulate and sweep. Stored as strings and
/// applied on top of the config file so flags always win.
struct ExperimentFlags {
  std::string config_path;
  std::string log_coefficients;
  std::map<std::string, std::string> raw;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key=value configuration file");
    app->add_option("--log-coefficients", log_coefficients, "write the model coefficient log CSV here");
    for (const auto& [flag, key, help] : kKeys) app->add_option(flag, raw[key], help);
  }

  udd::ExperimentConfig resolve(CLI::App* app) const {
    udd::ExperimentConfig cfg;
    cfg.seed = udd::default_seed();
    if (!config_path.empty()) udd::apply_config_file(cfg, config_path);
    for (const auto& [flag, key, help] : kKeys)
      if (app->count(flag) > 0) udd::apply_setting(cfg, key, raw.at(key));
    return cfg;
  }

  void maybe_log(const udd::ExperimentConfig& cfg) const {
    if (log_coefficients.empty()) return;
    std::ofstream f(log_coefficients);
    if (!f) throw udd::usage_error("cannot write coefficient log: " + log_coefficients);
    udd::write_coefficient_csv(udd::build_model(cfg), f);
  }

  struct Key {
    std::string flag, key, help;
  };
  inline static const std::vector<Key> kKeys = {
      {"--model", "model", "two_qubit | three_level"},
      {"--control", "control", "y1_product | bell_plus | bell_singlet | single_intuitive | mlevel_v1 | none"},
      {"--n", "n", "pulse count"},
      {"--t", "total_time", "total time T"},
      {"--pulse", "pulse", "delta | gaussian"},
      {"--c-ratio", "c_ratio", "Gaussian width c = T / c_ratio"},
      {"--seed", "seed", "model seed (default: $UDD_SEED or 42)"},
      {"--samples", "samples", "uniform sample count over [0, T]"},
      {"--initial", "initial_state", "up_up | bell_plus | singlet | levelK | explicit amplitudes"},
      {"--schedule", "schedule", "udd | periodic"},
      {"--coupling", "coupling", "independent | shared pair coefficients"},
  };
};

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    if (!item.empty()) out.push_back(udd::detail::parse_number<double>("values", item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uhrig dynamical decoupling toolkit"};
  app.require_subcommand(1);

  // schedule
  auto* sched = app.add_subcommand("schedule", "print pulse times as CSV");
  int sched_n = 0;
  double sched_t = 1.0;
  std::string sched_kind = "udd";
  sched->add_option("--n", sched_n, "pulse count")->required();
  sched->add_option("--t", sched_t, "total time");
  sched->add_option("--kind", sched_kind, "udd | periodic");

  // verify
  auto* ver = app.add_subcommand("verify", "brute-force scaling check of the segment-product identity");
  udd::VerifyOptions vopt;
  vopt.seed_base = 1;
  std::string ver_schedule = "udd";
  ver->add_option("--dim", vopt.dim, "operator dimension");
  ver->add_option("--n", vopt.n, "pulse count");
  ver->add_option("--seeds", vopt.seeds, "number of random (C, Z) pairs");
  ver->add_option("--seed-base", vopt.seed_base, "first seed");
  ver->add_option("--t-min", vopt.t_min, "smallest T");
  ver->add_option("--t-max", vopt.t_max, "largest T");
  ver->add_option("--points", vopt.points, "log-spaced grid points");
  ver->add_option("--schedule", ver_schedule, "udd | periodic");
  ver->add_flag("--commuting-smoke", vopt.commuting_smoke, "use commuting pairs (deviation must vanish)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "evolve one configuration and print t,F");
  ExperimentFlags sim_flags;
  sim_flags.attach(sim);
  bool sim_distance = false;
  sim->add_flag("--distance", sim_distance, "add the D_integrand column");

  // sweep
  auto* sw = app.add_subcommand("sweep", "run one configuration per parameter value");
  ExperimentFlags sw_flags;
  sw_flags.attach(sw);
  std::string sw_param = "n", sw_values, sw_metric = "d_bar";
  sw->add_option("--param", sw_param, "n | c_ratio | total_time");
  sw->add_option("--values", sw_values, "comma-separated values")->required();
  sw->add_option("--metric", sw_metric, "d_bar | final_f");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sched->parsed()) {
      udd::ScheduleKind kind;
      if (sched_kind == "udd") kind = udd::ScheduleKind::udd;
      else if (sched_kind == "periodic") kind = udd::ScheduleKind::periodic;
      else throw udd::usage_error("unknown schedule kind: " + sched_kind);
      std::cout << udd::schedule_csv(sched_n, sched_t, kind);
      return 0;
    }
    if (ver->parsed()) {
      if (ver_schedule == "udd") vopt.schedule = udd::ScheduleKind::udd;
      else if (ver_schedule == "periodic") vopt.schedule = udd::ScheduleKind::periodic;
      else throw udd::usage_error("unknown schedule: " + ver_schedule);
      const auto rep = udd::run_verify(vopt);
      std::cout << rep.csv;
      std::cerr << rep.summary << '\n';
      return rep.passed ? 0 : 1;
    }
    if (sim->parsed()) {
      const auto cfg = sim_flags.resolve(sim);
      udd::validate(cfg);
      sim_flags.maybe_log(cfg);
      std::cout << udd::simulate_csv(cfg, sim_distance);
      return 0;
    }
    if (sw->parsed()) {
      const auto cfg = sw_flags.resolve(sw);
      udd::validate(cfg);
      sw_flags.maybe_log(cfg);
      std::cout << udd::sweep_csv(udd::parse_sweep_param(sw_param), parse_values(sw_values), cfg,
                                  udd::parse_sweep_metric(sw_metric));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
