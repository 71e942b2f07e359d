#pragma once

// Experiment configuration and the CSV-producing commands behind the CLI.
// Everything returns strings so output can be compared byte for byte.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "udd/evolve.hpp"
#include "udd/models.hpp"
#include "udd/pulses.hpp"
#include "udd/verify.hpp"

namespace udd {

/// Bad configuration or arguments; the CLI maps it to exit code 2.
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Number formatting

/// Shortest representation that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::string format_double(double v, int significant) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, significant);
  return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// Configuration

enum class ModelKind { two_qubit, three_level };

struct ExperimentConfig {
  ModelKind model = ModelKind::two_qubit;
  ControlKind control = ControlKind::y1_product;
  int n = 8;
  double total_time = 0.1;
  PulseShape::Kind pulse = PulseShape::Kind::gaussian;
  double c_ratio = 100.0;  // c = T / c_ratio
  std::uint64_t seed = 42;
  std::size_t samples = 1000;
  /// Preset name (up_up, bell_plus, singlet, level0) or explicit amplitudes
  /// "a0,a1,..." with complex entries written re:im. Empty selects the
  /// model's default preset.
  std::string initial_state;
  ScheduleKind schedule = ScheduleKind::udd;
  CouplingMode coupling = CouplingMode::independent;
};

/// Seed taken from UDD_SEED when set, 42 otherwise.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("UDD_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw usage_error("UDD_SEED is not an unsigned integer: " + std::string(s));
    return v;
  }
  return 42;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const std::string t = trim(text);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw usage_error("invalid value for " + std::string(key) + ": '" + t + "'");
  return v;
}

}  // namespace detail

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "two_qubit") return ModelKind::two_qubit;
  if (s == "three_level") return ModelKind::three_level;
  throw usage_error("unknown model: " + std::string(s));
}

inline std::string to_string(ModelKind k) { return k == ModelKind::two_qubit ? "two_qubit" : "three_level"; }

/// Applies one key=value setting. Keys match the long CLI flag names.
inline void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  using detail::parse_number;
  const std::string v = detail::trim(value);
  if (key == "model") {
    cfg.model = parse_model_kind(v);
  } else if (key == "control") {
    auto k = parse_control_kind(v);
    if (!k) throw usage_error("unknown control: " + v);
    cfg.control = *k;
  } else if (key == "n") {
    cfg.n = parse_number<int>(key, v);
  } else if (key == "total_time" || key == "t") {
    cfg.total_time = parse_number<double>(key, v);
  } else if (key == "pulse") {
    if (v == "delta") cfg.pulse = PulseShape::Kind::delta;
    else if (v == "gaussian") cfg.pulse = PulseShape::Kind::gaussian;
    else throw usage_error("unknown pulse shape: " + v);
  } else if (key == "c_ratio") {
    cfg.c_ratio = parse_number<double>(key, v);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "samples") {
    cfg.samples = parse_number<std::size_t>(key, v);
  } else if (key == "initial_state" || key == "initial") {
    cfg.initial_state = v;
  } else if (key == "schedule") {
    if (v == "udd") cfg.schedule = ScheduleKind::udd;
    else if (v == "periodic") cfg.schedule = ScheduleKind::periodic;
    else throw usage_error("unknown schedule: " + v);
  } else if (key == "coupling") {
    if (v == "independent") cfg.coupling = CouplingMode::independent;
    else if (v == "shared") cfg.coupling = CouplingMode::shared;
    else throw usage_error("unknown coupling mode: " + v);
  } else {
    throw usage_error("unknown configuration key: " + std::string(key));
  }
}

/// Flat key=value text; '#' starts a comment.
inline void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw usage_error("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, detail::trim(std::string_view(t).substr(0, eq)),
                  std::string_view(t).substr(eq + 1));
  }
}

inline void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw usage_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(cfg, ss.str());
}

inline std::vector<Eigen::Index> system_dims_of(ModelKind m) {
  return m == ModelKind::two_qubit ? std::vector<Eigen::Index>{2, 2} : std::vector<Eigen::Index>{3};
}

inline StateVector resolve_initial_state(const ExperimentConfig& cfg) {
  const Eigen::Index dim = product(system_dims_of(cfg.model));
  std::string name = cfg.initial_state;
  if (name.empty()) name = cfg.model == ModelKind::two_qubit ? "up_up" : "level0";

  auto need = [&](Eigen::Index d) {
    if (dim != d) throw usage_error("initial state " + name + " does not fit model " + to_string(cfg.model));
  };
  if (name == "up_up") return need(4), states::up_up();
  if (name == "bell_plus") return need(4), states::bell_plus();
  if (name == "singlet") return need(4), states::singlet();
  if (name.rfind("level", 0) == 0 && name.size() > 5) {
    const int k = detail::parse_number<int>("initial_state", std::string_view(name).substr(5));
    if (k < 0 || k >= dim) throw usage_error("initial state level out of range: " + name);
    return basis_state(dim, k);
  }

  // Explicit amplitudes.
  std::vector<cplx> amps;
  std::string_view rest(name);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item = detail::trim(rest.substr(0, comma));
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      amps.emplace_back(detail::parse_number<double>("initial_state", item), 0.0);
    } else {
      amps.emplace_back(detail::parse_number<double>("initial_state", std::string_view(item).substr(0, colon)),
                        detail::parse_number<double>("initial_state", std::string_view(item).substr(colon + 1)));
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (static_cast<Eigen::Index>(amps.size()) != dim)
    throw usage_error("initial state needs " + std::to_string(dim) + " amplitudes");
  StateVector psi = Eigen::Map<StateVector>(amps.data(), dim);
  const double nrm = psi.norm();
  if (!(nrm > 0.0)) throw usage_error("initial state is the zero vector");
  return psi / nrm;
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 0) throw usage_error("n must be non-negative");
  if (!(cfg.total_time > 0.0) || !std::isfinite(cfg.total_time)) throw usage_error("total_time must be positive");
  if (!(cfg.c_ratio > 0.0)) throw usage_error("c_ratio must be positive");
  if (cfg.samples < 2) throw usage_error("samples must be at least 2");
  const bool two_qubit = cfg.model == ModelKind::two_qubit;
  switch (cfg.control) {
    case ControlKind::mlevel_v1:
      if (two_qubit) throw usage_error("control mlevel_v1 requires model three_level");
      break;
    case ControlKind::none: break;
    default:
      if (!two_qubit) throw usage_error("control " + to_string(cfg.control) + " requires model two_qubit");
  }
  (void)resolve_initial_state(cfg);
}

inline ModelInstance build_model(const ExperimentConfig& cfg) {
  return cfg.model == ModelKind::two_qubit ? build_two_qubit_spin_bath(cfg.seed, cfg.coupling)
                                           : build_three_level_bath(cfg.seed, cfg.coupling);
}

struct SimulationResult {
  TimeSeries series;
  StateVector initial_system_state;
  std::optional<double> d_bar;
};

/// Runs one configuration. F(t) measures the polarization of the initial
/// system state; the control only decides the kicks.
inline SimulationResult run_simulation(const ExperimentConfig& cfg, const ModelInstance& model,
                                       bool with_distance) {
  validate(cfg);
  const StateVector psi = resolve_initial_state(cfg);
  const auto measure = polarization_from_state(psi);
  const auto sys_dims = system_dims_of(cfg.model);
  const auto control = control_operator(cfg.control, sys_dims);
  const int pulses = cfg.control == ControlKind::none ? 0 : cfg.n;
  const auto schedule = make_schedule(cfg.schedule, pulses, cfg.total_time);
  const auto rho0 = model.initial_state(psi);

  SampleOptions opts{cfg.samples, with_distance};
  const PulseShape shape = cfg.pulse == PulseShape::Kind::gaussian
                               ? PulseShape::gaussian(cfg.total_time / cfg.c_ratio)
                               : PulseShape::delta();

  SimulationResult r{evolve(model, control.generator, measure.op(), schedule, shape, rho0, opts), psi, {}};
  if (with_distance)
    r.d_bar = avg_distance(r.series, DensityMatrix::pure(psi), cfg.total_time);
  return r;
}

inline SimulationResult run_simulation(const ExperimentConfig& cfg, bool with_distance) {
  validate(cfg);
  return run_simulation(cfg, build_model(cfg), with_distance);
}

// ---------------------------------------------------------------------------
// Commands

/// Rows j,t_j with 15 significant digits.
inline std::string schedule_csv(int n, double total_time, ScheduleKind kind) {
  if (n < 0) throw usage_error("schedule: n must be non-negative");
  if (!(total_time > 0.0)) throw usage_error("schedule: t must be positive");
  if (kind == ScheduleKind::periodic && n < 1) throw usage_error("schedule: periodic needs n >= 1");
  const auto s = make_schedule(kind, n, total_time);
  std::string out = "j,t_j\n";
  for (std::size_t j = 0; j < s.size(); ++j)
    out += std::to_string(j + 1) + ',' + format_double(s[j], 15) + '\n';
  return out;
}

/// t,F or t,F,D_integrand with D_integrand = ½||rho_sys(t) - rho_i||_trace.
inline std::string simulate_csv(const ExperimentConfig& cfg, bool with_distance) {
  const auto r = run_simulation(cfg, with_distance);
  std::string out = with_distance ? "t,F,D_integrand\n" : "t,F\n";
  std::vector<double> dist;
  if (with_distance) dist = distance_integrand(r.series.reduced_states, DensityMatrix::pure(r.initial_system_state));
  for (std::size_t k = 0; k < r.series.size(); ++k) {
    out += format_double(r.series.times[k]) + ',' + format_double(r.series.f_values[k]);
    if (with_distance) out += ',' + format_double(dist[k]);
    out += '\n';
  }
  return out;
}

enum class SweepParam { n, c_ratio, total_time };
enum class SweepMetric { d_bar, final_f };

inline SweepParam parse_sweep_param(std::string_view s) {
  if (s == "n") return SweepParam::n;
  if (s == "c_ratio") return SweepParam::c_ratio;
  if (s == "total_time" || s == "t") return SweepParam::total_time;
  throw usage_error("unknown sweep parameter: " + std::string(s));
}

inline SweepMetric parse_sweep_metric(std::string_view s) {
  if (s == "d_bar") return SweepMetric::d_bar;
  if (s == "final_f") return SweepMetric::final_f;
  throw usage_error("unknown sweep metric: " + std::string(s));
}

struct SweepPoint {
  double value;
  double metric;
};

/// One run per value, evaluated concurrently; results in input order.
inline std::vector<SweepPoint> run_sweep(SweepParam param, const std::vector<double>& values,
                                         const ExperimentConfig& base, SweepMetric metric) {
  if (values.empty()) throw usage_error("sweep: empty value list");
  std::vector<ExperimentConfig> configs;
  for (double v : values) {
    ExperimentConfig cfg = base;
    switch (param) {
      case SweepParam::n:
        if (v < 0 || v != std::floor(v)) throw usage_error("sweep: n values must be non-negative integers");
        cfg.n = static_cast<int>(v);
        break;
      case SweepParam::c_ratio: cfg.c_ratio = v; break;
      case SweepParam::total_time: cfg.total_time = v; break;
    }
    validate(cfg);
    configs.push_back(cfg);
  }

  const ModelInstance model = build_model(base);
  const bool distance = metric == SweepMetric::d_bar;
  std::vector<std::future<double>> jobs;
  jobs.reserve(configs.size());
  for (const auto& cfg : configs)
    jobs.push_back(std::async(std::launch::async, [&model, cfg, distance] {
      const auto r = run_simulation(cfg, model, distance);
      return distance ? *r.d_bar : r.series.final_f();
    }));

  std::vector<SweepPoint> out;
  for (std::size_t k = 0; k < jobs.size(); ++k) out.push_back({values[k], jobs[k].get()});
  return out;
}

inline std::string sweep_csv(SweepParam param, const std::vector<double>& values,
                             const ExperimentConfig& base, SweepMetric metric) {
  const auto pts = run_sweep(param, values, base, metric);
  std::string out = metric == SweepMetric::d_bar ? "value,D_bar\n" : "value,final_F\n";
  for (const auto& p : pts) out += format_double(p.value) + ',' + format_double(p.metric) + '\n';
  return out;
}

struct VerifyOptions {
  Eigen::Index dim = 4;
  int n = 2;
  int seeds = 10;
  std::uint64_t seed_base = 1;
  double t_min = 0.0125;
  double t_max = 0.2;
  int points = 5;
  ScheduleKind schedule = ScheduleKind::udd;
  bool commuting_smoke = false;
};

struct VerifyReport {
  std::string csv;
  std::string summary;
  bool passed = true;
};

/// Rows seed,T,deviation per seed, then seed,slope,<value> (or `exact` when
/// every deviation sits below the noise floor). Passes iff every slope is at
/// least n + 0.7.
inline VerifyReport run_verify(const VerifyOptions& o) {
  if (o.dim < 2) throw usage_error("verify: dim must be at least 2");
  if (o.n < 0) throw usage_error("verify: n must be non-negative");
  if (o.seeds < 1) throw usage_error("verify: seeds must be positive");
  if (o.points < 4) throw usage_error("verify: points must be at least 4");
  if (!(o.t_min > 0.0) || !(o.t_max > o.t_min)) throw usage_error("verify: need 0 < t_min < t_max");
  if (o.schedule == ScheduleKind::periodic && o.n < 1) throw usage_error("verify: periodic needs n >= 1");

  const auto grid = log_grid(o.t_max, o.t_min, o.points);
  const double threshold = o.n + 0.7;
  VerifyReport rep;
  std::string rows = "seed,T,deviation\n";
  std::string slopes;
  double worst = std::numeric_limits<double>::infinity();

  for (int k = 0; k < o.seeds; ++k) {
    const std::uint64_t seed = o.seed_base + static_cast<std::uint64_t>(k);
    const auto pair = o.commuting_smoke ? commuting_pair(o.dim, seed) : random_pair(o.dim, seed);
    std::vector<double> devs;
    for (double t : grid) {
      const double d = decoupling_deviation(pair.c, pair.z, make_schedule(o.schedule, o.n, t));
      devs.push_back(d);
      rows += std::to_string(seed) + ',' + format_double(t) + ',' + format_double(d) + '\n';
    }
    const bool floor_only =
        std::all_of(devs.begin(), devs.end(), [](double d) { return d <= kFitNoiseFloor; });
    if (floor_only) {
      slopes += std::to_string(seed) + ",slope,exact\n";
      continue;
    }
    try {
      const auto fit = fit_scaling(grid, devs);
      slopes += std::to_string(seed) + ",slope," + format_double(fit.slope) + '\n';
      worst = std::min(worst, fit.slope);
      if (fit.slope < threshold) rep.passed = false;
    } catch (const fit_error&) {
      slopes += std::to_string(seed) + ",slope,unfit\n";
      rep.passed = false;
    }
  }
  rep.csv = rows + slopes;
  rep.summary = std::string(rep.passed ? "PASS" : "FAIL") + ": " + std::to_string(o.seeds) +
                " seeds, n=" + std::to_string(o.n) + ", threshold " + format_double(threshold) +
                (std::isfinite(worst) ? ", min slope " + format_double(worst) : std::string(", all exact"));
  return rep;
}

}  // namespace udd
