#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "udd/experiment.hpp"

using namespace udd;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(ScheduleCsv, Examples) {
  EXPECT_EQ(schedule_csv(2, 1.0, ScheduleKind::udd), "j,t_j\n1,0.25\n2,0.75\n");
  EXPECT_EQ(schedule_csv(0, 1.0, ScheduleKind::udd), "j,t_j\n");
  const auto rows = lines_of(schedule_csv(3, 0.1, ScheduleKind::udd));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1], "1,0.0146446609406726");
  EXPECT_EQ(rows[2], "2,0.05");
  EXPECT_EQ(rows[3], "3,0.0853553390593274");
  EXPECT_THROW(schedule_csv(-1, 1.0, ScheduleKind::udd), usage_error);
  EXPECT_THROW(schedule_csv(0, 1.0, ScheduleKind::periodic), usage_error);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.9999999999999999}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Config, TextParsingAndDefaults) {
  ExperimentConfig cfg;
  EXPECT_EQ(cfg.n, 8);
  EXPECT_EQ(cfg.total_time, 0.1);
  EXPECT_EQ(cfg.c_ratio, 100.0);
  EXPECT_EQ(cfg.samples, 1000u);
  apply_config_text(cfg,
                    "# comment\n"
                    "model = three_level\n"
                    "control=mlevel_v1   # trailing\n"
                    "\n"
                    "n=10\nt=0.2\npulse=delta\nseed=7\nsamples=50\ninitial=level2\nschedule=periodic\n"
                    "coupling=shared\nc_ratio=250\n");
  EXPECT_EQ(cfg.model, ModelKind::three_level);
  EXPECT_EQ(cfg.control, ControlKind::mlevel_v1);
  EXPECT_EQ(cfg.n, 10);
  EXPECT_EQ(cfg.total_time, 0.2);
  EXPECT_EQ(cfg.pulse, PulseShape::Kind::delta);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.samples, 50u);
  EXPECT_EQ(cfg.initial_state, "level2");
  EXPECT_EQ(cfg.schedule, ScheduleKind::periodic);
  EXPECT_EQ(cfg.coupling, CouplingMode::shared);
  EXPECT_EQ(cfg.c_ratio, 250.0);
  EXPECT_NO_THROW(validate(cfg));
}

TEST(Config, Errors) {
  ExperimentConfig cfg;
  EXPECT_THROW(apply_config_text(cfg, "n 3\n"), usage_error);
  EXPECT_THROW(apply_setting(cfg, "colour", "red"), usage_error);
  EXPECT_THROW(apply_setting(cfg, "n", "three"), usage_error);
  EXPECT_THROW(apply_setting(cfg, "control", "bogus"), usage_error);

  cfg = {};
  cfg.model = ModelKind::three_level;
  cfg.control = ControlKind::y1_product;
  EXPECT_THROW(validate(cfg), usage_error);
  cfg = {};
  cfg.control = ControlKind::mlevel_v1;
  EXPECT_THROW(validate(cfg), usage_error);
  cfg = {};
  cfg.initial_state = "level5";
  EXPECT_THROW(validate(cfg), usage_error);
  cfg = {};
  cfg.samples = 1;
  EXPECT_THROW(validate(cfg), usage_error);
}

TEST(Config, InitialStates) {
  ExperimentConfig cfg;
  cfg.initial_state = "0,1,1,0";
  const StateVector psi = resolve_initial_state(cfg);
  EXPECT_LT((psi - states::bell_plus()).norm(), 1e-15);
  cfg.initial_state = "1:0,0:1,0,0";
  const StateVector phi = resolve_initial_state(cfg);
  EXPECT_NEAR(std::abs(phi(1) - cplx(0, 1 / std::sqrt(2.0))), 0.0, 1e-15);
  cfg.initial_state = "1,0";
  EXPECT_THROW(resolve_initial_state(cfg), usage_error);
  cfg.initial_state = "0,0,0,0";
  EXPECT_THROW(resolve_initial_state(cfg), usage_error);
}

TEST(Simulate, HeaderAndRepeatability) {
  ExperimentConfig cfg;
  cfg.pulse = PulseShape::Kind::delta;
  cfg.samples = 25;
  cfg.n = 3;
  const std::string a = simulate_csv(cfg, true);
  const std::string b = simulate_csv(cfg, true);
  EXPECT_EQ(a, b);
  const auto rows = lines_of(a);
  ASSERT_EQ(rows.size(), 26u);
  EXPECT_EQ(rows[0], "t,F,D_integrand");
  std::istringstream first(rows[1]);
  std::string t, f, d;
  std::getline(first, t, ',');
  std::getline(first, f, ',');
  std::getline(first, d, ',');
  EXPECT_EQ(t, "0");
  EXPECT_NEAR(std::stod(f), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(d), 0.0, 1e-12);
  EXPECT_EQ(lines_of(simulate_csv(cfg, false))[0], "t,F");
}

TEST(Sweep, OrderedOutputMatchesSingleRuns) {
  ExperimentConfig cfg;
  cfg.pulse = PulseShape::Kind::delta;
  cfg.samples = 20;
  const std::vector<double> values{3, 1, 2};
  const auto pts = run_sweep(SweepParam::n, values, cfg, SweepMetric::final_f);
  ASSERT_EQ(pts.size(), 3u);
  for (std::size_t k = 0; k < values.size(); ++k) {
    EXPECT_EQ(pts[k].value, values[k]);
    ExperimentConfig one = cfg;
    one.n = static_cast<int>(values[k]);
    EXPECT_EQ(pts[k].metric, run_simulation(one, false).series.final_f());
  }
  EXPECT_EQ(lines_of(sweep_csv(SweepParam::n, values, cfg, SweepMetric::final_f))[0], "value,final_F");
  EXPECT_THROW(run_sweep(SweepParam::n, {}, cfg, SweepMetric::d_bar), usage_error);
}

TEST(Verify, CommutingSmokeIsExact) {
  VerifyOptions o;
  o.n = 1;
  o.seeds = 3;
  o.commuting_smoke = true;
  const auto rep = run_verify(o);
  EXPECT_TRUE(rep.passed);
  const auto rows = lines_of(rep.csv);
  EXPECT_EQ(rows[0], "seed,T,deviation");
  EXPECT_EQ(rows.size(), 1u + 3 * 5 + 3);
  for (std::size_t k = 1; k <= 15; ++k) EXPECT_LE(std::stod(rows[k].substr(rows[k].rfind(',') + 1)), 1e-12);
  for (std::size_t k = 16; k < rows.size(); ++k) EXPECT_EQ(rows[k].substr(rows[k].rfind(',') + 1), "exact");
}

TEST(Verify, TwoPulsesPassAndBadPointsRejected) {
  VerifyOptions o;
  o.n = 2;
  const auto rep = run_verify(o);
  EXPECT_TRUE(rep.passed) << rep.summary;
  o.points = 1;
  EXPECT_THROW(run_verify(o), usage_error);
}
