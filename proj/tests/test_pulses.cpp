#include <gtest/gtest.h>

#include <cmath>

#include "udd/algebra.hpp"
#include "udd/models.hpp"
#include "udd/pulses.hpp"

using namespace udd;

TEST(UddTimes, ClosedForms) {
  auto s = udd_times(1, 1.0);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0], 0.5, 1e-15);

  s = udd_times(2, 1.0);
  EXPECT_NEAR(s[0], 0.25, 1e-15);
  EXPECT_NEAR(s[1], 0.75, 1e-15);

  s = udd_times(3, 1.0);
  EXPECT_NEAR(s[0], (2.0 - std::sqrt(2.0)) / 4.0, 1e-15);
  EXPECT_NEAR(s[1], 0.5, 1e-15);
  EXPECT_NEAR(s[2], (2.0 + std::sqrt(2.0)) / 4.0, 1e-15);

  EXPECT_TRUE(udd_times(0, 1.0).empty());
}

TEST(UddTimes, MirrorSymmetryUpTo64) {
  for (int n = 1; n <= 64; ++n) {
    const double t = 0.1;
    const auto s = udd_times(n, t);
    ASSERT_EQ(s.size(), static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) EXPECT_NEAR(s[j] + s[n - 1 - j], t, 1e-12) << "n=" << n << " j=" << j;
  }
}

TEST(PeriodicTimes, ClosedForms) {
  const auto s = periodic_times(4, 1.0);
  const double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(s[j], expected[j], 1e-15);
  EXPECT_THROW(periodic_times(0, 1.0), std::invalid_argument);
  EXPECT_TRUE(make_schedule(ScheduleKind::periodic, 0, 1.0).empty());
}

TEST(PeriodicTimes, CoincidesWithUddOnlyForOneAndTwoPulses) {
  for (int n : {1, 2}) {
    const auto u = udd_times(n, 2.0), p = periodic_times(n, 2.0);
    for (int j = 0; j < n; ++j) EXPECT_NEAR(u[j], p[j], 1e-14);
  }
  for (int n : {3, 4, 8}) {
    const auto u = udd_times(n, 2.0), p = periodic_times(n, 2.0);
    double gap = 0;
    for (int j = 0; j < n; ++j) gap = std::max(gap, std::abs(u[j] - p[j]));
    EXPECT_GT(gap, 1e-3) << n;
  }
}

TEST(PulseSchedule, RejectsInvalidTimes) {
  EXPECT_THROW(PulseSchedule({0.5, 0.5}, 1.0), std::invalid_argument);
  EXPECT_THROW(PulseSchedule({0.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(PulseSchedule({1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(PulseSchedule({}, 0.0), std::invalid_argument);
  EXPECT_THROW(udd_times(-1, 1.0), std::invalid_argument);
}

TEST(Switching, Examples) {
  const PulseSchedule empty({}, 1.0);
  for (double t : {0.0, 0.3, 1.0}) EXPECT_EQ(switching_function(empty, t), 1);

  const auto s = udd_times(1, 1.0);
  EXPECT_EQ(switching_function(s, 0.25), 1);
  EXPECT_EQ(switching_function(s, 0.75), -1);
  EXPECT_EQ(switching_function(s, 0.5), -1);  // right limit
  EXPECT_THROW(switching_function(s, 1.5), std::out_of_range);
  EXPECT_THROW(switching_function(s, -0.1), std::out_of_range);
}

TEST(Switching, SignChangesSitAtPulseTimes) {
  for (int n = 1; n <= 12; ++n) {
    const auto s = udd_times(n, 1.0);
    int changes = 0;
    const int steps = 20000;
    int prev = switching_function(s, 0.0);
    for (int k = 1; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      const int cur = switching_function(s, t);
      if (cur != prev) {
        ++changes;
        // A pulse lies in (t - dt, t].
        const auto j = pulses_before(s, t) - 1;
        EXPECT_GT(s[j], t - 1.0 / steps);
        EXPECT_LE(s[j], t);
      }
      prev = cur;
    }
    EXPECT_EQ(changes, n);
  }
}

TEST(Switching, UddIntegralVanishes) {
  for (int n = 1; n <= 8; ++n) EXPECT_NEAR(switching_integral(udd_times(n, 1.0)), 0.0, 1e-15) << n;
  EXPECT_NEAR(switching_integral(PulseSchedule({}, 2.0)), 2.0, 1e-15);
}

TEST(PulseUnitary, Examples) {
  const auto pz = polarization_from_state(basis_state(2, 0));
  Operator expected = Operator::Zero(2, 2);
  expected(0, 0) = -kI;
  expected(1, 1) = kI;
  EXPECT_LT((pulse_unitary(pz) - expected).cwiseAbs().maxCoeff(), 1e-15);

  const auto y1 = polarization_from_state(states::up_up());
  Operator ey1 = Operator::Zero(4, 4);
  ey1.diagonal() << 1, -1, -1, -1;
  EXPECT_LT((pulse_unitary(y1) - (-kI) * ey1).cwiseAbs().maxCoeff(), 1e-15);

  const Operator twice = pulse_unitary(y1) * pulse_unitary(y1);
  EXPECT_LT((twice + identity(4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((kick_unitary(y1.op()) - pulse_unitary(y1)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ControlField, TailAndPeak) {
  const double total = 0.1, c = total / 100;
  const auto s = udd_times(4, total);
  const auto shape = PulseShape::gaussian(c);
  const auto p = polarization_from_state(states::up_up());
  const double peak = 0.5 * kPi / (c * std::sqrt(kPi));

  // Points more than 8c from every pulse.
  for (double t : {0.0, total}) {
    bool far = true;
    for (double tj : s.times()) far = far && std::abs(t - tj) > 8 * c;
    ASSERT_TRUE(far);
    EXPECT_LT(norm(control_field(p, s, shape, t), NormKind::spectral), 1e-12 * peak);
  }

  for (std::size_t j = 0; j < s.size(); ++j) {
    double tails = 0;
    for (std::size_t k = 0; k < s.size(); ++k)
      if (k != j) tails += 0.5 * kPi * std::exp(-std::pow((s[j] - s[k]) / c, 2)) / (c * std::sqrt(kPi));
    const Operator expected = (peak + tails) * p.op();
    EXPECT_LT((control_field(p, s, shape, s[j]) - expected).cwiseAbs().maxCoeff(), 1e-12 * peak);
  }
  EXPECT_THROW(control_amplitude(s, PulseShape::delta(), 0.05), std::invalid_argument);
  EXPECT_THROW(PulseShape::gaussian(0.0), std::invalid_argument);
}

TEST(ControlField, PulseAreaApproachesHalfPi) {
  const auto s = udd_times(1, 1.0);
  for (double c : {0.05, 0.01, 0.002}) {
    // Composite Simpson over the full run.
    const int n = 200000;
    const double h = 1.0 / n;
    double acc = control_amplitude(s, PulseShape::gaussian(c), 0.0) + control_amplitude(s, PulseShape::gaussian(c), 1.0);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * control_amplitude(s, PulseShape::gaussian(c), k * h);
    EXPECT_NEAR(acc * h / 3.0, 0.5 * kPi, 1e-9) << c;
  }
}
