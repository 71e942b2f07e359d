#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "udd/algebra.hpp"
#include "udd/linalg.hpp"

namespace udd {

enum class ScheduleKind { udd, periodic };

inline std::string to_string(ScheduleKind k) { return k == ScheduleKind::udd ? "udd" : "periodic"; }

/// Ordered pulse times 0 < T_1 < ... < T_N < T.
class PulseSchedule {
 public:
  PulseSchedule(std::vector<double> times, double total_time)
      : times_(std::move(times)), total_time_(total_time) {
    if (!(total_time_ > 0.0) || !std::isfinite(total_time_))
      throw std::invalid_argument("PulseSchedule: total time must be positive");
    for (std::size_t j = 0; j < times_.size(); ++j) {
      if (!(times_[j] > 0.0 && times_[j] < total_time_))
        throw std::invalid_argument("PulseSchedule: pulse time outside (0, T)");
      if (j > 0 && !(times_[j] > times_[j - 1]))
        throw std::invalid_argument("PulseSchedule: pulse times must be strictly increasing");
    }
  }

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double total_time() const { return total_time_; }
  const std::vector<double>& times() const { return times_; }
  double operator[](std::size_t j) const { return times_[j]; }

  /// Segment boundaries 0, T_1, ..., T_N, T.
  std::vector<double> boundaries() const {
    std::vector<double> b;
    b.reserve(times_.size() + 2);
    b.push_back(0.0);
    b.insert(b.end(), times_.begin(), times_.end());
    b.push_back(total_time_);
    return b;
  }

 private:
  std::vector<double> times_;
  double total_time_;
};

/// T_j = T sin^2(j pi / (2N + 2)), j = 1..N.
inline PulseSchedule udd_times(int n, double total_time) {
  if (n < 0) throw std::invalid_argument("udd_times: negative pulse count");
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    const double s = std::sin(j * kPi / (2.0 * n + 2.0));
    t.push_back(total_time * s * s);
  }
  return PulseSchedule(std::move(t), total_time);
}

/// Equidistant baseline: T_j = T (2j - 1) / (2N).
inline PulseSchedule periodic_times(int n, double total_time) {
  if (n < 1) throw std::invalid_argument("periodic_times: need at least one pulse");
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) t.push_back(total_time * (2.0 * j - 1.0) / (2.0 * n));
  return PulseSchedule(std::move(t), total_time);
}

inline PulseSchedule make_schedule(ScheduleKind kind, int n, double total_time) {
  if (kind == ScheduleKind::periodic && n == 0) return PulseSchedule({}, total_time);
  return kind == ScheduleKind::udd ? udd_times(n, total_time) : periodic_times(n, total_time);
}

/// Number of pulses applied at or before t.
inline std::size_t pulses_before(const PulseSchedule& s, double t) {
  return static_cast<std::size_t>(std::upper_bound(s.times().begin(), s.times().end(), t) -
                                  s.times().begin());
}

/// F_N(t) = (-1)^j on (T_j, T_{j+1}). At a pulse time the right limit is
/// returned.
inline int switching_function(const PulseSchedule& s, double t) {
  if (!(t >= 0.0 && t <= s.total_time()))
    throw std::out_of_range("switching_function: t outside [0, T]");
  return pulses_before(s, t) % 2 == 0 ? 1 : -1;
}

/// Exact integral of F_N over [0, T].
inline double switching_integral(const PulseSchedule& s) {
  const auto b = s.boundaries();
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < b.size(); ++j) acc += (j % 2 == 0 ? 1.0 : -1.0) * (b[j + 1] - b[j]);
  return acc;
}

// ---------------------------------------------------------------------------
// Pulse shapes

struct PulseShape {
  enum class Kind { delta, gaussian };
  Kind kind = Kind::delta;
  double width = 0.0;  // Gaussian c

  static PulseShape delta() { return {}; }
  static PulseShape gaussian(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("PulseShape: Gaussian width must be positive");
    return {Kind::gaussian, c};
  }
  bool is_gaussian() const { return kind == Kind::gaussian; }
};

/// Unit-area profile g_c(x) = exp(-x^2/c^2) / (c sqrt(pi)).
inline double gaussian_profile(double x, double c) {
  return std::exp(-(x * x) / (c * c)) / (c * std::sqrt(kPi));
}

/// Scalar envelope sum_j (pi/2) g_c(t - T_j). Tails are not renormalized
/// when they fall outside [0, T].
inline double control_amplitude(const PulseSchedule& s, const PulseShape& shape, double t) {
  if (!shape.is_gaussian())
    throw std::invalid_argument("control_amplitude: delta pulses have no finite field");
  double a = 0.0;
  for (double tj : s.times()) a += gaussian_profile(t - tj, shape.width);
  return 0.5 * kPi * a;
}

/// H_c(t) = sum_j (pi/2) g_c(t - T_j) generator.
inline Operator control_field(const Operator& generator, const PulseSchedule& s,
                              const PulseShape& shape, double t) {
  return control_amplitude(s, shape, t) * generator;
}

inline Operator control_field(const PolarizationOperator& p, const PulseSchedule& s,
                              const PulseShape& shape, double t) {
  return control_field(p.op(), s, shape, t);
}

/// exp(-i (pi/2) g) for a Hermitian pulse generator g.
inline Operator kick_unitary(const Operator& generator) { return expm_unitary(generator, 0.5 * kPi); }

/// exp(-i (pi/2) P) = -i P, exact since P^2 = I.
inline Operator pulse_unitary(const PolarizationOperator& p) { return -kI * p.op(); }

}  // namespace udd
