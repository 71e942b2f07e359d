#pragma once

// Brute-force check of the scaling identity
//   (U_-^(N))^dagger U_+^(N) = 1 + O(T^(N+1))
// for the segment products
//   U_±^(N)(T) = prod_{j=N..0} exp(-i [C ± (-1)^j Z] (T_{j+1} - T_j)),
// together with a log-log exponent fit. Nothing here touches the spin-bath
// simulator.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "udd/linalg.hpp"
#include "udd/pulses.hpp"
#include "udd/rng.hpp"

namespace udd {

inline constexpr double kFitNoiseFloor = 1e-12;
inline constexpr double kFitSaturation = 0.5;

class fit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScalingFit {
  std::vector<double> t_grid;
  std::vector<double> deviations;
  double slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
};

/// Segment product for an arbitrary schedule; sign = +1 or -1.
inline Operator build_u_pm(const Operator& c, const Operator& z, const PulseSchedule& s, int sign) {
  require_same_dim(c, z, "build_u_pm");
  if (sign != 1 && sign != -1) throw std::invalid_argument("build_u_pm: sign must be +1 or -1");
  const Operator minus = c - z;
  const Operator plus = c + z;
  const HermitianSpectrum even(sign > 0 ? plus : minus);
  const HermitianSpectrum odd(sign > 0 ? minus : plus);
  const auto b = s.boundaries();
  Operator u = identity(c.rows());
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    const double dt = b[j + 1] - b[j];
    u = ((j % 2 == 0 ? even : odd).propagator(dt) * u).eval();
  }
  return u;
}

inline Operator build_u_pm(const Operator& c, const Operator& z, int n, double total_time, int sign) {
  return build_u_pm(c, z, udd_times(n, total_time), sign);
}

/// ||U_-^dagger U_+ - I||_spectral.
inline double decoupling_deviation(const Operator& c, const Operator& z, const PulseSchedule& s) {
  const Operator prod = build_u_pm(c, z, s, -1).adjoint() * build_u_pm(c, z, s, +1);
  return norm(prod - identity(c.rows()), NormKind::spectral);
}

inline double decoupling_deviation(const Operator& c, const Operator& z, int n, double total_time) {
  return decoupling_deviation(c, z, udd_times(n, total_time));
}

/// `points` values log-spaced from t_max down to t_min.
inline std::vector<double> log_grid(double t_max, double t_min, int points) {
  if (points < 2 || !(t_min > 0.0) || !(t_max > t_min))
    throw std::invalid_argument("log_grid: need points >= 2 and 0 < t_min < t_max");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double ratio = std::log(t_min / t_max) / (points - 1);
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = t_max * std::exp(ratio * k);
  g.front() = t_max;
  g.back() = t_min;
  return g;
}

/// Least-squares slope of log(deviation) against log(T), using only points
/// with deviation inside (noise floor, saturation).
inline ScalingFit fit_scaling(std::vector<double> t_grid, std::vector<double> deviations) {
  if (t_grid.size() != deviations.size()) throw std::invalid_argument("fit_scaling: size mismatch");
  ScalingFit fit{std::move(t_grid), std::move(deviations)};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < fit.t_grid.size(); ++k) {
    const double d = fit.deviations[k];
    if (!(d > kFitNoiseFloor && d < kFitSaturation)) continue;
    const double x = std::log(fit.t_grid[k]), y = std::log(d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  fit.points_used = n;
  if (n < 3) throw fit_error("fit_scaling: fewer than 3 points between noise floor and saturation");
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw fit_error("fit_scaling: degenerate grid");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

/// Evaluates `deviation(T)` over the grid and fits the exponent.
template <class DeviationFn>
ScalingFit scaling_slope(DeviationFn&& deviation, const std::vector<double>& t_grid) {
  if (t_grid.size() < 4) throw std::invalid_argument("scaling_slope: need at least 4 grid points");
  std::vector<double> devs;
  devs.reserve(t_grid.size());
  for (double t : t_grid) devs.push_back(static_cast<double>(deviation(t)));
  return fit_scaling(t_grid, std::move(devs));
}

/// Compares the segment product with e^{-iCT} times a first-order
/// time-ordered product of exp(-i sign F_N(t) Z_I(t) dt), where
/// Z_I(t) = e^{iCt} Z e^{-iCt} is evaluated at the left end of each step.
/// Steps are distributed over the switching segments so that F_N is
/// constant on every step.
inline double interaction_picture_check(const Operator& c, const Operator& z, const PulseSchedule& s,
                                        std::size_t steps, int sign = +1) {
  require_same_dim(c, z, "interaction_picture_check");
  if (steps < s.size() + 1) throw std::invalid_argument("interaction_picture_check: too few steps");
  const double total = s.total_time();
  const HermitianSpectrum cspec(c);
  const auto b = s.boundaries();

  Operator ordered = identity(c.rows());
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    const double len = b[j + 1] - b[j];
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / total * static_cast<double>(steps))));
    const double dt = len / static_cast<double>(n);
    const double f = (j % 2 == 0 ? 1.0 : -1.0) * sign;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = b[j] + static_cast<double>(k) * dt;
      const Operator ct = cspec.propagator(-t);  // e^{iCt}
      const Operator zi = ct * z * ct.adjoint();
      ordered = (expm_unitary(Operator(0.5 * (zi + zi.adjoint())), f * dt) * ordered).eval();
    }
  }
  const Operator interaction_form = cspec.propagator(total) * ordered;
  return norm(build_u_pm(c, z, s, sign) - interaction_form, NormKind::spectral);
}

inline double interaction_picture_check(const Operator& c, const Operator& z, int n, double total_time,
                                        std::size_t steps) {
  return interaction_picture_check(c, z, udd_times(n, total_time), steps, +1);
}

/// Random Hermitian operator with unit spectral norm: entries uniform in
/// [-1, 1] + i[-1, 1] (row-major draws), symmetrized, then rescaled.
inline Operator random_unit_hermitian(Eigen::Index dim, SplitMix64& rng) {
  Operator m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      m(i, j) = cplx(re, im);
    }
  Operator h = 0.5 * (m + m.adjoint());
  return h / norm(h, NormKind::spectral);
}

/// (C, Z) for one seed: C drawn first, then Z, from the same stream.
struct HermitianPair {
  Operator c, z;
};

inline HermitianPair random_pair(Eigen::Index dim, std::uint64_t seed) {
  SplitMix64 rng(seed);
  HermitianPair p;
  p.c = random_unit_hermitian(dim, rng);
  p.z = random_unit_hermitian(dim, rng);
  return p;
}

/// Commuting pair for smoke tests: Z is a normalized polynomial in C.
inline HermitianPair commuting_pair(Eigen::Index dim, std::uint64_t seed) {
  SplitMix64 rng(seed);
  HermitianPair p;
  p.c = random_unit_hermitian(dim, rng);
  const Operator z = p.c * p.c + 0.5 * p.c;
  p.z = z / norm(z, NormKind::spectral);
  return p;
}

}  // namespace udd
