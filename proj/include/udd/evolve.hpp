#pragma once

// Time evolution of system + bath under the free Hamiltonian plus pulsed
// control, with coherence F(t) = Tr[rho(t) (P ⊗ I_bath)] sampled on a uniform
// grid over [0, T].

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "udd/algebra.hpp"
#include "udd/linalg.hpp"
#include "udd/models.hpp"
#include "udd/pulses.hpp"

namespace udd {

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> f_values;
  /// Reduced system states, one per sample; empty unless requested.
  std::vector<DensityMatrix> reduced_states;
  /// Full propagator U(T).
  Operator propagator;

  std::size_t size() const { return times.size(); }
  double final_f() const { return f_values.back(); }
  double min_f() const { return *std::min_element(f_values.begin(), f_values.end()); }
};

struct SampleOptions {
  std::size_t samples = 1000;
  bool record_reduced_states = false;
};

/// Step control for Gaussian pulses: step <= width / steps_per_width inside
/// +-window_widths * width of a pulse centre, <= T / coarse_steps elsewhere.
struct StepPolicy {
  double steps_per_width = 10.0;
  double window_widths = 8.0;
  std::size_t coarse_steps = 1000;
};

/// samples points k T / (samples - 1), k = 0..samples-1.
inline std::vector<double> uniform_grid(double total_time, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("uniform_grid: need at least two samples");
  std::vector<double> t(samples);
  for (std::size_t k = 0; k < samples; ++k)
    t[k] = total_time * static_cast<double>(k) / static_cast<double>(samples - 1);
  t.back() = total_time;
  return t;
}

// ---------------------------------------------------------------------------
// Coherence

/// Tr[rho (p ⊗ I_bath)], where the bath dimension is inferred.
inline double coherence_expectation(const Operator& rho, const Operator& p) {
  require_square(rho, "coherence_expectation");
  require_square(p, "coherence_expectation");
  if (rho.rows() % p.rows() != 0)
    throw dimension_error("coherence_expectation: system dimension does not divide state dimension");
  const Eigen::Index ds = p.rows();
  const Eigen::Index db = rho.rows() / ds;
  // Tr[rho (p ⊗ I)] = sum_{a,b} p(a,b) sum_k rho(b*db + k, a*db + k)
  cplx acc = 0.0;
  for (Eigen::Index a = 0; a < ds; ++a)
    for (Eigen::Index b = 0; b < ds; ++b) {
      if (p(a, b) == cplx(0.0)) continue;
      acc += p(a, b) * rho.block(b * db, a * db, db, db).trace();
    }
  return acc.real();
}

inline double coherence_expectation(const DensityMatrix& rho, const PolarizationOperator& p) {
  return coherence_expectation(rho.matrix(), p.op());
}

// ---------------------------------------------------------------------------
// Distance to a reference state

/// ½ ||rho_sys(t) - rho_ref||_trace per sample.
inline std::vector<double> distance_integrand(const std::vector<DensityMatrix>& states,
                                              const DensityMatrix& rho_ref) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(trace_distance(s, rho_ref));
  return out;
}

/// D = (1/2T) ∫_0^T ||rho_sys(t) - rho_ref||_trace dt by the trapezoid rule
/// on the sample grid.
inline double avg_distance(const std::vector<double>& times, const std::vector<DensityMatrix>& states,
                           const DensityMatrix& rho_ref, double total_time) {
  if (states.empty() || times.size() != states.size())
    throw std::invalid_argument("avg_distance: need one reduced state per sample time");
  if (!(total_time > 0.0)) throw std::invalid_argument("avg_distance: total time must be positive");
  const auto d = distance_integrand(states, rho_ref);
  if (d.size() == 1) return d.front();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) acc += 0.5 * (d[k] + d[k + 1]) * (times[k + 1] - times[k]);
  return acc / total_time;
}

inline double avg_distance(const TimeSeries& series, const DensityMatrix& rho_ref, double total_time) {
  return avg_distance(series.times, series.reduced_states, rho_ref, total_time);
}

namespace detail {

inline void check_evolution_inputs(const ModelInstance& model, const Operator& generator,
                                   const Operator& measure, const PulseSchedule& s,
                                   const DensityMatrix& rho0) {
  if (generator.rows() != model.system_dim() || measure.rows() != model.system_dim())
    throw dimension_error("evolve: control and measured operators must act on the system factors");
  if (rho0.dim() != model.dim())
    throw dimension_error("evolve: initial state does not match model dimension");
  if (!s.empty() && s.times().back() >= s.total_time())
    throw std::invalid_argument("evolve: schedule times outside [0, T]");
}

/// Tr[a b] without forming the product.
inline double real_trace_product(const Operator& a, const Operator& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

inline DensityMatrix reduced_state(const ModelInstance& model, const Operator& rho) {
  const auto keep = model.system_factors();
  return DensityMatrix::from_matrix(
      partial_trace(Operator(0.5 * (rho + rho.adjoint())), model.factor_dims, keep));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instantaneous pulses

/// Piecewise-exact evolution: free segments exp(-i h dt) interleaved with
/// kicks exp(-i (pi/2) g ⊗ I) at each pulse time. A sample that falls on a
/// pulse time sees the state after the kick.
///
/// Works in the eigenbasis of h so that free segments are diagonal phase
/// updates.
inline TimeSeries evolve_delta(const ModelInstance& model, const Operator& generator,
                               const Operator& measure, const PulseSchedule& s,
                               const DensityMatrix& rho0, const SampleOptions& opts = {}) {
  detail::check_evolution_inputs(model, generator, measure, s, rho0);
  const HermitianSpectrum spec(model.h_total);
  const Eigen::Index d = model.dim();

  const Operator kick = spec.to_eigenbasis(model.embed_system(kick_unitary(generator)));
  const Operator measure_eig = spec.to_eigenbasis(model.embed_system(measure));

  Operator rho = spec.to_eigenbasis(rho0.matrix());
  Operator u = identity(d);
  double now = 0.0;

  auto advance = [&](double to) {
    const double dt = to - now;
    if (dt != 0.0) {
      const Eigen::VectorXcd ph = spec.phases(dt);
      rho = (ph.asDiagonal() * rho * ph.conjugate().asDiagonal()).eval();
      u = (ph.asDiagonal() * u).eval();
    }
    now = to;
  };

  TimeSeries out;
  const auto grid = uniform_grid(s.total_time(), opts.samples);
  out.times.reserve(grid.size());
  out.f_values.reserve(grid.size());

  std::size_t next_pulse = 0;
  for (double t : grid) {
    while (next_pulse < s.size() && s[next_pulse] <= t) {
      advance(s[next_pulse]);
      rho = (kick * rho * kick.adjoint()).eval();
      u = (kick * u).eval();
      ++next_pulse;
    }
    advance(t);
    out.times.push_back(t);
    out.f_values.push_back(detail::real_trace_product(rho, measure_eig));
    if (opts.record_reduced_states)
      out.reduced_states.push_back(detail::reduced_state(model, spec.from_eigenbasis(rho)));
  }
  out.propagator = spec.from_eigenbasis(u);
  return out;
}

inline TimeSeries evolve_delta(const ModelInstance& model, const PolarizationOperator& p,
                               const PulseSchedule& s, const DensityMatrix& rho0,
                               const SampleOptions& opts = {}) {
  return evolve_delta(model, p.op(), p.op(), s, rho0, opts);
}

/// U(T) for instantaneous pulses, without sampling.
inline Operator delta_propagator(const Operator& h, const Operator& kick_full, const PulseSchedule& s) {
  const HermitianSpectrum spec(h);
  Operator u = identity(h.rows());
  const auto b = s.boundaries();
  for (std::size_t j = 0; j + 1 < b.size(); ++j) {
    if (j > 0) u = (kick_full * u).eval();
    u = (spec.propagator(b[j + 1] - b[j]) * u).eval();
  }
  return u;
}

// ---------------------------------------------------------------------------
// Gaussian pulses

namespace detail {

/// Step edges over [0, T] honouring the policy, with every sample time on an
/// edge.
inline std::vector<double> gaussian_step_edges(const PulseSchedule& s, double width,
                                               const StepPolicy& policy,
                                               const std::vector<double>& samples) {
  const double total = s.total_time();
  const double fine = width / policy.steps_per_width;
  const double coarse = total / static_cast<double>(policy.coarse_steps);
  const double half = policy.window_widths * width;

  std::vector<double> cuts(samples.begin(), samples.end());
  cuts.push_back(0.0);
  cuts.push_back(total);
  for (double tj : s.times()) {
    cuts.push_back(std::clamp(tj - half, 0.0, total));
    cuts.push_back(std::clamp(tj + half, 0.0, total));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto in_window = [&](double t) {
    for (double tj : s.times())
      if (std::abs(t - tj) <= half) return true;
    return false;
  };

  std::vector<double> edges{cuts.front()};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const double max_step = in_window(0.5 * (a + b)) ? std::min(fine, coarse) : coarse;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_step - 1e-9)));
    for (std::size_t i = 1; i < n; ++i) edges.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
    edges.push_back(b);
  }
  return edges;
}

}  // namespace detail

/// Midpoint-exponential propagation: each step applies
/// exp(-i H(t_mid) dt) with H(t) = h + (pi/2) sum_j g_c(t - T_j) g ⊗ I.
inline TimeSeries evolve_gaussian(const ModelInstance& model, const Operator& generator,
                                  const Operator& measure, const PulseSchedule& s,
                                  const PulseShape& shape, const DensityMatrix& rho0,
                                  const SampleOptions& opts = {}, const StepPolicy& policy = {}) {
  detail::check_evolution_inputs(model, generator, measure, s, rho0);
  if (!shape.is_gaussian() || !(shape.width > 0.0))
    throw std::invalid_argument("evolve_gaussian: requires a Gaussian shape with positive width");
  if (!(policy.steps_per_width > 0.0) || !(policy.window_widths > 0.0) || policy.coarse_steps == 0 ||
      2.0 * policy.window_widths * policy.steps_per_width < 2.0)
    throw std::invalid_argument("evolve_gaussian: step policy yields fewer than 2 steps per pulse");

  const HermitianSpectrum free_spec(model.h_total);
  const Operator g_full = model.embed_system(generator);
  const Operator measure_full = model.embed_system(measure);
  const double g_norm = std::max(1.0, max_abs(g_full));

  const auto grid = uniform_grid(s.total_time(), opts.samples);
  const auto edges = detail::gaussian_step_edges(s, shape.width, policy, grid);

  TimeSeries out;
  out.times.reserve(grid.size());
  out.f_values.reserve(grid.size());

  Operator u = identity(model.dim());
  std::size_t next_sample = 0;
  auto sample_if_due = [&](double t) {
    if (next_sample < grid.size() && grid[next_sample] == t) {
      const Operator rho = u * rho0.matrix() * u.adjoint();
      out.times.push_back(t);
      out.f_values.push_back(detail::real_trace_product(rho, measure_full));
      if (opts.record_reduced_states) out.reduced_states.push_back(detail::reduced_state(model, rho));
      ++next_sample;
    }
  };

  sample_if_due(edges.front());
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double dt = edges[k + 1] - edges[k];
    const double mid = 0.5 * (edges[k] + edges[k + 1]);
    const double amp = control_amplitude(s, shape, mid);
    if (amp * dt * g_norm < 1e-17) {
      u = (free_spec.propagator(dt) * u).eval();
    } else {
      const Operator h = model.h_total + amp * g_full;
      u = (expm_unitary(h, dt) * u).eval();
    }
    sample_if_due(edges[k + 1]);
  }
  if (out.size() != grid.size()) throw std::logic_error("evolve_gaussian: sample grid misaligned with steps");
  out.propagator = std::move(u);
  return out;
}

inline TimeSeries evolve_gaussian(const ModelInstance& model, const PolarizationOperator& p,
                                  const PulseSchedule& s, const PulseShape& shape,
                                  const DensityMatrix& rho0, const SampleOptions& opts = {},
                                  const StepPolicy& policy = {}) {
  return evolve_gaussian(model, p.op(), p.op(), s, shape, rho0, opts, policy);
}

/// Dispatch on the pulse shape.
inline TimeSeries evolve(const ModelInstance& model, const Operator& generator, const Operator& measure,
                         const PulseSchedule& s, const PulseShape& shape, const DensityMatrix& rho0,
                         const SampleOptions& opts = {}, const StepPolicy& policy = {}) {
  return shape.is_gaussian() ? evolve_gaussian(model, generator, measure, s, shape, rho0, opts, policy)
                             : evolve_delta(model, generator, measure, s, rho0, opts);
}

}  // namespace udd
