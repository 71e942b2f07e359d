#pragma once

// Randomized system + spin-bath Hamiltonians and the named control operators.
//
// Coefficient draw order (all uniform in [0, 1) from one SplitMix64 stream):
//   1. single-body terms, bath factors m ascending, axis x, y, z;
//   2. pair terms, n ascending, m > n ascending, axis of n, axis of m.
// In CouplingMode::shared the pair block is drawn once as a 3x3 table
// (axis of n, axis of m) and reused for every pair. Factor indices in the
// coefficient log are 0-based; factor 0 is the first system factor.

#include <array>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "udd/algebra.hpp"
#include "udd/linalg.hpp"
#include "udd/rng.hpp"

namespace udd {

enum class CouplingMode { independent, shared };

struct CoefficientRecord {
  enum class Term { single, pair };
  Term term;
  int factor_a;  // single: the factor; pair: n
  int factor_b;  // pair: m; -1 for single terms
  int axis_a;    // 0 = x, 1 = y, 2 = z
  int axis_b;    // -1 for single terms
  double value;
};

struct ModelInstance {
  std::string name;
  Operator h_total;
  std::vector<Eigen::Index> factor_dims;
  std::size_t system_factor_count = 0;
  std::uint64_t seed = 0;
  CouplingMode coupling = CouplingMode::independent;
  std::vector<CoefficientRecord> coefficient_log;

  Eigen::Index dim() const { return h_total.rows(); }

  std::span<const Eigen::Index> system_dims() const {
    return std::span<const Eigen::Index>(factor_dims).first(system_factor_count);
  }
  std::span<const Eigen::Index> bath_dims() const {
    return std::span<const Eigen::Index>(factor_dims).subspan(system_factor_count);
  }
  Eigen::Index system_dim() const { return product(system_dims()); }
  Eigen::Index bath_dim() const { return product(bath_dims()); }

  std::vector<std::size_t> system_factors() const {
    std::vector<std::size_t> out(system_factor_count);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }

  /// op ⊗ I_bath.
  Operator embed_system(const Operator& op) const {
    if (op.rows() != system_dim())
      throw dimension_error("embed_system: operator does not match system dimension");
    return kron(op, identity(bath_dim()));
  }

  /// Bath in a pure product state: every bath factor in its first basis state.
  StateVector bath_ground_state() const {
    StateVector b = StateVector::Ones(1);
    for (auto d : bath_dims()) b = kron(b, basis_state(d, 0));
    return b;
  }

  /// |psi><psi| ⊗ rho_bath with the default bath state.
  DensityMatrix initial_state(const StateVector& system_state) const {
    if (system_state.size() != system_dim())
      throw dimension_error("initial_state: state does not match system dimension");
    return DensityMatrix::pure(kron(system_state, bath_ground_state()));
  }
};

namespace detail {

/// Sum of the one- and two-body terms over factors with local operators
/// `local[axis]`; the first `system_factors` factors carry no single-body
/// field.
inline ModelInstance build_spin_model(std::string name, const std::array<Operator, 3>& local,
                                      std::size_t factors, std::size_t system_factors,
                                      std::uint64_t seed, CouplingMode mode) {
  const Eigen::Index d = local[0].rows();
  ModelInstance model;
  model.name = std::move(name);
  model.factor_dims.assign(factors, d);
  model.system_factor_count = system_factors;
  model.seed = seed;
  model.coupling = mode;

  const std::span<const Eigen::Index> dims(model.factor_dims);
  SplitMix64 rng(seed);

  // Kronecker chain with `ops` placed on the listed factors, identity elsewhere.
  auto term = [&](std::initializer_list<std::pair<std::size_t, const Operator*>> ops) {
    std::vector<Operator> chain(factors, identity(d));
    for (const auto& [f, op] : ops) chain[f] = *op;
    return kron_all(chain);
  };

  const Eigen::Index dim = product(dims);
  Operator h = Operator::Zero(dim, dim);

  for (std::size_t m = system_factors; m < factors; ++m)
    for (int a = 0; a < 3; ++a) {
      const double b = rng.uniform();
      model.coefficient_log.push_back({CoefficientRecord::Term::single, static_cast<int>(m), -1, a, -1, b});
      h += b * term({{m, &local[a]}});
    }

  std::array<std::array<double, 3>, 3> shared{};
  if (mode == CouplingMode::shared)
    for (auto& row : shared)
      for (auto& c : row) c = rng.uniform();

  for (std::size_t n = 0; n < factors; ++n)
    for (std::size_t m = n + 1; m < factors; ++m)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
          const double c = mode == CouplingMode::shared ? shared[k][j] : rng.uniform();
          model.coefficient_log.push_back(
              {CoefficientRecord::Term::pair, static_cast<int>(n), static_cast<int>(m), k, j, c});
          h += c * term({{n, &local[k]}, {m, &local[j]}});
        }

  model.h_total = 0.5 * (h + h.adjoint());
  return model;
}

}  // namespace detail

/// Two qubits (factors 0, 1) coupled to three bath spins (factors 2..4);
/// dimension 32. The qubits carry no external field.
inline ModelInstance build_two_qubit_spin_bath(std::uint64_t seed,
                                               CouplingMode mode = CouplingMode::independent) {
  return detail::build_spin_model("two_qubit", {sigma_x(), sigma_y(), sigma_z()}, 5, 2, seed, mode);
}

/// One spin-1 system (factor 0) coupled to four spin-1 bath factors;
/// dimension 243.
inline ModelInstance build_three_level_bath(std::uint64_t seed,
                                            CouplingMode mode = CouplingMode::independent) {
  const auto s = spin1_operators();
  return detail::build_spin_model("three_level", {s.jx, s.jy, s.jz}, 5, 1, seed, mode);
}

inline void write_coefficient_csv(const ModelInstance& model, std::ostream& os) {
  static constexpr const char* axis[] = {"x", "y", "z"};
  os << "term_kind,factor_a,factor_b,axis_a,axis_b,value\n";
  char buf[32];
  for (const auto& r : model.coefficient_log) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g", r.value);
    if (r.term == CoefficientRecord::Term::single)
      os << "single," << r.factor_a << ",," << axis[r.axis_a] << ",,";
    else
      os << "pair," << r.factor_a << ',' << r.factor_b << ',' << axis[r.axis_a] << ','
         << axis[r.axis_b] << ',';
    os.write(buf, len);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Two-qubit generic Hamiltonian

/// sum_i coeffs[i] X_i over the Pauli products X_{4k+l} = sigma_k ⊗ sigma_l.
inline Operator generic_two_qubit_hamiltonian(std::span<const double> coeffs) {
  if (coeffs.size() != 16)
    throw std::invalid_argument("generic_two_qubit_hamiltonian: expected 16 coefficients");
  const auto basis = two_qubit_pauli_products();
  Operator h = Operator::Zero(4, 4);
  for (std::size_t i = 0; i < 16; ++i) h += coeffs[i] * basis[i];
  return h;
}

// ---------------------------------------------------------------------------
// Named states and controls

namespace states {

inline StateVector up_up() { return basis_state(4, 0); }

/// (|ud> + |du>)/sqrt(2)
inline StateVector bell_plus() {
  StateVector v = StateVector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

/// (|ud> - |du>)/sqrt(2)
inline StateVector singlet() {
  StateVector v = StateVector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

inline StateVector level(int m, int k) { return basis_state(m, k); }

}  // namespace states

enum class ControlKind { y1_product, bell_plus, bell_singlet, single_intuitive, mlevel_v1, none };

inline std::string to_string(ControlKind k) {
  switch (k) {
    case ControlKind::y1_product: return "y1_product";
    case ControlKind::bell_plus: return "bell_plus";
    case ControlKind::bell_singlet: return "bell_singlet";
    case ControlKind::single_intuitive: return "single_intuitive";
    case ControlKind::mlevel_v1: return "mlevel_v1";
    case ControlKind::none: return "none";
  }
  return "unknown";
}

inline std::optional<ControlKind> parse_control_kind(std::string_view s) {
  for (auto k : {ControlKind::y1_product, ControlKind::bell_plus, ControlKind::bell_singlet,
                 ControlKind::single_intuitive, ControlKind::mlevel_v1, ControlKind::none})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Pulse generator g on the system factors; each pulse is exp(-i (pi/2) g).
/// `polarization` is set when g is itself a polarization operator.
struct ControlOperator {
  ControlKind kind;
  Operator generator;
  std::optional<PolarizationOperator> polarization;
};

/// `target` selects the protected level for mlevel_v1 and is ignored
/// otherwise.
inline ControlOperator control_operator(ControlKind kind, std::span<const Eigen::Index> system_dims,
                                        int target = 0) {
  const bool two_qubit = system_dims.size() == 2 && system_dims[0] == 2 && system_dims[1] == 2;
  auto need_two_qubit = [&] {
    if (!two_qubit)
      throw std::invalid_argument("control_operator: " + to_string(kind) + " requires two qubits");
  };
  switch (kind) {
    case ControlKind::y1_product: {
      need_two_qubit();
      auto p = polarization_from_state(states::up_up());
      return {kind, p.op(), p};
    }
    case ControlKind::bell_plus: {
      need_two_qubit();
      auto p = polarization_from_state(states::bell_plus());
      return {kind, p.op(), p};
    }
    case ControlKind::bell_singlet: {
      need_two_qubit();
      auto p = polarization_from_state(states::singlet());
      return {kind, p.op(), p};
    }
    case ControlKind::single_intuitive:
      need_two_qubit();
      return {kind, kron(sigma_z(), identity(2)) + kron(identity(2), sigma_z()), std::nullopt};
    case ControlKind::mlevel_v1: {
      if (system_dims.size() != 1 || system_dims[0] < 2)
        throw std::invalid_argument("control_operator: mlevel_v1 requires a single M-level system");
      const int m = static_cast<int>(system_dims[0]);
      if (target < 0 || target >= m) throw std::out_of_range("control_operator: target out of range");
      auto p = polarization_from_state(states::level(m, target));
      return {kind, p.op(), p};
    }
    case ControlKind::none: {
      const Eigen::Index d = product(system_dims);
      return {kind, Operator::Zero(d, d), std::nullopt};
    }
  }
  throw std::invalid_argument("control_operator: unknown kind");
}

}  // namespace udd
