#include <gtest/gtest.h>

#include <array>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "udd/algebra.hpp"
#include "udd/models.hpp"

using namespace udd;

namespace {

double max_diff(const Operator& a, const Operator& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Reference generator written out from the published splitmix64 constants.
struct ReferenceSplitMix {
  std::uint64_t x;
  std::uint64_t next() {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }
};

Operator chain(const std::vector<Operator>& ops) {
  Operator out = ops.front();
  for (std::size_t k = 1; k < ops.size(); ++k) out = oracle::kron_by_index(out, ops[k]);
  return out;
}

// Rebuilds the spin model from a freshly seeded stream in the documented
// draw order: bath single-body terms by (factor, axis), then pairs by
// (n, m > n, axis_n, axis_m).
Operator rebuild(const std::array<Operator, 3>& local, std::size_t system_factors, std::uint64_t seed) {
  const Eigen::Index d = local[0].rows();
  const std::size_t factors = 5;
  ReferenceSplitMix rng{seed};
  Operator h = Operator::Zero(static_cast<Eigen::Index>(std::pow(d, factors)), static_cast<Eigen::Index>(std::pow(d, factors)));
  for (std::size_t m = system_factors; m < factors; ++m)
    for (int a = 0; a < 3; ++a) {
      std::vector<Operator> ops(factors, identity(d));
      ops[m] = local[a];
      h += rng.uniform() * chain(ops);
    }
  for (std::size_t n = 0; n < factors; ++n)
    for (std::size_t m = n + 1; m < factors; ++m)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
          std::vector<Operator> ops(factors, identity(d));
          ops[n] = local[k];
          ops[m] = local[j];
          h += rng.uniform() * chain(ops);
        }
  return h;
}

}  // namespace

TEST(Rng, MatchesReferenceStream) {
  SplitMix64 a(0);
  EXPECT_EQ(a.next(), 0xE220A8397B1DCDAFULL);
  SplitMix64 b(42);
  ReferenceSplitMix r{42};
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(b.next(), r.next());
  SplitMix64 c(7);
  for (int k = 0; k < 1000; ++k) {
    const double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(TwoQubitModel, ShapeAndDraws) {
  const auto m = build_two_qubit_spin_bath(42);
  EXPECT_EQ(m.dim(), 32);
  EXPECT_TRUE(is_hermitian(m.h_total, 1e-12));
  EXPECT_EQ(m.coefficient_log.size(), 99u);
  EXPECT_EQ(m.system_dim(), 4);
  EXPECT_EQ(m.bath_dim(), 8);
  for (const auto& r : m.coefficient_log) {
    EXPECT_GE(r.value, 0.0);
    EXPECT_LT(r.value, 1.0);
    if (r.term == CoefficientRecord::Term::single) EXPECT_GE(r.factor_a, 2);
  }
}

TEST(TwoQubitModel, MatchesIndependentRebuild) {
  for (std::uint64_t seed : {1ULL, 42ULL}) {
    const auto m = build_two_qubit_spin_bath(seed);
    EXPECT_LT(max_diff(m.h_total, rebuild({sigma_x(), sigma_y(), sigma_z()}, 2, seed)), 1e-12);
  }
}

TEST(TwoQubitModel, SeedReproducibility) {
  const auto a = build_two_qubit_spin_bath(42), b = build_two_qubit_spin_bath(42);
  EXPECT_TRUE(a.h_total == b.h_total);
  const auto c = build_two_qubit_spin_bath(43);
  EXPECT_FALSE(a.h_total == c.h_total);
}

TEST(TwoQubitModel, SharedCouplingUsesOneTable) {
  const auto m = build_two_qubit_spin_bath(42, CouplingMode::shared);
  EXPECT_TRUE(is_hermitian(m.h_total));
  ASSERT_EQ(m.coefficient_log.size(), 99u);
  // Pair records repeat the same 3x3 table for every pair.
  for (std::size_t k = 9; k < 99; ++k) EXPECT_EQ(m.coefficient_log[k].value, m.coefficient_log[9 + (k - 9) % 9].value);
}

TEST(ThreeLevelModel, ShapeAndDraws) {
  const auto m = build_three_level_bath(42);
  EXPECT_EQ(m.dim(), 243);
  EXPECT_TRUE(is_hermitian(m.h_total, 1e-12));
  EXPECT_EQ(m.coefficient_log.size(), 102u);
  EXPECT_EQ(m.system_dim(), 3);
  EXPECT_EQ(m.bath_dim(), 81);
  const auto s = spin1_operators();
  EXPECT_LT(max_diff(m.h_total, rebuild({s.jx, s.jy, s.jz}, 1, 42)), 1e-11);
}

TEST(Models, InitialStateAndEmbedding) {
  const auto m = build_two_qubit_spin_bath(42);
  const auto rho = m.initial_state(states::bell_plus());
  const auto keep = m.system_factors();
  const auto reduced = partial_trace(rho.matrix(), m.factor_dims, keep);
  EXPECT_EQ(reduced.rows(), 4);
  EXPECT_LT(max_diff(reduced, states::bell_plus() * states::bell_plus().adjoint()), 1e-14);
  EXPECT_THROW(m.initial_state(basis_state(3, 0)), dimension_error);
  EXPECT_THROW(m.embed_system(identity(2)), dimension_error);
}

TEST(Controls, NamedOperators) {
  const std::array<Eigen::Index, 2> qubits{2, 2};
  const std::array<Eigen::Index, 1> qutrit{3};

  Operator y1 = Operator::Zero(4, 4);
  y1.diagonal() << 1, -1, -1, -1;
  EXPECT_LT(max_diff(control_operator(ControlKind::y1_product, qubits).generator, y1), 1e-15);

  const Operator swap = 0.5 * (identity(4) + kron(sigma_x(), sigma_x()) + kron(sigma_y(), sigma_y()) +
                               kron(sigma_z(), sigma_z()));
  const auto singlet = control_operator(ControlKind::bell_singlet, qubits);
  EXPECT_LT(max_diff(singlet.generator, -swap), 1e-15);
  ASSERT_TRUE(singlet.polarization.has_value());

  EXPECT_LT(max_diff(control_operator(ControlKind::bell_plus, qubits).generator, two_qubit_bell_basis()[0]), 1e-15);

  const auto single = control_operator(ControlKind::single_intuitive, qubits);
  EXPECT_FALSE(single.polarization.has_value());
  EXPECT_LT(max_diff(single.generator, kron(sigma_z(), identity(2)) + kron(identity(2), sigma_z())), 1e-15);

  Operator v1 = Operator::Zero(3, 3);
  v1.diagonal() << 1, -1, -1;
  EXPECT_LT(max_diff(control_operator(ControlKind::mlevel_v1, qutrit).generator, v1), 1e-15);

  EXPECT_THROW(control_operator(ControlKind::y1_product, qutrit), std::invalid_argument);
  EXPECT_THROW(control_operator(ControlKind::mlevel_v1, qubits), std::invalid_argument);
  EXPECT_EQ(control_operator(ControlKind::none, qutrit).generator.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Controls, NameRoundTrip) {
  for (auto k : {ControlKind::y1_product, ControlKind::bell_plus, ControlKind::bell_singlet,
                 ControlKind::single_intuitive, ControlKind::mlevel_v1, ControlKind::none})
    EXPECT_EQ(parse_control_kind(to_string(k)), k);
  EXPECT_FALSE(parse_control_kind("bogus").has_value());
}

TEST(Controls, SplitExistsForEveryPolarizationControl) {
  const auto two = build_two_qubit_spin_bath(42);
  for (auto k : {ControlKind::y1_product, ControlKind::bell_plus, ControlKind::bell_singlet}) {
    const auto c = control_operator(k, two.system_dims());
    const Operator p = two.embed_system(c.polarization->op());
    const auto s = split_hamiltonian(two.h_total, p);
    EXPECT_LT(max_diff(s.h0 + s.hp, two.h_total), 1e-12);
    EXPECT_LT(commutator(s.h0, p).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(anticommutator(s.hp, p).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto three = build_three_level_bath(42);
  const auto c = control_operator(ControlKind::mlevel_v1, three.system_dims());
  const Operator p = three.embed_system(c.polarization->op());
  const auto s = split_hamiltonian(three.h_total, p);
  EXPECT_LT(max_diff(s.h0 + s.hp, three.h_total), 1e-12);
  EXPECT_LT(commutator(s.h0, p).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT(anticommutator(s.hp, p).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(GenericHamiltonian, Examples) {
  std::array<double, 16> c{};
  c[15] = 1.0;
  EXPECT_LT(max_diff(generic_two_qubit_hamiltonian(c), kron(sigma_z(), sigma_z())), 1e-15);
  c = {};
  c[0] = 2.5;
  EXPECT_LT(max_diff(generic_two_qubit_hamiltonian(c), 2.5 * identity(4)), 1e-15);
  const std::array<double, 3> wrong{};
  EXPECT_THROW(generic_two_qubit_hamiltonian(wrong), std::invalid_argument);
}

TEST(GenericHamiltonian, CoefficientsRecoveredByTrace) {
  SplitMix64 rng(3);
  std::array<double, 16> c{};
  for (double& v : c) v = rng.uniform(-1, 1);
  const Operator h = generic_two_qubit_hamiltonian(c);
  const auto x = two_qubit_pauli_products();
  for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR((x[j] * h).trace().real() / 4.0, c[j], 1e-14);
}

TEST(CoefficientCsv, LayoutAndRoundTrip) {
  const auto m = build_two_qubit_spin_bath(42);
  std::ostringstream os;
  write_coefficient_csv(m, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "term_kind,factor_a,factor_b,axis_a,axis_b,value");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("single,2,,x,,", 0), 0u) << line;
  std::size_t rows = 1;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 99u);
  EXPECT_EQ(last.rfind("pair,3,4,z,z,", 0), 0u) << last;
  EXPECT_EQ(std::stod(last.substr(last.rfind(',') + 1)), m.coefficient_log.back().value);
}
