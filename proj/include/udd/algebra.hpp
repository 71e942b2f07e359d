#pragma once

// Polarization operators, the commuting / anticommuting operator bases built
// around them, and the Hamiltonian split H = H0 + H' with [H0, P] = 0 and
// {H', P} = 0.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "udd/linalg.hpp"

namespace udd {

/// P = 2|psi><psi| - I for a normalized |psi>. An involution with the single
/// +1 eigenvector |psi>.
class PolarizationOperator {
 public:
  const Operator& op() const { return op_; }
  const StateVector& target() const { return target_; }
  Eigen::Index dim() const { return op_.rows(); }

  friend PolarizationOperator polarization_from_state(const StateVector& psi);

 private:
  PolarizationOperator(Operator op, StateVector target)
      : op_(std::move(op)), target_(std::move(target)) {}
  Operator op_;
  StateVector target_;
};

inline PolarizationOperator polarization_from_state(const StateVector& psi) {
  if (psi.size() < 1) throw std::invalid_argument("polarization_from_state: empty state");
  if (std::abs(psi.norm() - 1.0) > kAlgebraTol)
    throw std::invalid_argument("polarization_from_state: state is not normalized");
  Operator op = 2.0 * psi * psi.adjoint() - identity(psi.size());
  // Symmetrize so the Hermitian invariant holds to the last bit.
  op = 0.5 * (op + op.adjoint()).eval();
  return PolarizationOperator(std::move(op), psi);
}

/// Hermitian operator basis split by its relation to a polarization operator:
/// `commutes[k]` is true when elements[k] commutes with `polarization`, false
/// when it anticommutes.
struct OperatorBasis {
  std::vector<Operator> elements;
  std::vector<bool> commutes;
  std::vector<std::string> labels;
  Operator polarization;

  std::size_t size() const { return elements.size(); }
  Eigen::Index dim() const { return polarization.rows(); }

  const Operator& operator[](std::size_t k) const { return elements[k]; }

  void add(std::string label, Operator element, bool commuting) {
    labels.push_back(std::move(label));
    elements.push_back(std::move(element));
    commutes.push_back(commuting);
  }
};

/// Gram matrix G_jk = Tr(A_j^dagger A_k) of the vectorized elements.
inline Operator gram_matrix(const std::vector<Operator>& elements) {
  const auto n = static_cast<Eigen::Index>(elements.size());
  Operator g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      g(j, k) = (elements[j].adjoint() * elements[k]).trace();
  return g;
}

/// Full rank when every singular value of the Gram matrix exceeds
/// `threshold` times the largest one.
inline bool linearly_independent(const std::vector<Operator>& elements, double threshold = 1e-8) {
  if (elements.empty()) return false;
  const Eigen::VectorXd s = singular_values(gram_matrix(elements));
  return s(s.size() - 1) > threshold * s(0);
}

/// Coefficients w with h = sum_k w_k elements[k]. Solved through the Gram
/// system; for a Hermitian h over a Hermitian basis the w_k are real up to
/// roundoff.
inline Eigen::VectorXcd expand_in_basis(const Operator& h, const std::vector<Operator>& elements) {
  if (elements.empty()) throw std::invalid_argument("expand_in_basis: empty basis");
  const auto n = static_cast<Eigen::Index>(elements.size());
  Eigen::VectorXcd rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    require_same_dim(h, elements[j], "expand_in_basis");
    rhs(j) = (elements[j].adjoint() * h).trace();
  }
  return gram_matrix(elements).fullPivLu().solve(rhs);
}

inline Operator combine(const Eigen::VectorXcd& w, const std::vector<Operator>& elements) {
  Operator out = Operator::Zero(elements.front().rows(), elements.front().cols());
  for (Eigen::Index k = 0; k < w.size(); ++k) out += w(k) * elements[static_cast<std::size_t>(k)];
  return out;
}

// ---------------------------------------------------------------------------
// Two-qubit bases. Computational states |0> = |uu>, |1> = |ud>, |2> = |du>,
// |3> = |dd>.

/// X_{4k+l} = sigma_k ⊗ sigma_l, k, l in {I, x, y, z}. Labels are "IZ", "XY", ...
inline std::vector<Operator> two_qubit_pauli_products() {
  std::vector<Operator> out;
  out.reserve(16);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) out.push_back(kron(pauli(k), pauli(l)));
  return out;
}

inline std::string pauli_product_label(int index) {
  static constexpr char names[] = {'I', 'X', 'Y', 'Z'};
  return {names[index / 4], names[index % 4]};
}

namespace detail {

/// |k><l| + |l><k|
inline Operator sym_pair(Eigen::Index dim, Eigen::Index k, Eigen::Index l) {
  return ket_bra(dim, k, l) + ket_bra(dim, l, k);
}

/// -i|k><l| + i|l><k|
inline Operator asym_pair(Eigen::Index dim, Eigen::Index k, Eigen::Index l) {
  return -kI * ket_bra(dim, k, l) + kI * ket_bra(dim, l, k);
}

inline Operator projector(Eigen::Index dim, Eigen::Index k) { return ket_bra(dim, k, k); }

/// sigma_a^1 sigma_b^2 with a, b in {0: I, 1: x, 2: y, 3: z}.
inline Operator pp(int a, int b) { return kron(pauli(a), pauli(b)); }

}  // namespace detail

/// Y1..Y16 built around |0> = |uu>. Y1..Y10 commute with Y1, Y11..Y16
/// anticommute.
inline OperatorBasis two_qubit_y_basis() {
  using detail::asym_pair;
  using detail::projector;
  using detail::sym_pair;
  constexpr Eigen::Index d = 4;
  const Operator p0 = projector(d, 0), p1 = projector(d, 1), p2 = projector(d, 2),
                 p3 = projector(d, 3);

  OperatorBasis b;
  b.polarization = 2.0 * p0 - identity(d);
  b.add("Y1", b.polarization, true);
  b.add("Y2", p0 + p1, true);
  b.add("Y3", p0 - p1 + 2.0 * p2, true);
  b.add("Y4", p0 - p1 - p2 + 3.0 * p3, true);
  b.add("Y5", sym_pair(d, 1, 3), true);
  b.add("Y6", asym_pair(d, 1, 3), true);
  b.add("Y7", sym_pair(d, 2, 3), true);
  b.add("Y8", asym_pair(d, 2, 3), true);
  b.add("Y9", sym_pair(d, 1, 2), true);
  b.add("Y10", asym_pair(d, 1, 2), true);
  b.add("Y11", sym_pair(d, 0, 1), false);
  b.add("Y12", asym_pair(d, 0, 1), false);
  b.add("Y13", sym_pair(d, 0, 2), false);
  b.add("Y14", asym_pair(d, 0, 2), false);
  b.add("Y15", sym_pair(d, 0, 3), false);
  b.add("Y16", asym_pair(d, 0, 3), false);
  return b;
}

/// Ỹ1..Ỹ16 built around the Bell state (|ud> + |du>)/sqrt(2). The commuting
/// block Ỹ2..Ỹ10 is one valid choice, reproduced as published.
inline OperatorBasis two_qubit_bell_basis() {
  using detail::pp;
  const Operator id = identity(4);
  const Operator xx = pp(1, 1), yy = pp(2, 2), zz = pp(3, 3);

  OperatorBasis b;
  b.polarization = 0.5 * (-id + xx + yy - zz);
  b.add("~Y1", b.polarization, true);
  b.add("~Y2", 0.5 * (id + xx), true);
  b.add("~Y3", 0.5 * (id - xx + 2.0 * yy), true);
  b.add("~Y4", 0.5 * (id - xx - yy - 3.0 * zz), true);
  b.add("~Y5", 0.5 * (pp(3, 1) - pp(1, 3)), true);
  b.add("~Y6", 0.5 * (pp(0, 2) - pp(2, 0)), true);
  b.add("~Y7", 0.5 * (pp(0, 1) - pp(1, 0)), true);
  b.add("~Y8", -0.5 * (pp(2, 3) - pp(3, 2)), true);
  b.add("~Y9", 0.5 * (pp(3, 0) + pp(0, 3)), true);
  b.add("~Y10", -0.5 * (pp(1, 2) + pp(2, 1)), true);
  b.add("~Y11", 0.5 * (pp(1, 0) + pp(0, 1)), false);
  b.add("~Y12", -0.5 * (pp(2, 3) + pp(3, 2)), false);
  b.add("~Y13", 0.5 * (pp(1, 3) + pp(3, 1)), false);
  b.add("~Y14", -0.5 * (pp(2, 0) + pp(0, 2)), false);
  b.add("~Y15", 0.5 * (pp(3, 0) - pp(0, 3)), false);
  b.add("~Y16", 0.5 * (pp(1, 2) - pp(2, 1)), false);
  return b;
}

/// M^2 Hermitian operators around |target> of an M-level system:
///   V1            = 2 P_t - I
///   V2..VM        = diagonal combinations P_t - P_1 - ... + (k-1) P_{k-1}
///   off-diagonal  |k><l| + h.c., -i|k><l| + h.c. for k < l, both != target (commute)
///   tail          |t><l| + h.c., -i|t><l| + h.c. for every l != target (anticommute)
/// Levels are relabelled so the target plays the role of level 0; with
/// target = 0 the ordering is the published one.
inline OperatorBasis mlevel_v_basis(int m, int target = 0) {
  if (m < 2) throw std::invalid_argument("mlevel_v_basis: need at least two levels");
  if (target < 0 || target >= m) throw std::out_of_range("mlevel_v_basis: target out of range");

  const Eigen::Index d = m;
  // order[0] is the target, the rest ascending.
  std::vector<Eigen::Index> order{target};
  for (Eigen::Index k = 0; k < d; ++k)
    if (k != target) order.push_back(k);
  auto proj = [&](Eigen::Index r) { return detail::projector(d, order[r]); };

  OperatorBasis b;
  int label = 1;
  auto next = [&label] { return "V" + std::to_string(label++); };

  b.polarization = 2.0 * proj(0) - identity(d);
  b.add(next(), b.polarization, true);

  for (Eigen::Index k = 2; k <= d; ++k) {
    Operator v = proj(0);
    for (Eigen::Index r = 1; r + 1 < k; ++r) v -= proj(r);
    v += static_cast<double>(k - 1) * proj(k - 1);
    b.add(next(), std::move(v), true);
  }

  for (Eigen::Index k = 1; k < d; ++k)
    for (Eigen::Index l = k + 1; l < d; ++l) {
      b.add(next(), detail::sym_pair(d, order[k], order[l]), true);
      b.add(next(), detail::asym_pair(d, order[k], order[l]), true);
    }

  for (Eigen::Index l = 1; l < d; ++l) {
    b.add(next(), detail::sym_pair(d, order[0], order[l]), false);
    b.add(next(), detail::asym_pair(d, order[0], order[l]), false);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Spin-1 operators in the j_z eigenbasis (m = +1, 0, -1).

struct Spin1Operators {
  Operator jx, jy, jz, jplus, jminus;
  /// V[0] is V1, ..., V[8] is V9. V2..V5 commute with V1, V6..V9 anticommute.
  std::vector<Operator> v;
};

inline Spin1Operators spin1_operators() {
  Spin1Operators s;
  const double r = 1.0 / std::sqrt(2.0);
  s.jx = Operator::Zero(3, 3);
  s.jx(0, 1) = s.jx(1, 0) = s.jx(1, 2) = s.jx(2, 1) = r;
  s.jy = Operator::Zero(3, 3);
  s.jy(0, 1) = -kI * r;
  s.jy(1, 0) = kI * r;
  s.jy(1, 2) = -kI * r;
  s.jy(2, 1) = kI * r;
  s.jz = Operator::Zero(3, 3);
  s.jz(0, 0) = 1.0;
  s.jz(2, 2) = -1.0;
  s.jplus = s.jx + kI * s.jy;
  s.jminus = s.jx - kI * s.jy;

  const Operator id = identity(3);
  const Operator& jz = s.jz;
  const Operator& jp = s.jplus;
  const Operator& jm = s.jminus;
  const Operator jz2 = jz * jz;
  s.v = {
      jz + jz2 - id,
      id + 0.5 * jz - 0.5 * jz2,
      -id - 0.5 * jz + 2.5 * jz2,
      -r * (jp * jz + jz * jm),
      kI * r * (jp * jz - jz * jm),
      r * (jz * jp + jm * jz),
      kI * r * (jm * jz - jz * jp),
      0.5 * (jp * jp + jm * jm),
      0.5 * kI * (jm * jm - jp * jp),
  };
  return s;
}

// ---------------------------------------------------------------------------
// Hamiltonian split

struct SplitHamiltonian {
  Operator h0;  // commutes with p
  Operator hp;  // anticommutes with p
  Operator p;
};

/// h0 = (h + p h p)/2, hp = (h - p h p)/2 for an involution p (p^2 = I).
inline SplitHamiltonian split_hamiltonian(const Operator& h, const Operator& p) {
  require_square(h, "split_hamiltonian");
  require_same_dim(h, p, "split_hamiltonian");
  if (!is_hermitian(h)) throw std::invalid_argument("split_hamiltonian: h is not Hermitian");
  const Operator php = p * h * p;
  return {0.5 * (h + php), 0.5 * (h - php), p};
}

inline SplitHamiltonian split_hamiltonian(const Operator& h, const PolarizationOperator& p) {
  return split_hamiltonian(h, p.op());
}

}  // namespace udd
