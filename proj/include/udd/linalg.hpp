#pragma once

// Dense complex linear algebra shared by every other header.
//
// Tensor products use a single index convention throughout: the first factor
// is the most significant index, so kron(a, b)(i*db + k, j*db + l) = a(i,j)*b(k,l).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace udd {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;

class dimension_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Elementary operators

inline Operator identity(Eigen::Index dim) { return Operator::Identity(dim, dim); }

inline Operator sigma_x() {
  Operator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Operator sigma_y() {
  Operator m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

inline Operator sigma_z() {
  Operator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Pauli matrix by index: 0 = I, 1 = x, 2 = y, 3 = z.
inline Operator pauli(int index) {
  switch (index) {
    case 0: return identity(2);
    case 1: return sigma_x();
    case 2: return sigma_y();
    case 3: return sigma_z();
    default: throw std::out_of_range("pauli index must be in 0..3");
  }
}

/// |k><l| in dimension dim.
inline Operator ket_bra(Eigen::Index dim, Eigen::Index k, Eigen::Index l) {
  Operator m = Operator::Zero(dim, dim);
  m(k, l) = 1.0;
  return m;
}

inline StateVector basis_state(Eigen::Index dim, Eigen::Index k) {
  StateVector v = StateVector::Zero(dim);
  v(k) = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// Predicates

inline double max_abs(const Operator& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Entrywise Hermiticity residual max|A - A^dagger|.
inline double hermiticity_error(const Operator& a) {
  return max_abs(a - a.adjoint());
}

/// Tolerance is absolute for O(1) operators and scales with the largest entry
/// otherwise (bath Hamiltonians carry entries of order ten).
inline bool is_hermitian(const Operator& a, double tol = kAlgebraTol) {
  if (a.rows() != a.cols()) return false;
  return hermiticity_error(a) <= tol * std::max(1.0, max_abs(a));
}

/// ||U^dagger U - I||_F.
inline double unitarity_error(const Operator& u) {
  return (u.adjoint() * u - identity(u.rows())).norm();
}

inline bool is_unitary(const Operator& u, double tol = kUnitaryTol) {
  return u.rows() == u.cols() && unitarity_error(u) <= tol;
}

inline void require_square(const Operator& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw dimension_error(std::string(what) + ": operator must be square and non-empty");
}

inline void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw dimension_error(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) +
                          " vs " + std::to_string(b.rows()) + ")");
}

// ---------------------------------------------------------------------------
// Products and brackets

inline Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  Operator out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j) out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

inline Operator kron_all(std::span<const Operator> factors) {
  if (factors.empty()) return identity(1);
  Operator out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

inline StateVector kron(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Eigen::Index product(std::span<const Eigen::Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>{});
}

/// I ⊗ ... ⊗ op ⊗ ... ⊗ I with op on factor `site`.
inline Operator embed_site(const Operator& op, std::size_t site, std::span<const Eigen::Index> dims) {
  if (site >= dims.size() || op.rows() != dims[site])
    throw dimension_error("embed_site: operator does not match factor dimension");
  const Eigen::Index left = product(dims.first(site));
  const Eigen::Index right = product(dims.subspan(site + 1));
  return kron(kron(identity(left), op), identity(right));
}

/// ab - ba, or ab + ba when anti is set.
inline Operator bracket(const Operator& a, const Operator& b, bool anti = false) {
  require_same_dim(a, b, "bracket");
  return anti ? Operator(a * b + b * a) : Operator(a * b - b * a);
}

inline Operator commutator(const Operator& a, const Operator& b) { return bracket(a, b, false); }
inline Operator anticommutator(const Operator& a, const Operator& b) { return bracket(a, b, true); }

// ---------------------------------------------------------------------------
// Hermitian spectra and propagators

/// Eigendecomposition h = V diag(lambda) V^dagger of a Hermitian operator,
/// kept so that exp(-i h t) can be formed for many t from one decomposition.
class HermitianSpectrum {
 public:
  explicit HermitianSpectrum(const Operator& h) {
    require_square(h, "HermitianSpectrum");
    if (!is_hermitian(h)) throw std::invalid_argument("HermitianSpectrum: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Operator> solver(h);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("HermitianSpectrum: eigendecomposition failed");
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  Eigen::Index dim() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  const Operator& vectors() const { return vectors_; }

  /// exp(-i lambda_k t) for each eigenvalue.
  Eigen::VectorXcd phases(double t) const {
    Eigen::VectorXcd out(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k) out(k) = std::exp(-kI * (values_(k) * t));
    return out;
  }

  /// exp(-i h t).
  Operator propagator(double t) const {
    return vectors_ * phases(t).asDiagonal() * vectors_.adjoint();
  }

  Operator to_eigenbasis(const Operator& a) const { return vectors_.adjoint() * a * vectors_; }
  Operator from_eigenbasis(const Operator& a) const { return vectors_ * a * vectors_.adjoint(); }

 private:
  Eigen::VectorXd values_;
  Operator vectors_;
};

/// exp(-i h t) for Hermitian h.
inline Operator expm_unitary(const Operator& h, double t) {
  return HermitianSpectrum(h).propagator(t);
}

// ---------------------------------------------------------------------------
// Norms

enum class NormKind { frobenius, trace, spectral };

/// Singular values in descending order. Hermitian inputs go through the
/// eigenvalue route (|lambda| are the singular values), everything else
/// through one-sided Jacobi.
inline Eigen::VectorXd singular_values(const Operator& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  Eigen::VectorXd s;
  if (a.rows() == a.cols() && is_hermitian(a)) {
    Eigen::SelfAdjointEigenSolver<Operator> solver(a, Eigen::EigenvaluesOnly);
    s = solver.eigenvalues().cwiseAbs();
  } else {
    Eigen::JacobiSVD<Operator> svd(a);
    s = svd.singularValues();
  }
  std::sort(s.begin(), s.end(), std::greater<>{});
  return s;
}

inline double norm(const Operator& a, NormKind kind) {
  switch (kind) {
    case NormKind::frobenius: return a.norm();
    case NormKind::trace: return singular_values(a).sum();
    case NormKind::spectral: {
      const auto s = singular_values(a);
      return s.size() == 0 ? 0.0 : s(0);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Density matrices

/// Positive semidefinite, unit-trace Hermitian operator. Construction checks
/// the invariants; everything after that is read-only.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(Operator m) {
    require_square(m, "DensityMatrix");
    if (!is_hermitian(m)) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace() - cplx(1.0)) > kTraceTol)
      throw std::invalid_argument("DensityMatrix: trace differs from one");
    Eigen::SelfAdjointEigenSolver<Operator> solver(m, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kTraceTol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    return DensityMatrix(std::move(m));
  }

  static DensityMatrix pure(const StateVector& psi) {
    if (psi.size() == 0 || std::abs(psi.norm() - 1.0) > kAlgebraTol)
      throw std::invalid_argument("DensityMatrix::pure: state is not normalized");
    return DensityMatrix(psi * psi.adjoint());
  }

  static DensityMatrix maximally_mixed(Eigen::Index dim) {
    return DensityMatrix(identity(dim) / static_cast<double>(dim));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Operator& matrix() const { return m_; }

  friend DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.m_, b.m_));
  }

 private:
  explicit DensityMatrix(Operator m) : m_(std::move(m)) {}
  Operator m_;
};

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.matrix(), b.matrix(), "trace_distance");
  return 0.5 * norm(a.matrix() - b.matrix(), NormKind::trace);
}

// ---------------------------------------------------------------------------
// Partial trace

/// Reduced operator over the factors listed in `keep` (ascending, unique).
/// Kept factors retain their relative order.
inline Operator partial_trace(const Operator& rho, std::span<const Eigen::Index> dims,
                              std::span<const std::size_t> keep) {
  require_square(rho, "partial_trace");
  if (dims.empty() || product(dims) != rho.rows())
    throw dimension_error("partial_trace: product of factor dimensions differs from operator dimension");
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] >= dims.size()) throw dimension_error("partial_trace: keep index out of range");
    if (k > 0 && keep[k] <= keep[k - 1])
      throw std::invalid_argument("partial_trace: keep indices must be strictly increasing");
  }

  const std::size_t nf = dims.size();
  std::vector<bool> kept(nf, false);
  for (auto k : keep) kept[k] = true;

  // Stride of each factor in the full index.
  std::vector<Eigen::Index> stride(nf);
  Eigen::Index s = 1;
  for (std::size_t f = nf; f-- > 0;) {
    stride[f] = s;
    s *= dims[f];
  }

  // Full-index offset contributed by each kept / traced multi-index.
  auto offsets = [&](bool want_kept) {
    std::vector<Eigen::Index> out{0};
    for (std::size_t f = 0; f < nf; ++f) {
      if (kept[f] != want_kept) continue;
      std::vector<Eigen::Index> next;
      next.reserve(out.size() * static_cast<std::size_t>(dims[f]));
      for (auto base : out)
        for (Eigen::Index d = 0; d < dims[f]; ++d) next.push_back(base + d * stride[f]);
      out = std::move(next);
    }
    return out;
  };
  const auto kept_off = offsets(true);
  const auto traced_off = offsets(false);

  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  Operator out = Operator::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      cplx acc = 0.0;
      for (auto t : traced_off) acc += rho(kept_off[a] + t, kept_off[b] + t);
      out(a, b) = acc;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Eigen::Index> dims,
                                   std::span<const std::size_t> keep) {
  return DensityMatrix::from_matrix(partial_trace(rho.matrix(), dims, keep));
}

}  // namespace udd
