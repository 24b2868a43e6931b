#pragma once

// Dense complex linear algebra for small qubit registers.
//
// Everything here is a free function templated on the real scalar type and
// operating on Eigen dense matrices. Qubit 0 is the most significant bit of
// a basis index, so kron(a, b) places `a` on qubit 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lrcm {

/// Invalid caller input (bad labels, non-Hermitian arguments, malformed config).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical invariant broke during a computation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrix<double>;

inline constexpr double kHermitianTol = 1e-10;

template <typename Real>
struct HermitianEigen {
  RVector<Real> values;    // ascending
  CMatrix<Real> vectors;   // columns are eigenvectors
};

/// Number of qubits of a 2^n x 2^n matrix; throws if the dimension is not a power of two.
template <typename Derived>
std::size_t qubit_count(const Eigen::MatrixBase<Derived>& m) {
  const auto dim = static_cast<std::size_t>(m.rows());
  if (m.rows() != m.cols() || dim == 0 || (dim & (dim - 1)) != 0) {
    throw InputError("matrix dimension " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     " is not a square power of two");
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

template <typename Derived>
typename Derived::RealScalar hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<typename Derived::RealScalar>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// (M + M^dagger) / 2
template <typename Derived>
CMatrix<typename Derived::RealScalar> hermitize(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / typename Derived::RealScalar(2);
}

template <typename DerivedA, typename DerivedB>
CMatrix<typename DerivedA::RealScalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  using Real = typename DerivedA::RealScalar;
  CMatrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace detail {

// Full basis index from the bits of `sub` placed on `positions` (qubit 0 = MSB).
inline std::size_t scatter_bits(std::size_t sub, std::span<const std::size_t> positions, std::size_t n) {
  std::size_t full = 0;
  const std::size_t m = positions.size();
  for (std::size_t i = 0; i < m; ++i) {
    if ((sub >> (m - 1 - i)) & 1U) full |= std::size_t{1} << (n - 1 - positions[i]);
  }
  return full;
}

inline std::vector<std::size_t> scatter_table(std::span<const std::size_t> positions, std::size_t n) {
  std::vector<std::size_t> table(std::size_t{1} << positions.size());
  for (std::size_t s = 0; s < table.size(); ++s) table[s] = scatter_bits(s, positions, n);
  return table;
}

inline void check_positions(std::span<const std::size_t> positions, std::size_t n) {
  std::vector<bool> seen(n, false);
  for (auto p : positions) {
    if (p >= n) throw InputError("qubit position " + std::to_string(p) + " outside a " + std::to_string(n) + "-qubit register");
    if (seen[p]) throw InputError("qubit position " + std::to_string(p) + " listed twice");
    seen[p] = true;
  }
}

inline std::vector<std::size_t> complement(std::span<const std::size_t> positions, std::size_t n) {
  std::vector<bool> used(n, false);
  for (auto p : positions) used[p] = true;
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < n; ++q)
    if (!used[q]) rest.push_back(q);
  return rest;
}

// One- and two-qubit gates: gather the 2^k amplitudes sharing the other bits,
// multiply by a fixed-size matrix, scatter back. Rows first, then columns.
template <typename Real, int K, typename DerivedM, typename DerivedU>
CMatrix<Real> conjugate_fixed(const Eigen::MatrixBase<DerivedM>& rho, const Eigen::MatrixBase<DerivedU>& u,
                              std::span<const std::size_t> targets, std::span<const std::size_t> rest, std::size_t n) {
  constexpr int T = 1 << K;
  using Vec = Eigen::Matrix<Complex<Real>, T, 1>;
  const Eigen::Matrix<Complex<Real>, T, T> uf = u;
  const Eigen::Matrix<Complex<Real>, T, T> uc = uf.conjugate();
  const auto offsets = scatter_table(targets, n);
  const auto bases = scatter_table(rest, n);
  CMatrix<Real> out = rho;
  const Eigen::Index dim = out.rows();
  Vec v;
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (auto b : bases) {
      for (int a = 0; a < T; ++a) v(a) = out(b | offsets[a], c);
      const Vec w = uf * v;
      for (int a = 0; a < T; ++a) out(b | offsets[a], c) = w(a);
    }
  }
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (auto b : bases) {
      for (int a = 0; a < T; ++a) v(a) = out(r, b | offsets[a]);
      const Vec w = uc * v;
      for (int a = 0; a < T; ++a) out(r, b | offsets[a]) = w(a);
    }
  }
  return out;
}

template <typename Real, typename DerivedM, typename DerivedU>
CMatrix<Real> conjugate_small(const Eigen::MatrixBase<DerivedM>& rho, const Eigen::MatrixBase<DerivedU>& u,
                              std::span<const std::size_t> targets, std::span<const std::size_t> rest, std::size_t n) {
  if (targets.size() == 1) return conjugate_fixed<Real, 1>(rho, u, targets, rest, n);
  return conjugate_fixed<Real, 2>(rho, u, targets, rest, n);
}

}  // namespace detail

/// Reduced matrix on the qubits in `keep` (output factor order follows `keep`).
template <typename Derived>
CMatrix<typename Derived::RealScalar> partial_trace(const Eigen::MatrixBase<Derived>& m,
                                                    std::span<const std::size_t> keep) {
  using Real = typename Derived::RealScalar;
  const std::size_t n = qubit_count(m);
  if (keep.empty()) throw InputError("partial_trace: keep set is empty");
  detail::check_positions(keep, n);
  const auto traced = detail::complement(keep, n);
  const auto keep_map = detail::scatter_table(keep, n);
  const auto trace_map = detail::scatter_table(traced, n);

  const auto dk = static_cast<Eigen::Index>(keep_map.size());
  CMatrix<Real> out = CMatrix<Real>::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex<Real> acc{0};
      for (auto t : trace_map) acc += m(keep_map[i] | t, keep_map[j] | t);
      out(i, j) = acc;
    }
  }
  return out;
}

template <typename Derived>
CMatrix<typename Derived::RealScalar> partial_trace(const Eigen::MatrixBase<Derived>& m,
                                                    std::initializer_list<std::size_t> keep) {
  return partial_trace(m, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Reorders tensor factors: output factor i is input factor order[i].
template <typename Derived>
CMatrix<typename Derived::RealScalar> permute_qubits(const Eigen::MatrixBase<Derived>& m,
                                                     std::span<const std::size_t> order) {
  using Real = typename Derived::RealScalar;
  const std::size_t n = qubit_count(m);
  if (order.size() != n) throw InputError("permute_qubits: order must list every qubit");
  detail::check_positions(order, n);
  const auto map = detail::scatter_table(order, n);
  const auto dim = static_cast<Eigen::Index>(map.size());
  CMatrix<Real> out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) out(i, j) = m(map[i], map[j]);
  return out;
}

/// Returns U rho U^dagger where `u` acts on the listed qubits (in that order) and
/// identity elsewhere. Costs O(d^2 * 2^k) for a k-qubit `u`.
template <typename DerivedM, typename DerivedU>
CMatrix<typename DerivedM::RealScalar> conjugate_local(const Eigen::MatrixBase<DerivedM>& rho,
                                                       const Eigen::MatrixBase<DerivedU>& u,
                                                       std::span<const std::size_t> targets) {
  using Real = typename DerivedM::RealScalar;
  const std::size_t n = qubit_count(rho);
  detail::check_positions(targets, n);
  const std::size_t k = targets.size();
  if (u.rows() != (Eigen::Index{1} << k) || u.cols() != u.rows()) {
    throw InputError("conjugate_local: operator size does not match " + std::to_string(k) + " target qubits");
  }
  auto order = detail::complement(targets, n);
  if (k <= 2) return detail::conjugate_small<Real>(rho, u, targets, order, n);
  order.insert(order.end(), targets.begin(), targets.end());

  // Targets moved to the trailing factors: the operator becomes I (x) u, i.e. block diagonal.
  CMatrix<Real> work = permute_qubits(rho, order);
  const Eigen::Index block = Eigen::Index{1} << k;
  const Eigen::Index blocks = work.rows() / block;
  const CMatrix<Real> ud = u.adjoint();
  CMatrix<Real> tmp(block, block);
  for (Eigen::Index a = 0; a < blocks; ++a) {
    for (Eigen::Index b = 0; b < blocks; ++b) {
      auto blk = work.block(a * block, b * block, block, block);
      tmp.noalias() = u * blk;
      blk.noalias() = tmp * ud;
    }
  }
  std::vector<std::size_t> inverse(n);
  for (std::size_t i = 0; i < n; ++i) inverse[order[i]] = i;
  return permute_qubits(work, inverse);
}

template <typename DerivedM, typename DerivedU>
CMatrix<typename DerivedM::RealScalar> conjugate_local(const Eigen::MatrixBase<DerivedM>& rho,
                                                       const Eigen::MatrixBase<DerivedU>& u,
                                                       std::initializer_list<std::size_t> targets) {
  return conjugate_local(rho, u, std::span<const std::size_t>(targets.begin(), targets.size()));
}

/// Eigendecomposition of a Hermitian matrix. Throws InputError when `m` is not
/// Hermitian within kHermitianTol.
template <typename Derived>
HermitianEigen<typename Derived::RealScalar> herm_eig(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  if (m.rows() != m.cols()) throw InputError("herm_eig: matrix is not square");
  if (!m.allFinite()) throw InputError("herm_eig: matrix has non-finite entries");
  const Real err = hermiticity_error(m);
  if (err > Real(kHermitianTol)) {
    throw InputError("herm_eig: matrix is not Hermitian (max |M - M^dagger| = " + std::to_string(double(err)) + ")");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(hermitize(m));
  if (solver.info() != Eigen::Success) throw NumericalError("herm_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(-i * angle * h) for Hermitian h, via its spectral decomposition.
template <typename Derived>
CMatrix<typename Derived::RealScalar> expm_herm(const Eigen::MatrixBase<Derived>& h,
                                                typename Derived::RealScalar angle) {
  using Real = typename Derived::RealScalar;
  const auto eig = herm_eig(h);
  const Complex<Real> minus_i(0, -1);
  const Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1> phases =
      (eig.values.template cast<Complex<Real>>() * (minus_i * angle)).array().exp();
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
template <typename Derived>
typename Derived::RealScalar trace_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  if (m.isZero(0)) return 0;
  return herm_eig(m).values.cwiseAbs().sum();
}

/// Largest absolute eigenvalue of a Hermitian matrix.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  if (m.isZero(0)) return 0;
  return herm_eig(m).values.cwiseAbs().maxCoeff();
}

/// -sum lambda ln lambda; eigenvalues below 1e-14 count as zero.
template <typename Derived>
typename Derived::RealScalar von_neumann_entropy_of(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  const auto eig = herm_eig(m);
  Real s = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const Real l = eig.values(i);
    if (l > Real(1e-14)) s -= l * std::log(l);
  }
  return s;
}

}  // namespace lrcm
