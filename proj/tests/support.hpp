#pragma once
// Random states and brute-force reference routines shared by the test suites.

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lrcm/linalg.hpp"

namespace testing {

using lrcm::ComplexMatrix;
using C = std::complex<double>;

inline ComplexMatrix random_matrix(Eigen::Index dim, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = C(g(rng), g(rng));
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937& rng) {
  const ComplexMatrix a = random_matrix(dim, rng);
  return (a + a.adjoint()) / 2.0;
}

/// Mixed state A A^dagger / tr.
inline ComplexMatrix random_density(Eigen::Index dim, std::mt19937& rng) {
  const ComplexMatrix a = random_matrix(dim, rng);
  const ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline ComplexMatrix random_pure(Eigen::Index dim, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = C(g(rng), g(rng));
  v.normalize();
  return v * v.adjoint();
}

/// Unitary from a QR factorization of a Gaussian matrix.
inline ComplexMatrix random_unitary(Eigen::Index dim, std::mt19937& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(dim, rng));
  return qr.householderQ() * ComplexMatrix::Identity(dim, dim);
}

inline double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Digit of qubit `q` (0 = most significant) in basis index `idx` of an n-qubit register.
inline std::size_t digit(std::size_t idx, std::size_t q, std::size_t n) { return (idx >> (n - 1 - q)) & 1U; }

/// Partial trace by explicit summation over every pair of full basis indices.
inline ComplexMatrix naive_partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& keep, std::size_t n) {
  const std::size_t dk = std::size_t{1} << keep.size();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      bool traced_equal = true;
      for (std::size_t q = 0; q < n && traced_equal; ++q) {
        bool kept = false;
        for (auto k : keep) kept = kept || k == q;
        if (!kept && digit(i, q, n) != digit(j, q, n)) traced_equal = false;
      }
      if (!traced_equal) continue;
      std::size_t ri = 0, rj = 0;
      for (auto k : keep) {
        ri = (ri << 1) | digit(i, k, n);
        rj = (rj << 1) | digit(j, k, n);
      }
      out(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(rj)) += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

/// Kronecker product by the textbook block formula.
inline ComplexMatrix naive_kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// SWAP of adjacent qubits (q, q+1) on an n-qubit register, built from basis vectors.
inline ComplexMatrix adjacent_swap(std::size_t q, std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix s = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t a = digit(i, q, n), b = digit(i, q + 1, n);
    std::size_t j = i;
    const std::size_t bit_a = std::size_t{1} << (n - 1 - q), bit_b = std::size_t{1} << (n - 2 - q);
    j = (j & ~(bit_a | bit_b)) | (b ? bit_a : 0) | (a ? bit_b : 0);
    s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1;
  }
  return s;
}

/// Von Neumann entropy from eigenvalues computed by Eigen directly.
inline double entropy_reference(const ComplexMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-14) s -= l * std::log(l);
  }
  return s;
}

}  // namespace testing
