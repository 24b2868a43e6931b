#pragma once

// Distinguishability, coherence and correlation measures on density matrices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lrcm/density.hpp"

namespace lrcm {

/// Where the bound on the trace-distance increment is evaluated.
///  - PostErasure: on the product state left after a collision's s-e factorization.
///  - PreErasure: on the correlated joint state (after U_se and U_ee, before
///    factorization) that the next collision acts on.
enum class BoundMode { PostErasure, PreErasure };

/// Norm used inside the bound terms.
enum class BoundNorm { Trace, Operator };

template <typename Real>
Real trace_distance(const BasicDensityMatrix<Real>& a, const BasicDensityMatrix<Real>& b) {
  if (!(a.layout() == b.layout())) throw InputError("trace_distance: layouts differ");
  return trace_norm(a.matrix() - b.matrix()) / Real(2);
}

/// Half the trace norm of the difference of two bare matrices of equal size.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar trace_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("trace_distance: sizes differ");
  return trace_norm(a - b) / typename DerivedA::RealScalar(2);
}

/// D_k - D_{k-1}; may be negative.
inline double delta_D(std::span<const double> series, std::size_t k) {
  if (k < 1 || k >= series.size()) {
    throw InputError("delta_D: index " + std::to_string(k) + " outside 1.." + std::to_string(series.size() == 0 ? 0 : series.size() - 1));
  }
  return series[k] - series[k - 1];
}

struct BlpResult {
  double N = 0.0;
  std::vector<double> increments;  // D_k - D_{k-1}, k = 1..len-1
};

/// Sum of the positive increments of a trace-distance series.
inline BlpResult blp_accumulate(std::span<const double> series) {
  if (series.size() < 2) throw InputError("blp_accumulate: need at least two trace-distance values");
  BlpResult out;
  out.increments.reserve(series.size() - 1);
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double inc = series[k] - series[k - 1];
    out.increments.push_back(inc);
    if (inc > 0) out.N += inc;
  }
  return out;
}

/// Sum of moduli of off-diagonal entries in the computational basis.
template <typename Derived>
typename Derived::RealScalar l1_coherence(const Eigen::MatrixBase<Derived>& rho) {
  typename Derived::RealScalar c = 0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
      if (i != j) c += std::abs(rho(i, j));
  return c;
}

template <typename Real>
Real l1_coherence(const BasicDensityMatrix<Real>& rho) {
  return l1_coherence(rho.matrix());
}

/// S(rho_a) + S(rho_b) - S(rho_ab) for a two-qubit matrix (qubit 0 = a).
template <typename Derived>
typename Derived::RealScalar mutual_information_pair(const Eigen::MatrixBase<Derived>& rho_ab) {
  if (rho_ab.rows() != 4) throw InputError("mutual_information_pair: expected a two-qubit matrix");
  return von_neumann_entropy_of(partial_trace(rho_ab, {0})) + von_neumann_entropy_of(partial_trace(rho_ab, {1})) -
         von_neumann_entropy_of(rho_ab);
}

/// Mutual information between two labelled qubits; other qubits are traced out first.
template <typename Real>
Real mutual_information(const BasicDensityMatrix<Real>& rho, const std::string& s_label, const std::string& e_label) {
  if (s_label == e_label) throw InputError("mutual_information: labels must differ");
  return mutual_information_pair(rho.partial_trace({s_label, e_label}).matrix());
}

/// rho - rho_s (x) rho_rest, where the split is the first qubit against all others.
template <typename Derived>
CMatrix<typename Derived::RealScalar> chi(const Eigen::MatrixBase<Derived>& rho) {
  const std::size_t n = qubit_count(rho);
  if (n < 2) throw InputError("chi: need at least two qubits");
  std::vector<std::size_t> rest(n - 1);
  for (std::size_t i = 1; i < n; ++i) rest[i - 1] = i;
  return rho - kron(partial_trace(rho, {0}), partial_trace(rho, std::span<const std::size_t>(rest)));
}

template <typename Real>
CMatrix<Real> chi(const BasicDensityMatrix<Real>& rho) {
  if (rho.layout()[0] != "S") throw InputError("chi: system qubit must be factor 0");
  return chi(rho.matrix());
}

template <typename Real>
struct TildeStates {
  CMatrix<Real> rho;  // Tr_e [H, rho_s (x) rho_e]
  CMatrix<Real> chi;  // Tr_e [H, chi]
};

/// First-order generators of the system marginal: Tr_e of the commutator of
/// `h` (on the joint register, system first) with rho_s (x) rho_e and with chi.
template <typename Real>
TildeStates<Real> tilde_states(const CMatrix<Real>& h, const CMatrix<Real>& rho_s, const CMatrix<Real>& rho_e,
                               const CMatrix<Real>& chi_matrix) {
  if (rho_s.rows() != 2) throw InputError("tilde_states: system must be a single qubit");
  const Eigen::Index dim = rho_s.rows() * rho_e.rows();
  if (h.rows() != dim || chi_matrix.rows() != dim) throw InputError("tilde_states: operator sizes do not match the register");
  if (hermiticity_error(h) > Real(kHermitianTol)) throw InputError("tilde_states: generator is not Hermitian");
  const CMatrix<Real> product = kron(rho_s, rho_e);
  const CMatrix<Real> c1 = h * product - product * h;
  const CMatrix<Real> c2 = h * chi_matrix - chi_matrix * h;
  return {partial_trace(c1, {0}), partial_trace(c2, {0})};
}

/// Norm of an anti-Hermitian or Hermitian traceless matrix difference.
template <typename Derived>
typename Derived::RealScalar generator_norm(const Eigen::MatrixBase<Derived>& m, BoundNorm norm) {
  using Real = typename Derived::RealScalar;
  // Commutator traces of Hermitian operators are anti-Hermitian; i*m is Hermitian.
  const CMatrix<Real> herm = hermiticity_error(m) <= Real(kHermitianTol) ? CMatrix<Real>(m) : CMatrix<Real>(Complex<Real>(0, 1) * m);
  return norm == BoundNorm::Trace ? trace_norm(herm) : operator_norm(herm);
}

/// Bound inputs for one trajectory, reduced to the system and the environment
/// qubit it couples to next.
template <typename Real>
struct BoundInputs {
  CMatrix<Real> rho_s;        // 2x2 system marginal
  CMatrix<Real> rho_partner;  // 2x2 marginal of the next collision partner
  CMatrix<Real> chi_pair;     // 4x4 (S, partner) block of chi; exactly zero for product states
};

template <typename Real>
struct BoundTerms {
  Real b_env = 0;
  Real b_corr = 0;
  Real bound = 0;  // (b_env + b_corr) / 2
};

/// B_env from trajectory 1's system with each environment marginal, B_corr
/// from the two correlation terms. `h_pair` is the scaled two-qubit s-e
/// generator on (S, partner); environment-only terms commute out of Tr_e.
template <typename Real>
BoundTerms<Real> bound_terms(const CMatrix<Real>& h_pair, const BoundInputs<Real>& t1, const BoundInputs<Real>& t2,
                             BoundNorm norm = BoundNorm::Trace) {
  const auto tilde11 = tilde_states(h_pair, t1.rho_s, t1.rho_partner, t1.chi_pair);
  const auto tilde12 = tilde_states(h_pair, t1.rho_s, t2.rho_partner, t2.chi_pair);
  BoundTerms<Real> out;
  out.b_env = generator_norm(tilde11.rho - tilde12.rho, norm);
  out.b_corr = generator_norm(tilde11.chi - tilde12.chi, norm);
  out.bound = (out.b_env + out.b_corr) / Real(2);
  return out;
}

}  // namespace lrcm
