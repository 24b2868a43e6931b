#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lrcm/linalg.hpp"

namespace lrcm {

/// Ordered qubit labels; position in the list is the tensor-factor position
/// (leftmost = most significant). Labels are unique.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      for (std::size_t j = i + 1; j < labels_.size(); ++j) {
        if (labels_[i] == labels_[j]) throw InputError("duplicate register label '" + labels_[i] + "'");
      }
    }
  }

  /// System qubit "S" followed by environment qubits "E<first>", "E<first+1>", ...
  static RegisterLayout system_and_window(std::size_t first_env, std::size_t env_count) {
    std::vector<std::string> labels{"S"};
    for (std::size_t i = 0; i < env_count; ++i) labels.push_back(env_label(first_env + i));
    return RegisterLayout(std::move(labels));
  }

  static std::string env_label(std::size_t index) { return "E" + std::to_string(index); }

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return std::size_t{1} << labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& operator[](std::size_t i) const { return labels_[i]; }

  bool contains(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  std::size_t position(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InputError("unknown register label '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::vector<std::size_t> positions(const std::vector<std::string>& labels) const {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(position(l));
    return out;
  }

  RegisterLayout subset(const std::vector<std::string>& keep) const {
    for (const auto& l : keep) position(l);
    return RegisterLayout(keep);
  }

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Unit-trace, Hermitian, positive semidefinite matrix over a labelled register.
template <typename Real>
class BasicDensityMatrix {
 public:
  using Matrix = CMatrix<Real>;

  BasicDensityMatrix(Matrix matrix, RegisterLayout layout) : matrix_(std::move(matrix)), layout_(std::move(layout)) {
    if (matrix_.rows() != static_cast<Eigen::Index>(layout_.dim()) || matrix_.cols() != matrix_.rows()) {
      throw InputError("density matrix of size " + std::to_string(matrix_.rows()) + " does not match a " +
                       std::to_string(layout_.size()) + "-qubit layout");
    }
    if (!matrix_.allFinite()) throw InputError("density matrix has non-finite entries");
  }

  /// Validates Hermiticity, unit trace and positivity within `tol`.
  static BasicDensityMatrix checked(Matrix matrix, RegisterLayout layout, Real tol = Real(kHermitianTol)) {
    BasicDensityMatrix rho(std::move(matrix), std::move(layout));
    const auto v = rho.violations();
    if (v.hermiticity > tol || v.trace > tol || v.negativity > tol) {
      throw InputError("not a density matrix (hermiticity " + std::to_string(double(v.hermiticity)) + ", trace " +
                       std::to_string(double(v.trace)) + ", negativity " + std::to_string(double(v.negativity)) + ")");
    }
    return rho;
  }

  static BasicDensityMatrix pure(const Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>& psi, RegisterLayout layout) {
    const Real norm = psi.norm();
    if (!(norm > 0)) throw InputError("pure state vector has zero norm");
    const auto unit = psi / norm;
    return BasicDensityMatrix(unit * unit.adjoint(), std::move(layout));
  }

  const Matrix& matrix() const { return matrix_; }
  const RegisterLayout& layout() const { return layout_; }
  std::size_t qubits() const { return layout_.size(); }

  struct Violations {
    Real hermiticity;
    Real trace;
    Real negativity;  // max(0, -smallest eigenvalue)
  };

  Violations violations() const {
    Violations v{};
    v.hermiticity = hermiticity_error(matrix_);
    v.trace = std::abs(matrix_.trace() - Complex<Real>(1));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(matrix_), Eigen::EigenvaluesOnly);
    v.negativity = std::max(Real(0), -solver.eigenvalues().minCoeff());
    return v;
  }

  /// Reduced state on `keep` (in the given order).
  BasicDensityMatrix partial_trace(const std::vector<std::string>& keep) const {
    if (keep.empty()) throw InputError("partial_trace: keep set is empty");
    const auto pos = layout_.positions(keep);
    return BasicDensityMatrix(lrcm::partial_trace(matrix_, std::span<const std::size_t>(pos)), layout_.subset(keep));
  }

  /// Reduced state with the listed labels traced out.
  BasicDensityMatrix trace_out(const std::vector<std::string>& drop) const {
    for (const auto& l : drop) layout_.position(l);
    std::vector<std::string> keep;
    for (const auto& l : layout_.labels())
      if (std::find(drop.begin(), drop.end(), l) == drop.end()) keep.push_back(l);
    return partial_trace(keep);
  }

  friend BasicDensityMatrix tensor(const BasicDensityMatrix& a, const BasicDensityMatrix& b) {
    auto labels = a.layout_.labels();
    labels.insert(labels.end(), b.layout_.labels().begin(), b.layout_.labels().end());
    return BasicDensityMatrix(kron(a.matrix_, b.matrix_), RegisterLayout(std::move(labels)));
  }

 private:
  Matrix matrix_;
  RegisterLayout layout_;
};

using DensityMatrix = BasicDensityMatrix<double>;

template <typename Real>
Real von_neumann_entropy(const BasicDensityMatrix<Real>& rho) {
  return von_neumann_entropy_of(rho.matrix());
}

}  // namespace lrcm
