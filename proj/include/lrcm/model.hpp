#pragma once

// Interaction Hamiltonians and collision unitaries.
//
// Couplings are carried as the dimensionless products g_se = J_se t and
// g_ee = J_ee t, so every unitary is exp(-i g h) for a coupling-free h.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lrcm/density.hpp"

namespace lrcm {

enum class Axis { X, Y, Z };

template <typename Real = double>
CMatrix<Real> pauli(Axis axis) {
  using C = Complex<Real>;
  CMatrix<Real> m(2, 2);
  switch (axis) {
    case Axis::X: m << C(0), C(1), C(1), C(0); break;
    case Axis::Y: m << C(0), C(0, -1), C(0, 1), C(0); break;
    case Axis::Z: m << C(1), C(0), C(0), C(-1); break;
  }
  return m;
}

/// sigma_x sigma_x + sigma_y sigma_y on two qubits (no coupling constant).
template <typename Real = double>
CMatrix<Real> h_se_pair() {
  return kron(pauli<Real>(Axis::X), pauli<Real>(Axis::X)) + kron(pauli<Real>(Axis::Y), pauli<Real>(Axis::Y));
}

/// Isotropic Heisenberg pair coupling divided by two.
template <typename Real = double>
CMatrix<Real> h_heis_pair() {
  return (kron(pauli<Real>(Axis::X), pauli<Real>(Axis::X)) + kron(pauli<Real>(Axis::Y), pauli<Real>(Axis::Y)) +
          kron(pauli<Real>(Axis::Z), pauli<Real>(Axis::Z))) /
         Real(2);
}

template <typename Real = double>
CMatrix<Real> swap_gate() {
  CMatrix<Real> s = CMatrix<Real>::Zero(4, 4);
  s(0, 0) = s(3, 3) = 1;
  s(1, 2) = s(2, 1) = 1;
  return s;
}

/// exp(-i g (XX + YY)) written out: identity on |00>,|11>, a rotation on the
/// single-excitation block.
template <typename Real = double>
CMatrix<Real> closed_form_xxyy(Real g) {
  CMatrix<Real> u = CMatrix<Real>::Zero(4, 4);
  const Complex<Real> c(std::cos(2 * g), 0);
  const Complex<Real> s(0, -std::sin(2 * g));
  u(0, 0) = u(3, 3) = 1;
  u(1, 1) = u(2, 2) = c;
  u(1, 2) = u(2, 1) = s;
  return u;
}

/// Places a two-qubit operator on factors (a, b) of `layout`, identity elsewhere.
template <typename Real>
CMatrix<Real> embed_pair(const CMatrix<Real>& h_pair, const RegisterLayout& layout, const std::string& a,
                         const std::string& b) {
  if (h_pair.rows() != 4 || h_pair.cols() != 4) throw InputError("embed_pair: operator must be 4x4");
  const std::size_t pa = layout.position(a);
  const std::size_t pb = layout.position(b);
  if (pa == pb) throw InputError("embed_pair: labels must differ");
  const std::size_t n = layout.size();
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  const std::size_t bit_a = std::size_t{1} << (n - 1 - pa);
  const std::size_t bit_b = std::size_t{1} << (n - 1 - pb);
  const std::size_t mask = bit_a | bit_b;
  auto local = [&](std::size_t idx) { return ((idx & bit_a) ? 2U : 0U) | ((idx & bit_b) ? 1U : 0U); };

  CMatrix<Real> out = CMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if ((ui & ~mask) != (uj & ~mask)) continue;
      out(i, j) = h_pair(local(ui), local(uj));
    }
  }
  return out;
}

/// Environment-environment coupling model.
struct Separate {
  int range = 1;  // couples e_k with e_{k+range}
  friend bool operator==(const Separate&, const Separate&) = default;
};

struct Collective {
  int max_range = 1;  // couples e_k jointly with e_{k+1} .. e_{k+max_range}
  friend bool operator==(const Collective&, const Collective&) = default;
};

/// One stage of a consecutive separate interaction: pair (e_k, e_{k+range}) at strength g.
struct Stage {
  int range = 1;
  double strength = 0.0;
  friend bool operator==(const Stage&, const Stage&) = default;
};

struct Consecutive {
  std::vector<Stage> stages;  // strictly increasing range
  friend bool operator==(const Consecutive&, const Consecutive&) = default;
};

using EnvModel = std::variant<Separate, Collective, Consecutive>;

inline constexpr int kMaxRange = 4;

/// Largest e-e distance the model touches; the window holds max_range + 1 environment qubits.
inline int max_range(const EnvModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Separate>) {
          return m.range;
        } else if constexpr (std::is_same_v<T, Collective>) {
          return m.max_range;
        } else {
          return m.stages.empty() ? 0 : m.stages.back().range;
        }
      },
      model);
}

/// Throws InputError describing the first problem with `model`.
void validate(const EnvModel& model);

std::string to_string(const EnvModel& model);

/// Accepts plain numbers and pi multiples: "0.3", "pi/2", "0.6*pi/2", "2*pi".
double parse_angle(const std::string& text);

/// Parses "separate:2", "collective:3" or "consecutive:1@pi/2,2@1.5708".
EnvModel parse_env_model(const std::string& text);

struct CouplingConfig {
  double g_se = 0.05;
  double g_ee = std::numbers::pi / 2;
  EnvModel env_model = Separate{1};
};

/// exp(-i g_se (XX+YY)) between S and env_label, embedded into `layout`.
ComplexMatrix u_se(const CouplingConfig& config, const RegisterLayout& layout, const std::string& env_label);

/// e-e unitary sourced at `source` (an environment label "E<k>"); partners are E<k+j>.
/// Collective models exponentiate the summed pair Hamiltonians once.
ComplexMatrix u_ee(const CouplingConfig& config, const RegisterLayout& layout, const std::string& source);

/// Environment-only generator g_ee * (sum of pair terms) sourced at `source`, embedded into
/// `layout`. Consecutive models sum each stage with its own strength.
ComplexMatrix h_ee_generator(const CouplingConfig& config, const RegisterLayout& layout, const std::string& source);

/// The e-e unitary on a bare window of `max_range + 1` environment qubits, source first.
ComplexMatrix u_ee_window(const CouplingConfig& config);

}  // namespace lrcm
