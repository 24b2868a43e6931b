#pragma once

// Collision loop over a sliding window of environment qubits.
//
// Each collision, for both trajectories: U_se on (S, E_k), U_ee sourced at
// E_k, then the joint state is replaced by the product of its system and
// environment marginals. The environment marginal is kept whole, so
// correlations among environment qubits survive. E_k is then traced out and
// a fresh environment qubit is appended at the far end of the window.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lrcm/density.hpp"
#include "lrcm/measures.hpp"
#include "lrcm/model.hpp"

namespace lrcm {

using Vector2c = Eigen::Vector2cd;

/// A named single-qubit pure state.
struct QubitState {
  std::string name;
  Vector2c amplitudes;

  static QubitState zero();
  static QubitState one();
  static QubitState plus();
  static QubitState minus();
  static QubitState plus_i();
  static QubitState minus_i();
  /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
  static QubitState bloch(double theta, double phi);
  /// zero, one, plus, minus, plus_i, minus_i, or bloch:<theta>:<phi>
  static QubitState parse(const std::string& text);

  ComplexMatrix projector() const;
};

enum class MiHook { PreEe, PostEe };

struct SimulationConfig {
  CouplingConfig coupling;
  std::size_t collisions = 60000;
  std::pair<QubitState, QubitState> initial_pair{QubitState::plus(), QubitState::minus()};
  QubitState env_init = QubitState::zero();
  BoundMode bound_mode = BoundMode::PreErasure;
  BoundNorm bound_norm = BoundNorm::Trace;
  MiHook mi_hook = MiHook::PreEe;
  /// When false, B_env/B_corr/bound are left at zero (sweeps only need D).
  bool compute_bounds = true;
};

/// Throws InputError listing every invalid field.
void validate(const SimulationConfig& config);

/// Environment qubits held in the window: max_range + 1.
std::size_t window_size(const EnvModel& model);

struct CollisionRecord {
  std::size_t k = 0;
  double D = 0;
  double delta_D = 0;
  double N_cumulative = 0;
  std::array<double, 2> C_l1{};
  std::array<double, 2> MI{};
  double B_env = 0;
  double B_corr = 0;
  double bound = 0;
};

/// State of S and the live environment window [E_k, ..., E_{k+w-1}] between
/// collisions. It is always a product, so only the factors are stored.
struct WindowState {
  ComplexMatrix system;  // 2x2
  ComplexMatrix env;     // 2^w x 2^w, E_k first
  std::size_t collision_index = 0;
  std::size_t window = 0;

  /// system (x) env with labels S, E_{k+1}, ...
  DensityMatrix joint() const;
};

struct TrajectoryPair {
  std::array<WindowState, 2> states;
  std::vector<CollisionRecord> records;
  /// PreErasure: bound inputs on the state the next collision starts from.
  std::array<BoundInputs<double>, 2> pending_bound;
};

/// Unitaries and generators built once per configuration.
struct CollisionOperators {
  ComplexMatrix u_se_pair;       // 4x4 on (S, E_k)
  ComplexMatrix u_ee_window;     // on the w environment qubits, source first
  ComplexMatrix h_bound_pair;    // g_se (XX+YY), 4x4
  ComplexMatrix env_projector;   // fresh environment qubit

  static CollisionOperators build(const SimulationConfig& config);
};

/// Factorized start: rho_s (x) |env_init ... env_init><...| for both trajectories.
TrajectoryPair init(const SimulationConfig& config);

/// Advances both trajectories by one collision and appends a record.
void collide_step(TrajectoryPair& pair, const SimulationConfig& config, const CollisionOperators& ops);

/// init + `collisions` steps. records[0] describes the initial state.
std::vector<CollisionRecord> run(const SimulationConfig& config);

inline constexpr std::size_t kMaxBruteForceQubits = 10;

/// Same protocol with every environment qubit held in one register and none
/// discarded. Verification oracle for the sliding window.
std::vector<CollisionRecord> brute_force_run(const SimulationConfig& config, std::size_t total_env_qubits);

struct Saturation {
  bool saturated = false;     // trailing `window` increments all below `threshold`
  std::size_t index = 0;      // first k after which every increment stays below `threshold`
  double value = 0;           // N at the end of the run
};

inline constexpr std::size_t kSaturationWindow = 100;
inline constexpr double kSaturationThreshold = 1e-8;

Saturation saturation(const std::vector<CollisionRecord>& records, std::size_t window = kSaturationWindow,
                      double threshold = kSaturationThreshold);

/// First k with value(record) < threshold that stays below it for the rest of the run; records.size() if never.
template <typename F>
std::size_t settle_index(const std::vector<CollisionRecord>& records, double threshold, F&& value) {
  std::size_t idx = records.size();
  for (std::size_t i = records.size(); i-- > 0;) {
    if (value(records[i]) < threshold) {
      idx = i;
    } else {
      break;
    }
  }
  return idx;
}

/// First k with value(record) < threshold; records.size() if never.
template <typename F>
std::size_t first_below(const std::vector<CollisionRecord>& records, double threshold, F&& value) {
  for (std::size_t i = 0; i < records.size(); ++i)
    if (value(records[i]) < threshold) return i;
  return records.size();
}

/// (+x,-x), (-x,+x), (+y,-y), (-y,+y), (+z,-z), (-z,+z)
std::vector<std::pair<QubitState, QubitState>> axis_pair_grid();

/// Antipodal pairs over a polar x azimuthal grid of the Bloch sphere.
std::vector<std::pair<QubitState, QubitState>> bloch_pair_grid(std::size_t polar_steps, std::size_t azimuth_steps);

struct BlpMaximum {
  double N = 0;
  std::pair<QubitState, QubitState> pair;
  std::vector<double> per_pair;
};

/// Runs the engine for every pair and keeps the largest N (first one on ties within 1e-12).
BlpMaximum blp_maximize(const SimulationConfig& config, const std::vector<std::pair<QubitState, QubitState>>& grid);

}  // namespace lrcm
