#include "lrcm/engine.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

namespace lrcm {

namespace {

using C = std::complex<double>;

ComplexMatrix normalized(const ComplexMatrix& m) {
  ComplexMatrix h = hermitize(m);
  const double tr = h.trace().real();
  if (!(tr > 0) || !std::isfinite(tr)) throw NumericalError("marginal with non-positive trace");
  return h / tr;
}

std::vector<std::size_t> range_positions(std::size_t first, std::size_t count) {
  std::vector<std::size_t> out(count);
  std::iota(out.begin(), out.end(), first);
  return out;
}

BoundInputs<double> correlated_inputs(const ComplexMatrix& joint, std::size_t partner) {
  const ComplexMatrix sigma = partial_trace(joint, {std::size_t{0}, partner});
  BoundInputs<double> in;
  in.rho_s = partial_trace(sigma, {0});
  in.rho_partner = partial_trace(sigma, {1});
  in.chi_pair = sigma - kron(in.rho_s, in.rho_partner);
  return in;
}

BoundInputs<double> product_inputs(const ComplexMatrix& rho_s, const ComplexMatrix& rho_partner) {
  return {rho_s, rho_partner, ComplexMatrix::Zero(4, 4)};
}

ComplexMatrix env_product(const ComplexMatrix& single, std::size_t count) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < count; ++i) out = kron(out, single);
  return out;
}

// Tr_s[U (rho_s (x) env) U^dagger] for U on (S, env qubit 0): a linear map on
// the 2x2 block structure of env.
ComplexMatrix partner_channel(const ComplexMatrix& u, const ComplexMatrix& rho_s, const ComplexMatrix& env) {
  const Eigen::Index h = env.rows() / 2;
  ComplexMatrix out = ComplexMatrix::Zero(env.rows(), env.cols());
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      auto block = out.block(a * h, b * h, h, h);
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          C coeff{0};
          for (int m = 0; m < 2; ++m)
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) coeff += rho_s(i, j) * u(2 * m + a, 2 * i + c) * std::conj(u(2 * m + b, 2 * j + d));
          if (coeff != C{0}) block += coeff * env.block(c * h, d * h, h, h);
        }
      }
    }
  }
  return out;
}

void finish_record(CollisionRecord& rec, const CollisionRecord& prev) {
  rec.delta_D = rec.D - prev.D;
  rec.N_cumulative = prev.N_cumulative + (rec.delta_D > 0 ? rec.delta_D : 0.0);
}

void set_bound(CollisionRecord& rec, const BoundTerms<double>& b) {
  rec.B_env = b.b_env;
  rec.B_corr = b.b_corr;
  rec.bound = b.bound;
}

}  // namespace

QubitState QubitState::zero() { return {"zero", Vector2c(1, 0)}; }
QubitState QubitState::one() { return {"one", Vector2c(0, 1)}; }
QubitState QubitState::plus() { return {"plus", Vector2c(1, 1) / std::sqrt(2.0)}; }
QubitState QubitState::minus() { return {"minus", Vector2c(1, -1) / std::sqrt(2.0)}; }
QubitState QubitState::plus_i() { return {"plus_i", Vector2c(C(1), C(0, 1)) / std::sqrt(2.0)}; }
QubitState QubitState::minus_i() { return {"minus_i", Vector2c(C(1), C(0, -1)) / std::sqrt(2.0)}; }

QubitState QubitState::bloch(double theta, double phi) {
  return {fmt::format("bloch:{:.17g}:{:.17g}", theta, phi),
          Vector2c(C(std::cos(theta / 2)), std::polar(std::sin(theta / 2), phi))};
}

QubitState QubitState::parse(const std::string& text) {
  if (text == "zero" || text == "0") return zero();
  if (text == "one" || text == "1") return one();
  if (text == "plus" || text == "+") return plus();
  if (text == "minus" || text == "-") return minus();
  if (text == "plus_i") return plus_i();
  if (text == "minus_i") return minus_i();
  if (text.rfind("bloch:", 0) == 0) {
    std::stringstream ss(text.substr(6));
    std::string th, ph;
    if (std::getline(ss, th, ':') && std::getline(ss, ph)) {
      char* e1 = nullptr;
      char* e2 = nullptr;
      const double theta = std::strtod(th.c_str(), &e1);
      const double phi = std::strtod(ph.c_str(), &e2);
      if (!th.empty() && !ph.empty() && *e1 == '\0' && *e2 == '\0' && std::isfinite(theta) && std::isfinite(phi)) {
        return bloch(theta, phi);
      }
    }
  }
  throw InputError("unknown qubit state '" + text + "' (expected zero, one, plus, minus, plus_i, minus_i or bloch:theta:phi)");
}

DensityMatrix WindowState::joint() const {
  return DensityMatrix(kron(system, env), RegisterLayout::system_and_window(collision_index + 1, window));
}

ComplexMatrix QubitState::projector() const {
  const Vector2c unit = amplitudes.normalized();
  return unit * unit.adjoint();
}

void validate(const SimulationConfig& config) {
  std::vector<std::string> problems;
  if (!std::isfinite(config.coupling.g_se)) problems.push_back("g_se must be finite");
  if (!std::isfinite(config.coupling.g_ee)) problems.push_back("g_ee must be finite");
  try {
    validate(config.coupling.env_model);
  } catch (const InputError& e) {
    problems.push_back(std::string("env_model: ") + e.what());
  }
  if (config.collisions < 1) problems.push_back("collisions must be at least 1");
  for (const auto* s : {&config.initial_pair.first, &config.initial_pair.second, &config.env_init}) {
    if (!(s->amplitudes.norm() > 0) || !s->amplitudes.allFinite()) problems.push_back("state '" + s->name + "' has no valid amplitudes");
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw InputError(msg);
  }
}

std::size_t window_size(const EnvModel& model) { return static_cast<std::size_t>(max_range(model)) + 1; }

CollisionOperators CollisionOperators::build(const SimulationConfig& config) {
  CollisionOperators ops;
  ops.u_se_pair = expm_herm(h_se_pair(), config.coupling.g_se);
  ops.u_ee_window = lrcm::u_ee_window(config.coupling);
  ops.h_bound_pair = config.coupling.g_se * h_se_pair();
  ops.env_projector = config.env_init.projector();
  return ops;
}

TrajectoryPair init(const SimulationConfig& config) {
  validate(config);
  const std::size_t w = window_size(config.coupling.env_model);
  const ComplexMatrix env = env_product(config.env_init.projector(), w);
  const std::array<ComplexMatrix, 2> systems{config.initial_pair.first.projector(), config.initial_pair.second.projector()};

  TrajectoryPair pair{{WindowState{systems[0], env, 0, w}, WindowState{systems[1], env, 0, w}}, {}, {}};

  CollisionRecord rec;
  rec.D = trace_distance(systems[0], systems[1]);
  for (std::size_t t = 0; t < 2; ++t) {
    rec.C_l1[t] = l1_coherence(systems[t]);
    rec.MI[t] = mutual_information_pair(kron(systems[t], partial_trace(env, {0})));
    pair.pending_bound[t] = product_inputs(systems[t], config.env_init.projector());
  }
  if (config.compute_bounds) {
    set_bound(rec, bound_terms(ComplexMatrix(config.coupling.g_se * h_se_pair()), pair.pending_bound[0], pair.pending_bound[1],
                               config.bound_norm));
  }
  pair.records.push_back(rec);
  return pair;
}

void collide_step(TrajectoryPair& pair, const SimulationConfig& config, const CollisionOperators& ops) {
  const std::size_t w = pair.states[0].window;
  const std::size_t k = pair.states[0].collision_index;
  const auto env_pos = range_positions(1, w);
  const auto rest_pos = range_positions(1, w - 1);
  const bool pre_bounds = config.compute_bounds && config.bound_mode == BoundMode::PreErasure;
  const bool need_joint = pre_bounds || config.mi_hook == MiHook::PostEe;
  const ComplexMatrix u_ee_dag = ops.u_ee_window.adjoint();

  CollisionRecord rec;
  rec.k = k + 1;
  std::array<ComplexMatrix, 2> systems;
  std::array<ComplexMatrix, 2> env_rest;
  std::array<BoundInputs<double>, 2> next_pending;

  for (std::size_t t = 0; t < 2; ++t) {
    const WindowState& state = pair.states[t];
    const ComplexMatrix sigma = hermitize(ops.u_se_pair * kron(state.system, partial_trace(state.env, {0})) * ops.u_se_pair.adjoint());
    if (config.mi_hook == MiHook::PreEe) rec.MI[t] = mutual_information_pair(sigma);

    ComplexMatrix env;
    if (need_joint) {
      ComplexMatrix rho = conjugate_local(kron(state.system, state.env), ops.u_se_pair, {0, 1});
      rho = hermitize(conjugate_local(rho, ops.u_ee_window, std::span<const std::size_t>(env_pos)));
      if (config.mi_hook == MiHook::PostEe) rec.MI[t] = mutual_information_pair(partial_trace(rho, {0, 1}));
      if (pre_bounds) next_pending[t] = correlated_inputs(rho, 2);
      env = partial_trace(rho, std::span<const std::size_t>(env_pos));
    } else {
      // U_ee acts on the environment only, so it commutes with Tr_s.
      env = ops.u_ee_window * partner_channel(ops.u_se_pair, state.system, state.env) * u_ee_dag;
    }
    systems[t] = normalized(partial_trace(sigma, {0}));
    env_rest[t] = normalized(partial_trace(env, std::span<const std::size_t>(rest_pos)));
    rec.C_l1[t] = l1_coherence(systems[t]);
  }

  rec.D = trace_distance(systems[0], systems[1]);
  finish_record(rec, pair.records.back());

  for (std::size_t t = 0; t < 2; ++t) {
    pair.states[t].system = systems[t];
    pair.states[t].env = kron(env_rest[t], ops.env_projector);
    pair.states[t].collision_index = k + 1;
  }

  if (config.compute_bounds) {
    if (config.bound_mode == BoundMode::PreErasure) {
      set_bound(rec, bound_terms(ops.h_bound_pair, pair.pending_bound[0], pair.pending_bound[1], config.bound_norm));
      pair.pending_bound = next_pending;
    } else {
      const std::array<BoundInputs<double>, 2> now{product_inputs(systems[0], partial_trace(env_rest[0], {0})),
                                                   product_inputs(systems[1], partial_trace(env_rest[1], {0}))};
      set_bound(rec, bound_terms(ops.h_bound_pair, now[0], now[1], config.bound_norm));
    }
  }
  pair.records.push_back(rec);
}

std::vector<CollisionRecord> run(const SimulationConfig& config) {
  auto pair = init(config);
  const auto ops = CollisionOperators::build(config);
  pair.records.reserve(config.collisions + 1);
  for (std::size_t i = 0; i < config.collisions; ++i) collide_step(pair, config, ops);
  return std::move(pair.records);
}

std::vector<CollisionRecord> brute_force_run(const SimulationConfig& config, std::size_t total_env_qubits) {
  validate(config);
  const auto range = static_cast<std::size_t>(max_range(config.coupling.env_model));
  if (total_env_qubits < config.collisions + range) {
    throw InputError(fmt::format("brute_force_run: need at least {} environment qubits for {} collisions",
                                 config.collisions + range, config.collisions));
  }
  if (total_env_qubits + 1 > kMaxBruteForceQubits) {
    throw InputError(fmt::format("brute_force_run: {} qubits exceeds the {}-qubit limit", total_env_qubits + 1,
                                 kMaxBruteForceQubits));
  }
  const auto layout = RegisterLayout::system_and_window(1, total_env_qubits);
  const ComplexMatrix env0 = config.env_init.projector();
  const ComplexMatrix env_all = env_product(env0, total_env_qubits);
  std::array<ComplexMatrix, 2> rho{kron(config.initial_pair.first.projector(), env_all),
                                   kron(config.initial_pair.second.projector(), env_all)};
  const ComplexMatrix h_bound = config.coupling.g_se * h_se_pair();
  const auto env_pos = range_positions(1, total_env_qubits);

  std::vector<CollisionRecord> records;
  CollisionRecord first;
  std::array<BoundInputs<double>, 2> pending;
  std::array<ComplexMatrix, 2> sys;
  for (std::size_t t = 0; t < 2; ++t) {
    sys[t] = partial_trace(rho[t], {0});
    first.C_l1[t] = l1_coherence(sys[t]);
    first.MI[t] = mutual_information_pair(partial_trace(rho[t], {0, 1}));
    pending[t] = correlated_inputs(rho[t], 1);
  }
  first.D = trace_distance(sys[0], sys[1]);
  if (config.compute_bounds) set_bound(first, bound_terms(h_bound, pending[0], pending[1], config.bound_norm));
  records.push_back(first);

  for (std::size_t c = 1; c <= config.collisions; ++c) {
    const std::string partner = RegisterLayout::env_label(c);
    const ComplexMatrix use = u_se(config.coupling, layout, partner);
    const ComplexMatrix uee = u_ee(config.coupling, layout, partner);
    CollisionRecord rec;
    rec.k = c;
    std::array<BoundInputs<double>, 2> next;
    std::array<ComplexMatrix, 2> envs;
    for (std::size_t t = 0; t < 2; ++t) {
      ComplexMatrix r = hermitize(use * rho[t] * use.adjoint());
      if (config.mi_hook == MiHook::PreEe) rec.MI[t] = mutual_information_pair(partial_trace(r, {0, c}));
      r = hermitize(uee * r * uee.adjoint());
      if (config.mi_hook == MiHook::PostEe) rec.MI[t] = mutual_information_pair(partial_trace(r, {0, c}));
      next[t] = correlated_inputs(r, c + 1);
      sys[t] = normalized(partial_trace(r, {0}));
      envs[t] = normalized(partial_trace(r, std::span<const std::size_t>(env_pos)));
      rec.C_l1[t] = l1_coherence(sys[t]);
      rho[t] = kron(sys[t], envs[t]);
    }
    rec.D = trace_distance(sys[0], sys[1]);
    finish_record(rec, records.back());
    if (config.compute_bounds) {
      if (config.bound_mode == BoundMode::PreErasure) {
        set_bound(rec, bound_terms(h_bound, pending[0], pending[1], config.bound_norm));
        pending = next;
      } else {
        std::array<BoundInputs<double>, 2> now;
        for (std::size_t t = 0; t < 2; ++t) {
          now[t] = product_inputs(sys[t], partial_trace(envs[t], {c}));
        }
        set_bound(rec, bound_terms(h_bound, now[0], now[1], config.bound_norm));
      }
    }
    records.push_back(rec);
  }
  return records;
}

Saturation saturation(const std::vector<CollisionRecord>& records, std::size_t window, double threshold) {
  Saturation s;
  if (records.empty()) return s;
  s.value = records.back().N_cumulative;
  std::size_t last_big = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double inc = records[i].N_cumulative - records[i - 1].N_cumulative;
    if (inc >= threshold) last_big = i;
  }
  s.index = last_big;
  s.saturated = records.size() > window && records.size() - 1 - last_big >= window;
  return s;
}

std::vector<std::pair<QubitState, QubitState>> axis_pair_grid() {
  return {{QubitState::plus(), QubitState::minus()},   {QubitState::minus(), QubitState::plus()},
          {QubitState::plus_i(), QubitState::minus_i()}, {QubitState::minus_i(), QubitState::plus_i()},
          {QubitState::zero(), QubitState::one()},     {QubitState::one(), QubitState::zero()}};
}

std::vector<std::pair<QubitState, QubitState>> bloch_pair_grid(std::size_t polar_steps, std::size_t azimuth_steps) {
  if (polar_steps < 1 || azimuth_steps < 1) throw InputError("bloch_pair_grid: resolutions must be positive");
  std::vector<std::pair<QubitState, QubitState>> grid;
  for (std::size_t i = 0; i <= polar_steps; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(polar_steps);
    const std::size_t phis = (i == 0 || i == polar_steps) ? 1 : azimuth_steps;
    for (std::size_t j = 0; j < phis; ++j) {
      const double phi = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(azimuth_steps);
      grid.emplace_back(QubitState::bloch(theta, phi), QubitState::bloch(std::numbers::pi - theta, phi + std::numbers::pi));
    }
  }
  return grid;
}

BlpMaximum blp_maximize(const SimulationConfig& config, const std::vector<std::pair<QubitState, QubitState>>& grid) {
  if (grid.empty()) throw InputError("blp_maximize: empty state-pair grid");
  BlpMaximum best;
  bool have = false;
  for (const auto& p : grid) {
    SimulationConfig c = config;
    c.initial_pair = p;
    c.compute_bounds = false;
    const double n = run(c).back().N_cumulative;
    best.per_pair.push_back(n);
    if (!have || n > best.N + 1e-12) {
      best.N = n;
      best.pair = p;
      have = true;
    }
  }
  return best;
}

}  // namespace lrcm
