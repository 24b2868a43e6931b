// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lrcm/experiment.hpp"

using namespace lrcm;

namespace {

const double kHalfPi = std::numbers::pi / 2;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[x] ") + what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimulationConfig model_config(EnvModel model, double g_ee) {
  SimulationConfig c;
  c.coupling.env_model = std::move(model);
  c.coupling.g_ee = g_ee;
  c.collisions = default_collisions(c.coupling.env_model);
  return c;
}

std::size_t first_positive_delta(const std::vector<CollisionRecord>& recs) {
  for (std::size_t k = 1; k < recs.size(); ++k)
    if (recs[k].delta_D > 0) return k;
  return recs.size();
}

// Runs shared by several criteria: the separate family at pi/2 and the
// collective family at the quoted optimal angles, D/C_l1/MI only.
struct Families {
  std::vector<ModelEntry> separate;
  std::vector<ModelEntry> collective;
  std::vector<std::vector<CollisionRecord>> separate_records;
  std::vector<std::vector<CollisionRecord>> collective_records;
  std::vector<ModelSummary> separate_summary;
  std::vector<ModelSummary> collective_summary;
  double separate_seconds = 0;
};

std::vector<std::vector<CollisionRecord>> run_all(std::vector<ModelEntry>& entries) {
  std::vector<std::vector<CollisionRecord>> out(entries.size());
  parallel_for(entries.size(), 0, [&](std::size_t i) {
    entries[i].sim.compute_bounds = false;
    out[i] = run(entries[i].sim);
  });
  return out;
}

Families build_families() {
  Families f;
  SimulationConfig base = model_config(Separate{1}, kHalfPi);
  f.separate = separate_family(base);
  f.collective = collective_family(base);
  const auto t0 = std::chrono::steady_clock::now();
  f.separate_records = run_all(f.separate);
  f.separate_seconds = seconds_since(t0);
  f.collective_records = run_all(f.collective);
  for (std::size_t i = 0; i < f.separate.size(); ++i)
    f.separate_summary.push_back(summarize(f.separate[i].label, f.separate[i].sim, f.separate_records[i]));
  for (std::size_t i = 0; i < f.collective.size(); ++i)
    f.collective_summary.push_back(summarize(f.collective[i].label, f.collective[i].sim, f.collective_records[i]));
  return f;
}

std::string n_list(const std::vector<ModelSummary>& s) {
  std::string out;
  for (const auto& m : s) out += fmt::format("{}{}={:.6g}{}", out.empty() ? "" : ", ", m.label, m.N, m.saturated ? "" : " (unsaturated)");
  return out;
}

Outcome homogenization() {
  Outcome o;
  SimulationConfig c = model_config(Separate{1}, 0.0);
  c.collisions = 2000;
  const auto t0 = std::chrono::steady_clock::now();
  auto pair = init(c);
  const auto ops = CollisionOperators::build(c);
  for (std::size_t i = 0; i < c.collisions; ++i) collide_step(pair, c, ops);
  const double secs = seconds_since(t0);
  const ComplexMatrix ground = QubitState::zero().projector();
  const double dist = std::max(trace_distance(pair.states[0].system, ground), trace_distance(pair.states[1].system, ground));
  bool monotone = true;
  for (std::size_t k = 1; k < pair.records.size(); ++k) monotone = monotone && pair.records[k].D <= pair.records[k - 1].D;
  o.require(dist < 1e-6, fmt::format("distance to |0><0| after 2000 collisions = {:.3e} (needs < 1e-6)", dist));
  o.require(monotone, "D(k) nonincreasing");
  o.require(pair.records.back().N_cumulative == 0.0, fmt::format("N = {:.3g}", pair.records.back().N_cumulative));
  o.require(secs < 5.0, fmt::format("runtime {:.2f} s", secs));
  return o;
}

Outcome full_swap() {
  Outcome o;
  CouplingConfig c{0.05, kHalfPi, Separate{1}};
  const ComplexMatrix u = u_ee(c, RegisterLayout({"E1", "E2"}), "E1");
  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1;
  const double err = (u - std::exp(std::complex<double>(0, -std::numbers::pi / 4)) * swap).cwiseAbs().maxCoeff();
  o.require(err < 1e-12, fmt::format("max deviation {:.2e}", err));
  return o;
}

Outcome separate_ordering(const Families& f) {
  Outcome o;
  const auto& s = f.separate_summary;
  bool increasing = true, saturated = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    saturated = saturated && s[i].saturated;
    if (i > 0) increasing = increasing && s[i].N > s[i - 1].N;
  }
  o.require(saturated, "all saturated");
  o.require(increasing, "N strictly increasing: " + n_list(s));
  std::string onsets;
  bool onset_ok = true;
  for (std::size_t i = 0; i < f.separate_records.size(); ++i) {
    const std::size_t k = first_positive_delta(f.separate_records[i]);
    const auto j = static_cast<std::size_t>(std::get<Separate>(f.separate[i].sim.coupling.env_model).range);
    onset_ok = onset_ok && k == j + 1;
    onsets += fmt::format("{}j={}: k={}", onsets.empty() ? "" : ", ", j, k);
  }
  o.require(onset_ok, "first positive delta_D at k = j+1 (observed " + onsets + ")");
  o.require(f.separate_seconds < 60.0, fmt::format("runtime {:.1f} s", f.separate_seconds));
  return o;
}

Outcome collective_optima() {
  Outcome o;
  struct Target {
    int range;
    double center;  // in units of pi/2
    double lo, hi;
  };
  const std::vector<Target> targets{{2, 0.6, 0.4, 0.8}, {3, 0.43, 0.23, 0.63}, {4, 0.33, 0.13, 0.53}};
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& t : targets) {
    ExperimentConfig cfg;
    cfg.sim = model_config(Collective{t.range}, 0.0);
    cfg.sweep = SweepSpec{t.lo * kHalfPi, t.hi * kHalfPi, 41, ""};
    const auto res = run_sweep(cfg);
    const double at = res.points[res.argmax].g_ee / kHalfPi;
    o.require(std::abs(at - t.center) <= 0.05 + 1e-12,
              fmt::format("collective:{} argmax {:.3f}*pi/2 (N={:.4g}), target {}", t.range, at, res.points[res.argmax].N, t.center));
    SimulationConfig swap_point = model_config(Collective{t.range}, kHalfPi);
    swap_point.compute_bounds = false;
    const double n = run(swap_point).back().N_cumulative;
    o.require(n < 1e-6, fmt::format("collective:{} N(pi/2) = {:.2e}", t.range, n));
  }
  o.detail += fmt::format("; runtime {:.0f} s", seconds_since(t0));
  return o;
}

Outcome collective_ordering(const Families& f) {
  Outcome o;
  std::map<int, const ModelSummary*> by_range;
  for (std::size_t i = 0; i < f.collective.size(); ++i)
    by_range[std::get<Collective>(f.collective[i].sim.coupling.env_model).max_range] = &f.collective_summary[i];
  bool saturated = true;
  for (const auto& s : f.collective_summary) saturated = saturated && s.saturated;
  o.require(saturated, "all saturated");
  o.require(by_range[2]->N > by_range[3]->N, fmt::format("N({{1,2}}) = {:.6g} > N({{1,2,3}}) = {:.6g}", by_range[2]->N, by_range[3]->N));
  o.require(by_range[3]->N > by_range[4]->N, fmt::format("N({{1,2,3}}) > N({{1,2,3,4}}) = {:.6g}", by_range[4]->N));
  o.require(by_range[4]->N > by_range[1]->N, fmt::format("N({{1,2,3,4}}) > N({{1}}) = {:.6g}", by_range[1]->N));
  // {1} is the nn separate model itself, so the cross-family comparison uses ranges 2..4.
  double min_collective = 1e300, max_separate = 0;
  for (int r = 2; r <= 4; ++r) min_collective = std::min(min_collective, by_range[r]->N);
  for (const auto& s : f.separate_summary) max_separate = std::max(max_separate, s.N);
  o.require(min_collective > max_separate, fmt::format("min collective {:.6g} > max separate {:.6g}", min_collective, max_separate));
  return o;
}

Outcome consecutive_equivalence() {
  Outcome o;
  SimulationConfig both = model_config(Consecutive{{Stage{1, kHalfPi}, Stage{2, kHalfPi}}}, 0.0);
  SimulationConfig nn = model_config(Separate{1}, kHalfPi);
  both.compute_bounds = nn.compute_bounds = false;
  const auto rb = run(both), rn = run(nn);
  const auto sb = saturation(rb), sn = saturation(rn);
  o.require(sb.saturated && sn.saturated, "both saturated");
  o.require(std::abs(sb.value - sn.value) < 1e-9, fmt::format("N = {:.12g} vs sole nn {:.12g}", sb.value, sn.value));
  return o;
}

Outcome coherence_link(const Families& f) {
  Outcome o;
  auto family_ok = [&](std::vector<const ModelSummary*> fam, const std::string& name) {
    std::sort(fam.begin(), fam.end(), [](auto* a, auto* b) { return a->N < b->N; });
    bool ok = true;
    std::string trail;
    for (std::size_t i = 0; i < fam.size(); ++i) {
      if (i > 0) ok = ok && fam[i]->coherence_index > fam[i - 1]->coherence_index;
      trail += fmt::format("{}{}(N={:.4g}): {}", trail.empty() ? "" : ", ", fam[i]->label, fam[i]->N, fam[i]->coherence_index);
    }
    o.require(ok, name + " index increasing with N [" + trail + "]");
  };
  std::vector<const ModelSummary*> sep, col;
  for (const auto& s : f.separate_summary) sep.push_back(&s);
  for (std::size_t i = 1; i < f.collective_summary.size(); ++i) col.push_back(&f.collective_summary[i]);
  family_ok(sep, "separate");
  family_ok(col, "collective");
  std::size_t max_sep = 0, min_col = SIZE_MAX;
  for (auto* s : sep) max_sep = std::max(max_sep, s->coherence_index);
  for (auto* s : col) min_col = std::min(min_col, s->coherence_index);
  o.require(static_cast<double>(min_col) > 5.0 * static_cast<double>(max_sep),
            fmt::format("min collective index {} > 5 x max separate index {}", min_col, max_sep));
  return o;
}

Outcome mi_phenomenology(const Families& f) {
  Outcome o;
  std::vector<const ModelSummary*> all;
  for (const auto& s : f.separate_summary) all.push_back(&s);
  for (const auto& s : f.collective_summary) all.push_back(&s);
  for (auto* s : all) {
    o.require(s->mi_index <= s->saturation_index / 2,
              fmt::format("{}: MI < 1e-6 from k={}, saturation k={}", s->label, s->mi_index, s->saturation_index));
  }
  return o;
}

Outcome bound_violation() {
  Outcome o;
  SimulationConfig c = model_config(Separate{1}, kHalfPi);
  c.bound_mode = BoundMode::PostErasure;
  const auto recs = run(c);
  std::size_t witness = 0;
  bool corr_zero = true;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    corr_zero = corr_zero && recs[k].B_corr == 0.0;
    if (!witness && k > 0 && recs[k].delta_D > 0.5 * recs[k].B_env + 1e-9) witness = k;
  }
  o.require(witness > 0, witness ? fmt::format("first violation at k={} (delta_D={:.3e}, B_env/2={:.3e})", witness, recs[witness].delta_D,
                                               0.5 * recs[witness].B_env)
                                 : "no violation found");
  o.require(corr_zero, "B_corr = 0 exactly for all k");
  return o;
}

Outcome bound_satisfaction(const Families& f) {
  Outcome o;
  std::vector<ModelEntry> entries = f.separate;
  entries.insert(entries.end(), f.collective.begin(), f.collective.end());
  std::vector<double> worst(entries.size(), -1e300);
  std::vector<bool> start_zero(entries.size(), false);
  parallel_for(entries.size(), 0, [&](std::size_t i) {
    SimulationConfig c = entries[i].sim;
    c.compute_bounds = true;
    c.bound_mode = BoundMode::PreErasure;
    const auto recs = run(c);
    start_zero[i] = recs[0].B_env == 0.0 && recs[0].B_corr == 0.0;
    for (std::size_t k = 1; k < recs.size(); ++k)
      worst[i] = std::max(worst[i], recs[k].delta_D - 0.5 * (recs[k].B_env + recs[k].B_corr));
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    o.require(worst[i] <= 1e-9, fmt::format("{}: max(delta_D - bound) = {:.2e}", entries[i].label, worst[i]));
    o.require(start_zero[i], entries[i].label + ": B_env = B_corr = 0 at k = 0");
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  struct Case {
    EnvModel model;
    double g;
    std::size_t env;
  };
  const std::vector<Case> cases{{Separate{1}, kHalfPi, 5}, {Separate{2}, kHalfPi, 6}, {Collective{2}, 0.6 * kHalfPi, 6}};
  for (const auto& cs : cases) {
    SimulationConfig c = model_config(cs.model, cs.g);
    c.collisions = 4;
    const auto a = run(c), b = brute_force_run(c, cs.env);
    double gap = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double pairs[][2] = {{a[k].D, b[k].D},           {a[k].delta_D, b[k].delta_D}, {a[k].N_cumulative, b[k].N_cumulative},
                                 {a[k].C_l1[0], b[k].C_l1[0]}, {a[k].C_l1[1], b[k].C_l1[1]}, {a[k].MI[0], b[k].MI[0]},
                                 {a[k].MI[1], b[k].MI[1]},     {a[k].B_env, b[k].B_env},     {a[k].B_corr, b[k].B_corr},
                                 {a[k].bound, b[k].bound}};
      for (const auto& p : pairs) gap = std::max(gap, std::abs(p[0] - p[1]));
    }
    o.require(a.size() == b.size() && gap < 1e-10, fmt::format("{}: max gap {:.2e}", to_string(cs.model), gap));
  }
  return o;
}

Outcome numerical_hygiene() {
  Outcome o;
  SimulationConfig c = model_config(Collective{4}, 0.33 * kHalfPi);
  c.collisions = 20000;
  c.compute_bounds = false;
  auto pair = init(c);
  const auto ops = CollisionOperators::build(c);
  for (std::size_t i = 0; i < c.collisions; ++i) collide_step(pair, c, ops);
  double herm = 0, tr = 0, neg = 0;
  for (const auto& s : pair.states) {
    const auto v = s.joint().violations();
    herm = std::max(herm, v.hermiticity);
    tr = std::max(tr, v.trace);
    neg = std::max(neg, v.negativity);
  }
  o.require(herm < 1e-8, fmt::format("hermiticity {:.1e}", herm));
  o.require(tr < 1e-8, fmt::format("trace {:.1e}", tr));
  o.require(neg < 1e-8, fmt::format("negativity {:.1e}", neg));
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "homogenization", homogenization);
  report(2, "full SWAP identity", full_swap);

  const auto t0 = std::chrono::steady_clock::now();
  const Families families = build_families();
  std::printf("      family runs: %.1f s\n", seconds_since(t0));

  report(3, "separate ordering", [&] { return separate_ordering(families); });
  report(4, "collective optima", collective_optima);
  report(5, "collective ordering", [&] { return collective_ordering(families); });
  report(6, "consecutive equivalence", consecutive_equivalence);
  report(7, "coherence link", [&] { return coherence_link(families); });
  report(8, "mutual information", [&] { return mi_phenomenology(families); });
  report(9, "bound violation post-erasure", bound_violation);
  report(10, "bound satisfaction pre-erasure", [&] { return bound_satisfaction(families); });
  report(11, "oracle equivalence", oracle_equivalence);
  report(12, "numerical hygiene", numerical_hygiene);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
