#include "lrcm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

namespace lrcm {

namespace {

using nlohmann::json;

std::string num(double v) { return fmt::format("{:.17g}", v); }

json record_json(const CollisionRecord& r) {
  return json{{"k", r.k},
              {"D", r.D},
              {"delta_D", r.delta_D},
              {"N_cum", r.N_cumulative},
              {"C_l1_traj1", r.C_l1[0]},
              {"C_l1_traj2", r.C_l1[1]},
              {"MI_traj1", r.MI[0]},
              {"MI_traj2", r.MI[1]},
              {"B_env", r.B_env},
              {"B_corr", r.B_corr},
              {"bound", r.bound}};
}

std::string records_text(OutputFormat format, const std::vector<CollisionRecord>& records) {
  std::ostringstream ss;
  if (format == OutputFormat::Csv) {
    write_records_csv(ss, records);
  } else {
    write_records_json(ss, records);
  }
  return ss.str();
}

}  // namespace

const std::vector<std::string> kRecordColumns{"k",          "D",        "delta_D", "N_cum", "C_l1_traj1", "C_l1_traj2",
                                              "MI_traj1",   "MI_traj2", "B_env",   "B_corr", "bound"};

void write_records_csv(std::ostream& out, const std::vector<CollisionRecord>& records) {
  for (std::size_t i = 0; i < kRecordColumns.size(); ++i) out << (i ? "," : "") << kRecordColumns[i];
  out << '\n';
  for (const auto& r : records) {
    out << r.k << ',' << num(r.D) << ',' << num(r.delta_D) << ',' << num(r.N_cumulative) << ',' << num(r.C_l1[0]) << ','
        << num(r.C_l1[1]) << ',' << num(r.MI[0]) << ',' << num(r.MI[1]) << ',' << num(r.B_env) << ',' << num(r.B_corr)
        << ',' << num(r.bound) << '\n';
  }
}

void write_records_json(std::ostream& out, const std::vector<CollisionRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_json(r));
  out << arr.dump(1) << '\n';
}

std::vector<CollisionRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty record file");
  std::string expected;
  for (std::size_t i = 0; i < kRecordColumns.size(); ++i) expected += (i ? "," : "") + kRecordColumns[i];
  if (line != expected) throw InputError("unexpected header '" + line + "'");
  std::vector<CollisionRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0' || !std::isfinite(v)) throw InputError(fmt::format("line {}: bad cell '{}'", lineno, cell));
      cells.push_back(v);
    }
    if (cells.size() != kRecordColumns.size()) throw InputError(fmt::format("line {}: expected {} columns", lineno, kRecordColumns.size()));
    CollisionRecord r;
    r.k = static_cast<std::size_t>(cells[0]);
    r.D = cells[1];
    r.delta_D = cells[2];
    r.N_cumulative = cells[3];
    r.C_l1 = {cells[4], cells[5]};
    r.MI = {cells[6], cells[7]};
    r.B_env = cells[8];
    r.B_corr = cells[9];
    r.bound = cells[10];
    out.push_back(r);
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    static std::mutex stdout_mutex;
    std::lock_guard lock(stdout_mutex);
    std::cout << content << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_records(const std::string& path, OutputFormat format, const std::vector<CollisionRecord>& records) {
  write_text(path, records_text(format, records));
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<CollisionRecord> run_experiment(const ExperimentConfig& config) {
  auto records = run(config.sim);
  write_records(config.output, config.format, records);
  return records;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  if (!config.sweep) throw InputError("run_sweep: configuration has no sweep");
  const auto& sw = *config.sweep;
  if (sw.steps < 2) throw InputError("run_sweep: sweep steps must be at least 2");
  if (std::holds_alternative<Consecutive>(config.sim.coupling.env_model)) {
    throw InputError("run_sweep: consecutive models carry per-stage strengths; sweep a separate or collective model");
  }
  if (!sw.per_point_dir.empty()) std::filesystem::create_directories(sw.per_point_dir);

  SweepResult result;
  result.points.resize(sw.steps);
  parallel_for(sw.steps, config.threads, [&](std::size_t i) {
    SimulationConfig sim = config.sim;
    sim.coupling.g_ee = sw.g_ee_min + (sw.g_ee_max - sw.g_ee_min) * static_cast<double>(i) / static_cast<double>(sw.steps - 1);
    sim.compute_bounds = !sw.per_point_dir.empty();
    const auto records = run(sim);
    const auto sat = saturation(records);
    result.points[i] = {sim.coupling.g_ee, sat.value, sat.index, sat.saturated};
    if (!sw.per_point_dir.empty()) {
      const auto ext = config.format == OutputFormat::Csv ? "csv" : "json";
      write_records((std::filesystem::path(sw.per_point_dir) / fmt::format("point_{:04d}.{}", i, ext)).string(), config.format,
                    records);
    }
  });
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    if (result.points[i].N > result.points[result.argmax].N) result.argmax = i;
  }
  return result;
}

void write_sweep(const std::string& path, OutputFormat format, const SweepResult& result, const EnvModel& model) {
  std::ostringstream ss;
  if (format == OutputFormat::Csv) {
    ss << "g_ee,g_ee_over_half_pi,N,saturation_index,saturated,is_argmax\n";
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      const auto& p = result.points[i];
      ss << num(p.g_ee) << ',' << num(p.g_ee / (std::numbers::pi / 2)) << ',' << num(p.N) << ',' << p.saturation_index << ','
         << (p.saturated ? 1 : 0) << ',' << (i == result.argmax ? 1 : 0) << '\n';
    }
  } else {
    json pts = json::array();
    for (const auto& p : result.points) {
      pts.push_back({{"g_ee", p.g_ee}, {"N", p.N}, {"saturation_index", p.saturation_index}, {"saturated", p.saturated}});
    }
    const auto& best = result.points.at(result.argmax);
    json doc{{"env_model", to_string(model)},
             {"points", pts},
             {"argmax", {{"index", result.argmax}, {"g_ee", best.g_ee}, {"g_ee_over_half_pi", best.g_ee / (std::numbers::pi / 2)}, {"N", best.N}}}};
    ss << doc.dump(1) << '\n';
  }
  write_text(path, ss.str());
}

ModelSummary summarize(const std::string& label, const SimulationConfig& sim, const std::vector<CollisionRecord>& records) {
  ModelSummary s;
  s.label = label;
  s.env_model = to_string(sim.coupling.env_model);
  s.g_ee = sim.coupling.g_ee;
  s.collisions = sim.collisions;
  const auto sat = saturation(records);
  s.N = sat.value;
  s.saturation_index = sat.index;
  s.saturated = sat.saturated;
  s.coherence_index = first_below(records, kCoherenceThreshold, [](const CollisionRecord& r) { return std::max(r.C_l1[0], r.C_l1[1]); });
  s.mi_index = settle_index(records, kMutualInfoThreshold, [](const CollisionRecord& r) { return std::max(r.MI[0], r.MI[1]); });
  return s;
}

std::vector<ModelSummary> compare_models(const std::vector<ModelEntry>& entries, std::size_t threads) {
  if (entries.size() < 2) throw InputError("compare_models: need at least two configurations");
  std::vector<ModelSummary> out(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    SimulationConfig sim = entries[i].sim;
    sim.compute_bounds = false;
    out[i] = summarize(entries[i].label, sim, run(sim));
  });
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out[a].N > out[b].N; });
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]].rank = r + 1;
  return out;
}

void write_comparison(const std::string& path, OutputFormat format, const std::vector<ModelSummary>& summaries) {
  std::ostringstream ss;
  if (format == OutputFormat::Csv) {
    ss << "label,env_model,g_ee,collisions,N,saturation_index,saturated,coherence_index,mi_index,rank\n";
    for (const auto& s : summaries) {
      ss << s.label << ',' << s.env_model << ',' << num(s.g_ee) << ',' << s.collisions << ',' << num(s.N) << ','
         << s.saturation_index << ',' << (s.saturated ? 1 : 0) << ',' << s.coherence_index << ',' << s.mi_index << ','
         << s.rank << '\n';
    }
  } else {
    json arr = json::array();
    for (const auto& s : summaries) {
      arr.push_back({{"label", s.label},
                     {"env_model", s.env_model},
                     {"g_ee", s.g_ee},
                     {"collisions", s.collisions},
                     {"N", s.N},
                     {"saturation_index", s.saturation_index},
                     {"saturated", s.saturated},
                     {"coherence_index", s.coherence_index},
                     {"mi_index", s.mi_index},
                     {"rank", s.rank}});
    }
    ss << arr.dump(1) << '\n';
  }
  write_text(path, ss.str());
}

std::vector<ModelEntry> separate_family(const SimulationConfig& base) {
  std::vector<ModelEntry> out;
  for (int j = 1; j <= kMaxRange; ++j) {
    SimulationConfig sim = base;
    sim.coupling.env_model = Separate{j};
    sim.coupling.g_ee = std::numbers::pi / 2;
    out.push_back({fmt::format("separate{}", j), sim});
  }
  return out;
}

std::vector<ModelEntry> collective_family(const SimulationConfig& base) {
  static constexpr double kOptimal[] = {1.0, 0.6, 0.43, 0.33};
  std::vector<ModelEntry> out;
  for (int r = 1; r <= kMaxRange; ++r) {
    SimulationConfig sim = base;
    sim.coupling.env_model = Collective{r};
    sim.coupling.g_ee = kOptimal[r - 1] * std::numbers::pi / 2;
    out.push_back({fmt::format("collective{}", r), sim});
  }
  return out;
}

std::vector<CollisionRecord> consecutive_separate(const ExperimentConfig& config, const std::vector<Stage>& stages) {
  ExperimentConfig c = config;
  c.sim.coupling.env_model = Consecutive{stages};
  validate(c.sim.coupling.env_model);
  return run_experiment(c);
}

}  // namespace lrcm
