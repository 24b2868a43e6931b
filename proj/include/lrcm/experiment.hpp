#pragma once

// Experiment orchestration: configuration files, single runs, coupling
// sweeps, model comparisons, and CSV/JSON emission.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrcm/engine.hpp"

namespace lrcm {

enum class OutputFormat { Csv, Json };

struct SweepSpec {
  double g_ee_min = 0;
  double g_ee_max = 0;
  std::size_t steps = 2;
  std::string per_point_dir;  // empty: no per-point record files
};

struct ExperimentConfig {
  SimulationConfig sim;
  std::optional<SweepSpec> sweep;
  std::string output;  // empty or "-": standard output
  OutputFormat format = OutputFormat::Csv;
  std::size_t threads = 0;  // 0: hardware concurrency
};

/// Flat key/value settings, one `key = value` per line, `#` starts a comment.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

/// Builds a validated config. Every problem found is listed in one InputError.
/// `g_ee` is required unless the model is consecutive.
ExperimentConfig build_config(const ConfigMap& settings);

/// Collision count used when the settings do not give one.
std::size_t default_collisions(const EnvModel& model);


std::string to_string(BoundMode mode);
std::string to_string(MiHook hook);

// ---- emission -------------------------------------------------------------

extern const std::vector<std::string> kRecordColumns;

void write_records_csv(std::ostream& out, const std::vector<CollisionRecord>& records);
void write_records_json(std::ostream& out, const std::vector<CollisionRecord>& records);
void write_records(const std::string& path, OutputFormat format, const std::vector<CollisionRecord>& records);

/// Parses the CSV produced by write_records_csv. Throws InputError on a bad header or non-finite cell.
std::vector<CollisionRecord> read_records_csv(std::istream& in);

/// Writes `content` to `path`, or to stdout when path is empty or "-".
/// Throws IoError naming the path on failure.
void write_text(const std::string& path, const std::string& content);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- operations -----------------------------------------------------------

/// Runs `count` independent tasks on up to `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

std::vector<CollisionRecord> run_experiment(const ExperimentConfig& config);

struct SweepPoint {
  double g_ee = 0;
  double N = 0;
  std::size_t saturation_index = 0;
  bool saturated = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::size_t argmax = 0;
};

/// Evaluates the end-of-run N on an evenly spaced g_ee grid, points in parallel.
SweepResult run_sweep(const ExperimentConfig& config);
void write_sweep(const std::string& path, OutputFormat format, const SweepResult& result, const EnvModel& model);

struct ModelEntry {
  std::string label;
  SimulationConfig sim;
};

struct ModelSummary {
  std::string label;
  std::string env_model;
  double g_ee = 0;
  std::size_t collisions = 0;
  double N = 0;
  std::size_t saturation_index = 0;
  bool saturated = false;
  std::size_t coherence_index = 0;  // first k with both C_l1 < 1e-3
  std::size_t mi_index = 0;         // k after which both MI stay < 1e-6
  std::size_t rank = 0;             // 1 = largest N
};

inline constexpr double kCoherenceThreshold = 1e-3;
inline constexpr double kMutualInfoThreshold = 1e-6;

ModelSummary summarize(const std::string& label, const SimulationConfig& sim, const std::vector<CollisionRecord>& records);

/// Runs every entry (in parallel) and ranks them by N.
std::vector<ModelSummary> compare_models(const std::vector<ModelEntry>& entries, std::size_t threads = 0);
void write_comparison(const std::string& path, OutputFormat format, const std::vector<ModelSummary>& summaries);

/// Entries for the separate models 1..4 at g_ee = pi/2.
std::vector<ModelEntry> separate_family(const SimulationConfig& base);
/// Entries for the collective models {1}, {1,2}, {1,2,3}, {1,2,3,4} at their optimal angles.
std::vector<ModelEntry> collective_family(const SimulationConfig& base);

/// Runs a consecutive separate interaction; stages must have strictly increasing range.
std::vector<CollisionRecord> consecutive_separate(const ExperimentConfig& config, const std::vector<Stage>& stages);

}  // namespace lrcm
