#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "lrcm/experiment.hpp"

namespace lrcm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

const std::set<std::string> kKnownKeys{
    "g_se",         "g_ee",          "env_model",     "collisions", "initial_pair", "env_init",
    "bound_mode",   "bound_norm",    "mi_hook",       "sweep.g_ee_min", "sweep.g_ee_max", "sweep.steps",
    "sweep.per_point_dir", "output", "format",        "threads"};

}  // namespace

std::string to_string(BoundMode mode) { return mode == BoundMode::PostErasure ? "post_erasure" : "pre_erasure"; }
std::string to_string(MiHook hook) { return hook == MiHook::PreEe ? "pre_ee" : "post_ee"; }

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(fmt::format("config line {}: expected key = value", lineno));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError(fmt::format("config line {}: empty key", lineno));
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// Longest saturation seen among the built-in models is ~53000 collisions
// (collective:2 at 0.6*pi/2).
std::size_t default_collisions(const EnvModel&) { return 60000; }

ExperimentConfig build_config(const ConfigMap& settings) {
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = settings.find(key);
    return it == settings.end() ? nullptr : &it->second;
  };
  auto guard = [&](const std::string& key, auto&& fn) {
    if (const auto* v = get(key)) {
      try {
        fn(*v);
      } catch (const InputError& e) {
        problems.push_back(key + ": " + e.what());
      }
    }
  };
  auto count = [&](const std::string& text, const std::string& what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw InputError("expected a non-negative integer " + what + ", got '" + text + "'");
    return v;
  };

  for (const auto& [key, value] : settings) {
    if (!kKnownKeys.count(key)) problems.push_back("unknown key '" + key + "'");
  }

  bool model_ok = true;
  if (const auto* v = get("env_model")) {
    try {
      cfg.sim.coupling.env_model = parse_env_model(*v);
    } catch (const InputError& e) {
      problems.push_back(std::string("env_model: ") + e.what());
      model_ok = false;
    }
  } else {
    problems.push_back("env_model: missing (separate:<j>, collective:<r> or consecutive:<j>@<g>,...)");
    model_ok = false;
  }
  const bool consecutive = model_ok && std::holds_alternative<Consecutive>(cfg.sim.coupling.env_model);
  const bool sweeping = get("sweep.g_ee_min") || get("sweep.g_ee_max") || get("sweep.steps");

  guard("g_se", [&](const std::string& v) { cfg.sim.coupling.g_se = parse_angle(v); });
  if (get("g_ee")) {
    guard("g_ee", [&](const std::string& v) { cfg.sim.coupling.g_ee = parse_angle(v); });
  } else if (!consecutive && !sweeping) {
    problems.push_back("g_ee: missing (e-e coupling J_ee*t in radians)");
  }
  guard("collisions", [&](const std::string& v) {
    cfg.sim.collisions = count(v, "collision count");
    if (cfg.sim.collisions < 1) throw InputError("must be at least 1");
  });
  if (!get("collisions") && model_ok) cfg.sim.collisions = default_collisions(cfg.sim.coupling.env_model);
  guard("initial_pair", [&](const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) throw InputError("expected two states separated by a comma");
    cfg.sim.initial_pair = {QubitState::parse(trim(v.substr(0, comma))), QubitState::parse(trim(v.substr(comma + 1)))};
  });
  guard("env_init", [&](const std::string& v) { cfg.sim.env_init = QubitState::parse(v); });
  guard("bound_mode", [&](const std::string& v) {
    if (v == "post_erasure") cfg.sim.bound_mode = BoundMode::PostErasure;
    else if (v == "pre_erasure") cfg.sim.bound_mode = BoundMode::PreErasure;
    else throw InputError("expected post_erasure or pre_erasure, got '" + v + "'");
  });
  guard("bound_norm", [&](const std::string& v) {
    if (v == "trace") cfg.sim.bound_norm = BoundNorm::Trace;
    else if (v == "operator") cfg.sim.bound_norm = BoundNorm::Operator;
    else throw InputError("expected trace or operator, got '" + v + "'");
  });
  guard("mi_hook", [&](const std::string& v) {
    if (v == "pre_ee") cfg.sim.mi_hook = MiHook::PreEe;
    else if (v == "post_ee") cfg.sim.mi_hook = MiHook::PostEe;
    else throw InputError("expected pre_ee or post_ee, got '" + v + "'");
  });
  guard("output", [&](const std::string& v) { cfg.output = v; });
  guard("format", [&](const std::string& v) {
    if (v == "csv") cfg.format = OutputFormat::Csv;
    else if (v == "json") cfg.format = OutputFormat::Json;
    else throw InputError("expected csv or json, got '" + v + "'");
  });
  guard("threads", [&](const std::string& v) { cfg.threads = count(v, "thread count"); });

  if (sweeping) {
    SweepSpec sweep;
    bool complete = true;
    for (const char* key : {"sweep.g_ee_min", "sweep.g_ee_max", "sweep.steps"}) {
      if (!get(key)) {
        problems.push_back(std::string(key) + ": missing (sweeps need min, max and steps)");
        complete = false;
      }
    }
    guard("sweep.g_ee_min", [&](const std::string& v) { sweep.g_ee_min = parse_angle(v); });
    guard("sweep.g_ee_max", [&](const std::string& v) { sweep.g_ee_max = parse_angle(v); });
    guard("sweep.steps", [&](const std::string& v) {
      sweep.steps = count(v, "step count");
      if (sweep.steps < 2) throw InputError("must be at least 2");
    });
    guard("sweep.per_point_dir", [&](const std::string& v) { sweep.per_point_dir = v; });
    if (complete) cfg.sweep = sweep;
  }

  if (problems.empty()) {
    try {
      validate(cfg.sim);
    } catch (const InputError& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw InputError(msg);
  }
  return cfg;
}

}  // namespace lrcm
