#include "lrcm/model.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

namespace lrcm {

namespace {

std::size_t env_index(const std::string& label) {
  std::size_t idx = 0;
  if (label.size() < 2 || label[0] != 'E') throw InputError("'" + label + "' is not an environment label");
  auto [ptr, ec] = std::from_chars(label.data() + 1, label.data() + label.size(), idx);
  if (ec != std::errc() || ptr != label.data() + label.size()) {
    throw InputError("'" + label + "' is not an environment label");
  }
  return idx;
}

std::string partner(const std::string& source, int range) {
  return RegisterLayout::env_label(env_index(source) + static_cast<std::size_t>(range));
}

void require_label(const RegisterLayout& layout, const std::string& label) {
  if (!layout.contains(label)) throw InputError("layout has no qubit '" + label + "'");
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw InputError("cannot parse " + what + " from '" + text + "'");
  return v;
}

}  // namespace

double parse_angle(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  double value = 0;
  if (parse_number(text, value)) return value;

  const auto pi_at = text.find("pi");
  if (pi_at == std::string::npos) throw InputError("cannot parse angle '" + raw + "'");
  double factor = 1;
  double divisor = 1;
  const std::string before = text.substr(0, pi_at);
  const std::string after = text.substr(pi_at + 2);
  if (!before.empty()) {
    if (before.back() != '*' || !parse_number(before.substr(0, before.size() - 1), factor)) {
      throw InputError("cannot parse angle '" + raw + "'");
    }
  }
  if (!after.empty()) {
    if (after.front() != '/' || !parse_number(after.substr(1), divisor) || divisor == 0) {
      throw InputError("cannot parse angle '" + raw + "'");
    }
  }
  return factor * std::numbers::pi / divisor;
}

void validate(const EnvModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Separate>) {
          if (m.range < 1 || m.range > kMaxRange) throw InputError(fmt::format("separate range {} outside 1..{}", m.range, kMaxRange));
        } else if constexpr (std::is_same_v<T, Collective>) {
          if (m.max_range < 1 || m.max_range > kMaxRange) {
            throw InputError(fmt::format("collective range {} outside 1..{}", m.max_range, kMaxRange));
          }
        } else {
          if (m.stages.empty()) throw InputError("consecutive model needs at least one stage");
          int last = 0;
          for (const auto& s : m.stages) {
            if (s.range < 1 || s.range > kMaxRange) throw InputError(fmt::format("stage range {} outside 1..{}", s.range, kMaxRange));
            if (s.range <= last) throw InputError("consecutive stages must be ordered by strictly increasing range");
            if (!std::isfinite(s.strength)) throw InputError("stage strength must be finite");
            last = s.range;
          }
        }
      },
      model);
}

std::string to_string(const EnvModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Separate>) {
          return fmt::format("separate:{}", m.range);
        } else if constexpr (std::is_same_v<T, Collective>) {
          return fmt::format("collective:{}", m.max_range);
        } else {
          std::string s = "consecutive:";
          for (std::size_t i = 0; i < m.stages.size(); ++i) {
            if (i) s += ",";
            s += fmt::format("{}@{:.17g}", m.stages[i].range, m.stages[i].strength);
          }
          return s;
        }
      },
      model);
}

EnvModel parse_env_model(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("env_model '" + text + "' must look like kind:arg");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  EnvModel model;
  if (kind == "separate") {
    model = Separate{parse_int(arg, "separate range")};
  } else if (kind == "collective") {
    model = Collective{parse_int(arg, "collective range")};
  } else if (kind == "consecutive") {
    Consecutive c;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto at = item.find('@');
      if (at == std::string::npos) throw InputError("consecutive stage '" + item + "' must look like range@strength");
      c.stages.push_back({parse_int(item.substr(0, at), "stage range"), parse_angle(item.substr(at + 1))});
    }
    model = std::move(c);
  } else {
    throw InputError("unknown env_model kind '" + kind + "' (expected separate, collective or consecutive)");
  }
  validate(model);
  return model;
}

ComplexMatrix u_se(const CouplingConfig& config, const RegisterLayout& layout, const std::string& env_label) {
  require_label(layout, "S");
  require_label(layout, env_label);
  return expm_herm(embed_pair<double>(h_se_pair(), layout, "S", env_label), config.g_se);
}

ComplexMatrix h_ee_generator(const CouplingConfig& config, const RegisterLayout& layout, const std::string& source) {
  validate(config.env_model);
  require_label(layout, source);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  auto add = [&](int range, double strength) {
    const auto other = partner(source, range);
    require_label(layout, other);
    h += strength * embed_pair<double>(h_heis_pair(), layout, source, other);
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Separate>) {
          add(m.range, config.g_ee);
        } else if constexpr (std::is_same_v<T, Collective>) {
          for (int j = 1; j <= m.max_range; ++j) add(j, config.g_ee);
        } else {
          for (const auto& s : m.stages) add(s.range, s.strength);
        }
      },
      config.env_model);
  return h;
}

ComplexMatrix u_ee(const CouplingConfig& config, const RegisterLayout& layout, const std::string& source) {
  validate(config.env_model);
  require_label(layout, source);
  if (const auto* c = std::get_if<Consecutive>(&config.env_model)) {
    // Stages act one after another, each its own exponential.
    const auto dim = static_cast<Eigen::Index>(layout.dim());
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    for (const auto& s : c->stages) {
      const auto other = partner(source, s.range);
      require_label(layout, other);
      u = expm_herm(embed_pair<double>(h_heis_pair(), layout, source, other), s.strength) * u;
    }
    return u;
  }
  // h_ee_generator already carries g_ee, so exponentiate at unit angle.
  return expm_herm(h_ee_generator(config, layout, source), 1.0);
}

ComplexMatrix u_ee_window(const CouplingConfig& config) {
  const auto w = static_cast<std::size_t>(max_range(config.env_model)) + 1;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < w; ++i) labels.push_back(RegisterLayout::env_label(i));
  return u_ee(config, RegisterLayout(std::move(labels)), RegisterLayout::env_label(0));
}

}  // namespace lrcm
