#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmp/episode.hpp"

namespace vmp {

struct RunConfig {
  std::string planner{"vmp"};
  std::string scenario{"scenario1"};
  std::string scene_file;  // overrides scenario when set
  std::uint64_t seed{0};
  double time_budget{60.0};
  int n_runs{5};
  EpisodeSettings settings;

  void validate() const {
    if (planner != "vmp" && planner != "rvp")
      throw std::invalid_argument("run.planner must be 'vmp' or 'rvp'");
    if (!(time_budget >= 0.0)) throw std::invalid_argument("run.time_budget must be >= 0");
    if (n_runs < 1) throw std::invalid_argument("run.n_runs must be >= 1");
    settings.validate();
  }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct ConfigField {
  std::function<std::string()> get;
  std::function<void(const std::string&)> set;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

inline ConfigField field(double& v) {
  return {[&v] { return fmt_double(v); }, [&v](const std::string& s) { v = parse_number<double>(s); }};
}
template <std::integral T>
ConfigField field(T& v) {
  return {[&v] { return std::to_string(v); }, [&v](const std::string& s) { v = parse_number<T>(s); }};
}
inline ConfigField field(bool& v) {
  return {[&v] { return std::string(v ? "true" : "false"); },
          [&v](const std::string& s) { v = parse_bool(s); }};
}
inline ConfigField field(std::string& v) {
  return {[&v] { return v; }, [&v](const std::string& s) { v = s; }};
}
inline ConfigField field(SamplingMode& v) {
  return {[&v] { return std::string(v == SamplingMode::Range ? "range" : "workspace"); },
          [&v](const std::string& s) {
            if (s == "range") v = SamplingMode::Range;
            else if (s == "workspace") v = SamplingMode::Workspace;
            else throw ConfigError("sampler.mode must be 'range' or 'workspace'");
          }};
}

// Ordered key table bound to the fields of `c`.
inline std::map<std::string, ConfigField> config_fields(RunConfig& c) {
  EpisodeSettings& e = c.settings;
  return {
      {"run.planner", field(c.planner)},
      {"run.scenario", field(c.scenario)},
      {"run.scene_file", field(c.scene_file)},
      {"run.seed", field(c.seed)},
      {"run.time_budget", field(c.time_budget)},
      {"run.n_runs", field(c.n_runs)},
      {"sampler.p_roi", field(e.sampler.p_roi)},
      {"sampler.p_occ", field(e.sampler.p_occ)},
      {"sampler.p_free", field(e.sampler.p_free)},
      {"sampler.d_min", field(e.sampler.d_min)},
      {"sampler.d_max", field(e.sampler.d_max)},
      {"sampler.n_candidates", field(e.sampler.n_candidates)},
      {"sampler.max_targets", field(e.sampler.max_targets)},
      {"sampler.mode", field(e.sampler.mode)},
      {"sampler.use_band", field(e.sampler.use_band)},
      {"planner.k_nn", field(e.planner.k_nn)},
      {"planner.lookahead", field(e.planner.lookahead)},
      {"planner.replan_interval", field(e.planner.replan_interval)},
      {"planner.expansion_cost", field(e.planner.expansion_cost)},
      {"planner.sample_cost", field(e.planner.sample_cost)},
      {"planner.graph_budget", field(e.planner.graph_budget)},
      {"planner.targets_per_slice", field(e.planner.targets_per_slice)},
      {"planner.sense_cost", field(e.planner.sense_cost)},
      {"planner.execution_noise", field(e.planner.execution_noise)},
      {"planner.wall_clock", field(e.planner.wall_clock)},
      {"planner.clear_misses", field(e.planner.clear_misses)},
      {"rvp.w_roi", field(e.rvp.w_roi)},
      {"rvp.motion_overhead", field(e.rvp.motion_overhead)},
      {"rvp.targets_per_round", field(e.rvp.targets_per_round)},
      {"motion.v_lin", field(e.motion.v_lin)},
      {"motion.v_ang", field(e.motion.v_ang)},
      {"motion.clearance", field(e.motion.clearance)},
      {"motion.n_checks", field(e.motion.n_checks)},
      {"motion.w_ang", field(e.motion.w_ang)},
      {"camera.hfov", field(e.camera.hfov)},
      {"camera.vfov", field(e.camera.vfov)},
      {"camera.gain_nx", field(e.camera.gain_rays.nx)},
      {"camera.gain_ny", field(e.camera.gain_rays.ny)},
      {"camera.sensor_nx", field(e.camera.sensor_rays.nx)},
      {"camera.sensor_ny", field(e.camera.sensor_rays.ny)},
      {"camera.max_range", field(e.camera.max_range)},
      {"camera.min_range", field(e.camera.min_range)},
      {"camera.range_noise_sigma", field(e.camera.range_noise_sigma)},
      {"map.resolution", field(e.map.resolution)},
      {"map.l_hit", field(e.map.l_hit)},
      {"map.l_miss", field(e.map.l_miss)},
      {"map.r_hit", field(e.map.r_hit)},
      {"map.r_miss", field(e.map.r_miss)},
      {"map.l_min", field(e.map.l_min)},
      {"map.l_max", field(e.map.l_max)},
      {"map.occ_threshold", field(e.map.occ_threshold)},
      {"map.roi_threshold", field(e.map.roi_threshold)},
      {"eval.min_cluster_cells", field(e.eval.min_cluster_cells)},
      {"eval.match_extra_tol", field(e.eval.match_extra_tol)},
  };
}

}  // namespace detail

// Applies one `section.key = value` assignment.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  auto fields = detail::config_fields(c);
  const auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError("unknown key '" + key + "'");
  try {
    it->second.set(value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

// Reads `section.key = value` lines on top of `base`. Blank lines and text after
// '#' are ignored.
inline RunConfig parse_config(std::istream& is, RunConfig base = {}) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      set_config_value(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
  std::istringstream is(text);
  return parse_config(is, std::move(base));
}

inline void write_config(std::ostream& os, const RunConfig& c) {
  RunConfig copy = c;
  std::string section;
  for (const auto& [key, f] : detail::config_fields(copy)) {
    const std::string s = key.substr(0, key.find('.'));
    if (s != section) {
      if (!section.empty()) os << "\n";
      section = s;
    }
    os << key << " = " << f.get() << "\n";
  }
}

inline std::string config_to_string(const RunConfig& c) {
  std::ostringstream os;
  write_config(os, c);
  return os.str();
}

}  // namespace vmp
