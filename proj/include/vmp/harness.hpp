#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmp/config.hpp"
#include "vmp/episode.hpp"
#include "vmp/evaluation.hpp"
#include "vmp/scene.hpp"

namespace vmp {

// Built-in scenario or scene file; every segment gets run.time_budget.
inline Scenario load_scenario(const RunConfig& c) {
  Scenario sc;
  if (!c.scene_file.empty()) {
    std::ifstream in(c.scene_file);
    if (!in) throw ConfigError("cannot open scene file '" + c.scene_file + "'");
    sc = read_scenario(in, c.scene_file);
  } else {
    ScenarioSpec spec;
    spec.name = c.scenario;
    spec.time_budget = c.time_budget;
    try {
      sc = build_scenario(spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  for (SegmentPlacement& s : sc.segments) s.time_budget = c.time_budget;
  return sc;
}

// Directory-friendly scenario label.
inline std::string scenario_label(const RunConfig& c) {
  if (c.scene_file.empty()) return c.scenario;
  std::string name = c.scene_file.substr(c.scene_file.find_last_of("/\\") + 1);
  const auto dot = name.rfind('.');
  if (dot != std::string::npos && dot > 0) name.erase(dot);
  return name;
}

struct RunResult {
  std::string planner;
  std::uint64_t seed{0};
  MetricsLog log;
  RunSummary summary;
  OccupancyMap map;
};

inline RunResult run_planner(const Scenario& sc, const RunConfig& c, const std::string& planner,
                             std::uint64_t seed) {
  auto finish = [&](auto& episode) {
    MetricsLog log = episode.run();
    RunSummary summary = summarize(log);
    return RunResult{planner, seed, std::move(log), summary, episode.map()};
  };
  if (planner == "vmp") {
    VmpEpisode ep(sc.scene, sc.segments, c.settings, seed);
    return finish(ep);
  }
  if (planner == "rvp") {
    RvpEpisode ep(sc.scene, sc.segments, c.settings, seed);
    return finish(ep);
  }
  throw ConfigError("unknown planner '" + planner + "'");
}

// ---------------------------------------------------------------------------
// Comparison statistics

struct MeanStd {
  double mean{0.0};
  double std{0.0};  // sample standard deviation
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd m;
  if (v.empty()) return m;
  m.mean = mean(v);
  if (v.size() > 1) {
    double ss = 0.0;
    for (const double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

struct BoxSummary {
  std::size_t n{0};
  double min{0}, q1{0}, median{0}, q3{0}, max{0};
};

// Quartiles by linear interpolation between order statistics.
inline BoxSummary box_summary(std::vector<double> v) {
  BoxSummary b;
  b.n = v.size();
  if (v.empty()) return b;
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  b.min = v.front();
  b.q1 = q(0.25);
  b.median = q(0.5);
  b.q3 = q(0.75);
  b.max = v.back();
  return b;
}

inline void write_runs_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "planner,seed,fruits_detected_final,poses_executed,replans,collision_aborts,"
        "mean_inter_pose_interval,median_inter_pose_interval\n";
  for (const RunResult& r : runs)
    os << r.planner << "," << r.seed << "," << r.summary.fruits_detected_final << ","
       << r.summary.poses_executed << "," << r.summary.replans << "," << r.summary.collision_aborts
       << "," << format_fixed(r.summary.mean_inter_pose_interval) << ","
       << format_fixed(r.summary.median_inter_pose_interval) << "\n";
}

inline void write_timelines_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "planner,seed,sim_time,fruits\n";
  for (const RunResult& r : runs)
    for (const TimelinePoint& p : detection_timeline(r.log))
      os << r.planner << "," << r.seed << "," << format_fixed(p.sim_time) << "," << p.fruits << "\n";
}

// Detection-vs-time curves, one polyline per run, with dashed segment markers.
inline void write_detection_svg(std::ostream& os, const std::vector<RunResult>& runs,
                                double segment_budget, std::size_t n_segments,
                                std::size_t n_fruits) {
  const double w = 800, h = 450, left = 60, right = 20, top = 20, bottom = 50;
  const double t_end = std::max(1.0, segment_budget * static_cast<double>(n_segments));
  const double y_max = std::max<double>(1.0, static_cast<double>(n_fruits));
  auto px = [&](double t) { return left + (w - left - right) * t / t_end; };
  auto py = [&](double f) { return h - bottom - (h - top - bottom) * f / y_max; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t s = 1; s < n_segments; ++s) {
    const double x = px(segment_budget * static_cast<double>(s));
    os << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << h - bottom
       << "\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"/>\n";
  }
  os << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\""
     << h - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (w / 2) << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">time [s]</text>\n";
  os << "<text x=\"15\" y=\"" << (h / 2) << "\" transform=\"rotate(-90 15 " << (h / 2)
     << ")\" text-anchor=\"middle\">detected fruits</text>\n";
  os << "<text x=\"" << left << "\" y=\"" << h - bottom + 15 << "\" text-anchor=\"middle\">0</text>\n";
  os << "<text x=\"" << px(t_end) << "\" y=\"" << h - bottom + 15 << "\" text-anchor=\"middle\">"
     << format_fixed(t_end, 0) << "</text>\n";
  os << "<text x=\"" << left - 5 << "\" y=\"" << py(y_max) + 4 << "\" text-anchor=\"end\">"
     << n_fruits << "</text>\n";
  for (const RunResult& r : runs) {
    const char* color = r.planner == "vmp" ? "#1f77b4" : "#d62728";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-opacity=\"0.7\" points=\"";
    double last = 0.0;
    std::size_t fruits = 0;
    for (const TimelinePoint& p : detection_timeline(r.log)) {
      os << px(p.sim_time) << "," << py(static_cast<double>(fruits)) << " ";
      fruits = p.fruits;
      os << px(p.sim_time) << "," << py(static_cast<double>(fruits)) << " ";
      last = p.sim_time;
    }
    os << px(std::max(last, t_end)) << "," << py(static_cast<double>(fruits)) << "\"/>\n";
  }
  os << "<text x=\"" << left + 10 << "\" y=\"" << top + 14 << "\" fill=\"#1f77b4\">VMP</text>\n";
  os << "<text x=\"" << left + 50 << "\" y=\"" << top + 14 << "\" fill=\"#d62728\">RVP</text>\n";
  os << "</svg>\n";
}

}  // namespace vmp
