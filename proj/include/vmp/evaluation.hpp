#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "vmp/scene.hpp"
#include "vmp/voxel_map.hpp"

namespace vmp {

struct RoiCluster {
  std::vector<CellKey> cells;  // sorted
  Vec3 centroid{Vec3::Zero()};
};

// 26-connected components of Roi cells with at least min_cells members, ordered
// by their smallest key.
inline std::vector<RoiCluster> cluster_roi(const OccupancyMap& map, std::size_t min_cells = 5) {
  std::vector<PackedKey> roi;
  for (const PackedKey p : map.roi_candidates())
    if (map.state(unpack(p)) == CellState::Roi) roi.push_back(p);
  std::sort(roi.begin(), roi.end());
  std::unordered_set<PackedKey> pending(roi.begin(), roi.end());

  std::vector<RoiCluster> out;
  std::vector<CellKey> stack;
  for (const PackedKey seed : roi) {
    if (!pending.erase(seed)) continue;
    RoiCluster cluster;
    stack.assign(1, unpack(seed));
    while (!stack.empty()) {
      const CellKey k = stack.back();
      stack.pop_back();
      cluster.cells.push_back(k);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          for (int dk = -1; dk <= 1; ++dk) {
            const CellKey n{k.i + di, k.j + dj, k.k + dk};
            if (!map.in_bounds(n)) continue;
            if (pending.erase(pack(n))) stack.push_back(n);
          }
    }
    if (cluster.cells.size() < min_cells) continue;
    std::sort(cluster.cells.begin(), cluster.cells.end());
    for (const CellKey& k : cluster.cells) cluster.centroid += map.center(k);
    cluster.centroid /= static_cast<double>(cluster.cells.size());
    out.push_back(std::move(cluster));
  }
  return out;
}

// Greedy one-to-one matching by ascending centroid distance. A fruit matches when
// a centroid lies within radius + extra_tol of its center.
inline std::set<int> match_fruits(const std::vector<RoiCluster>& clusters, const Scene& scene,
                                  double extra_tol) {
  struct Pair {
    double dist;
    std::size_t cluster;
    std::size_t fruit;
  };
  std::vector<Pair> pairs;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t f = 0; f < scene.fruits.size(); ++f) {
      const Fruit& fr = scene.fruits[f];
      const double d = (clusters[c].centroid - fr.center).norm();
      if (d <= fr.radius + extra_tol) pairs.push_back({d, c, f});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.cluster != b.cluster) return a.cluster < b.cluster;
    return a.fruit < b.fruit;
  });
  std::vector<bool> cluster_used(clusters.size(), false);
  std::vector<bool> fruit_used(scene.fruits.size(), false);
  std::set<int> detected;
  for (const Pair& p : pairs) {
    if (cluster_used[p.cluster] || fruit_used[p.fruit]) continue;
    cluster_used[p.cluster] = fruit_used[p.fruit] = true;
    detected.insert(scene.fruits[p.fruit].id);
  }
  return detected;
}

// ---------------------------------------------------------------------------
// Metrics log

enum class EventKind { SegmentChange, PoseReached, FruitDetected, Replan, CollisionAbort };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::SegmentChange: return "SegmentChange";
    case EventKind::PoseReached: return "PoseReached";
    case EventKind::FruitDetected: return "FruitDetected";
    case EventKind::Replan: return "Replan";
    case EventKind::CollisionAbort: return "CollisionAbort";
  }
  return "?";
}

// Payload by kind:
//   SegmentChange   segment
//   PoseReached     segment, x, y, z
//   FruitDetected   segment, fruit id
//   Replan          segment, plan length, utility, expansions
//   CollisionAbort  segment, node a, node b
struct Event {
  double sim_time{0.0};
  EventKind kind{EventKind::PoseReached};
  int segment{0};
  std::vector<double> values;
};

struct RunSummary {
  std::size_t fruits_detected_final{0};
  std::size_t poses_executed{0};
  std::size_t replans{0};
  std::size_t collision_aborts{0};
  double mean_inter_pose_interval{0.0};
  double median_inter_pose_interval{0.0};
};

class MetricsLog {
 public:
  void record(double sim_time, EventKind kind, int segment, std::vector<double> values = {}) {
    if (!events_.empty() && sim_time < events_.back().sim_time)
      throw std::logic_error("metrics: time went backwards");
    if (kind == EventKind::FruitDetected &&
        !detected_.insert(static_cast<int>(values.at(0))).second)
      throw std::logic_error("metrics: fruit reported twice");
    events_.push_back({sim_time, kind, segment, std::move(values)});
  }

  [[nodiscard]] const std::vector<Event>& events() const { return events_; }
  [[nodiscard]] const std::set<int>& detected() const { return detected_; }
  [[nodiscard]] std::size_t count(EventKind k) const {
    return static_cast<std::size_t>(std::count_if(
        events_.begin(), events_.end(), [k](const Event& e) { return e.kind == k; }));
  }

 private:
  std::vector<Event> events_;
  std::set<int> detected_;
};

struct TimelinePoint {
  double sim_time;
  std::size_t fruits;
};

// Cumulative detections; starts at (0, 0).
inline std::vector<TimelinePoint> detection_timeline(const MetricsLog& log) {
  std::vector<TimelinePoint> out{{0.0, 0}};
  std::size_t n = 0;
  for (const Event& e : log.events())
    if (e.kind == EventKind::FruitDetected) out.push_back({e.sim_time, ++n});
  return out;
}

// Differences between consecutive PoseReached times inside each segment.
inline std::vector<double> inter_pose_intervals(const MetricsLog& log) {
  std::vector<double> out;
  int segment = -1;
  double last = 0.0;
  bool have_last = false;
  for (const Event& e : log.events()) {
    if (e.kind != EventKind::PoseReached) continue;
    if (e.segment != segment) {
      segment = e.segment;
      have_last = false;
    }
    if (have_last) out.push_back(e.sim_time - last);
    last = e.sim_time;
    have_last = true;
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline RunSummary summarize(const MetricsLog& log) {
  RunSummary s;
  s.fruits_detected_final = log.detected().size();
  s.poses_executed = log.count(EventKind::PoseReached);
  s.replans = log.count(EventKind::Replan);
  s.collision_aborts = log.count(EventKind::CollisionAbort);
  const auto iv = inter_pose_intervals(log);
  s.mean_inter_pose_interval = mean(iv);
  s.median_inter_pose_interval = median(iv);
  return s;
}

inline std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// CSV: sim_time,kind,payload... (payload columns vary by kind).
inline void write_metrics_csv(std::ostream& os, const MetricsLog& log) {
  os << "sim_time,kind,payload\n";
  for (const Event& e : log.events()) {
    os << format_fixed(e.sim_time) << "," << to_string(e.kind) << "," << e.segment;
    for (const double v : e.values) {
      if (v == static_cast<double>(static_cast<long long>(v)))
        os << "," << static_cast<long long>(v);
      else
        os << "," << format_fixed(v);
    }
    os << "\n";
  }
}

inline void write_summary(std::ostream& os, const RunSummary& s) {
  os << "fruits_detected_final=" << s.fruits_detected_final << "\n";
  os << "poses_executed=" << s.poses_executed << "\n";
  os << "replans=" << s.replans << "\n";
  os << "collision_aborts=" << s.collision_aborts << "\n";
  os << "mean_inter_pose_interval=" << format_fixed(s.mean_inter_pose_interval) << "\n";
  os << "median_inter_pose_interval=" << format_fixed(s.median_inter_pose_interval) << "\n";
}

}  // namespace vmp
