#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vmp/camera.hpp"
#include "vmp/evaluation.hpp"
#include "vmp/motion.hpp"
#include "vmp/rng.hpp"
#include "vmp/sampling.hpp"
#include "vmp/scene.hpp"
#include "vmp/search.hpp"
#include "vmp/view_graph.hpp"
#include "vmp/voxel_map.hpp"

namespace vmp {

struct PlannerConfig {
  int k_nn{5};
  int lookahead{3};
  double replan_interval{5.0};
  double expansion_cost{0.001};  // simulated s per visibility evaluation
  double sample_cost{0.002};     // simulated s per candidate attempted
  int graph_budget{300};         // sampled nodes per segment
  int targets_per_slice{5};
  double sense_cost{0.3};        // simulated s per observation
  double execution_noise{0.0};   // std dev (m) of the reached camera position
  bool wall_clock{false};        // charge measured compute time instead of fixed costs
  bool clear_misses{true};       // rays without a return clear free space to max range

  void validate() const {
    if (k_nn < 1 || lookahead < 1) throw std::invalid_argument("planner: k_nn and lookahead must be >= 1");
    if (expansion_cost < 0 || sample_cost < 0 || replan_interval < 0 || execution_noise < 0)
      throw std::invalid_argument("planner: costs must be >= 0");
    if (!(sense_cost > 0)) throw std::invalid_argument("planner: sense_cost must be > 0");
    if (graph_budget < 0 || targets_per_slice < 0)
      throw std::invalid_argument("planner: negative budget");
  }
  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

struct RvpConfig {
  double w_roi{5.0};
  double motion_overhead{1.0};  // simulated s of global motion planning per attempted move
  int targets_per_round{5};

  void validate() const {
    if (w_roi < 0 || motion_overhead < 0 || targets_per_round < 1)
      throw std::invalid_argument("rvp: invalid configuration");
  }
  friend bool operator==(const RvpConfig&, const RvpConfig&) = default;
};

struct EvalConfig {
  std::size_t min_cluster_cells{5};
  double match_extra_tol{0.04};  // added to the fruit radius

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

struct EpisodeSettings {
  SamplerConfig sampler;
  PlannerConfig planner;
  RvpConfig rvp;
  MotionParams motion;
  CameraModel camera;
  MapParams map;
  EvalConfig eval;

  void validate() const {
    sampler.validate();
    planner.validate();
    rvp.validate();
    motion.validate();
    camera.validate();
  }
  friend bool operator==(const EpisodeSettings&, const EpisodeSettings&) = default;
};

// Per-segment simulated clock. A charge that would overrun the budget is not
// applied and marks the segment exhausted.
class SegmentClock {
 public:
  SegmentClock() = default;
  SegmentClock(double start, double budget) : start_(start), budget_(budget) {}

  bool charge(double dt) {
    if (exhausted_) return false;
    if (elapsed_ + dt > budget_) {
      exhausted_ = true;
      return false;
    }
    elapsed_ += dt;
    return true;
  }
  [[nodiscard]] bool fits(double dt) const { return !exhausted_ && elapsed_ + dt <= budget_; }
  void exhaust() { exhausted_ = true; }

  [[nodiscard]] double now() const { return start_ + elapsed_; }
  [[nodiscard]] double elapsed() const { return elapsed_; }
  [[nodiscard]] double budget() const { return budget_; }
  [[nodiscard]] bool exhausted() const { return exhausted_; }

 private:
  double start_{0.0};
  double budget_{0.0};
  double elapsed_{0.0};
  bool exhausted_{false};
};

struct ExecutionReport {
  int poses_reached{0};
  std::optional<std::pair<NodeId, NodeId>> aborted_edge;
  bool budget_exhausted{false};
  bool replan_due{false};
  bool diverged{false};  // reached pose differs from the planned one
};

// State shared by both planners: world truth, map belief, clock, and log.
class EpisodeBase {
 public:
  EpisodeBase(const Scene& scene, std::span<const SegmentPlacement> segments,
              const EpisodeSettings& settings, std::uint64_t seed)
      : scene_(scene),
        segments_(segments.begin(), segments.end()),
        settings_(settings),
        rng_(seed),
        noise_rng_(seed ^ 0x9e3779b97f4a7c15ULL),
        map_(scene.bounds, settings.map) {
    settings_.validate();
  }

  [[nodiscard]] const OccupancyMap& map() const { return map_; }
  OccupancyMap& map() { return map_; }
  [[nodiscard]] const MetricsLog& log() const { return log_; }
  [[nodiscard]] const SegmentClock& clock() const { return clock_; }
  [[nodiscard]] const ViewPose& camera_pose() const { return camera_; }
  [[nodiscard]] const EpisodeSettings& settings() const { return settings_; }
  [[nodiscard]] const Scene& scene() const { return scene_; }
  [[nodiscard]] const SegmentPlacement& segment() const { return segments_.at(segment_); }
  [[nodiscard]] std::size_t segment_count() const { return segments_.size(); }

 protected:
  // Moves the trolley, places the camera at the workspace center, and takes one
  // observation there.
  void start_segment(std::size_t index) {
    segment_ = index;
    double start = 0.0;
    for (std::size_t s = 0; s < index; ++s) start += segments_[s].time_budget;
    clock_ = SegmentClock(start, segments_[index].time_budget);
    log_.record(clock_.now(), EventKind::SegmentChange, seg_id());
    camera_ = segments_[index].start_pose();
    if (clock_.charge(settings_.planner.sense_cost)) observe();
  }

  // Renders, fuses, logs the pose, and updates detections. The caller has
  // already charged the clock.
  void observe() {
    const DepthScan scan = render_scan(scene_, camera_, settings_.camera,
                                       settings_.camera.range_noise_sigma > 0 ? &noise_rng_ : nullptr);
    map_.integrate(camera_.position, scan.points,
                   settings_.planner.clear_misses ? std::span<const Vec3>(scan.misses)
                                                  : std::span<const Vec3>(),
                   settings_.camera.max_range);
    log_.record(clock_.now(), EventKind::PoseReached, seg_id(),
                {camera_.position.x(), camera_.position.y(), camera_.position.z()});
    const auto clusters = cluster_roi(map_, settings_.eval.min_cluster_cells);
    for (const int id : match_fruits(clusters, scene_, settings_.eval.match_extra_tol))
      if (!log_.detected().contains(id))
        log_.record(clock_.now(), EventKind::FruitDetected, seg_id(), {static_cast<double>(id)});
  }

  [[nodiscard]] Workspace workspace() const { return segments_.at(segment_).arm_workspace(); }
  [[nodiscard]] Box target_region() const {
    return workspace().world_aabb().inflated(settings_.sampler.d_max);
  }
  [[nodiscard]] int seg_id() const { return segments_.at(segment_).segment_index; }

  // Charges compute time: the fixed simulated cost, or the measured time in
  // wall-clock mode.
  bool charge_compute(double simulated, double measured) {
    return clock_.charge(settings_.planner.wall_clock ? measured : simulated);
  }

  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  Scene scene_;
  std::vector<SegmentPlacement> segments_;
  EpisodeSettings settings_;
  Rng rng_;
  Rng noise_rng_;
  OccupancyMap map_;
  MetricsLog log_;
  SegmentClock clock_;
  ViewPose camera_;
  std::size_t segment_{0};
};

// Graph-based view motion planner episode.
class VmpEpisode : public EpisodeBase {
 public:
  using EpisodeBase::EpisodeBase;

  [[nodiscard]] const ViewGraph& graph() const { return graph_; }
  ViewGraph& graph() { return graph_; }
  [[nodiscard]] const std::optional<PathPlan>& last_plan() const { return last_plan_; }

  MetricsLog run() {
    for (std::size_t s = 0; s < segments_.size(); ++s) run_segment(s);
    return log_;
  }

  void run_segment(std::size_t index) {
    begin_segment(index);
    while (!clock_.exhausted()) {
      if (!step()) break;
    }
  }

  // Fresh graph, persistent map.
  void begin_segment(std::size_t index) {
    graph_.clear();
    camera_node_.reset();
    targets_.clear();
    targets_dirty_ = true;
    last_search_ = -std::numeric_limits<double>::infinity();
    start_segment(index);
  }

  // One replanning cycle: sampling slice, camera node, search, execution,
  // recovery. Returns false when the segment can make no further progress.
  bool step() {
    const bool sampled = sample_slice();
    if (clock_.exhausted()) return false;
    const auto plan = plan_path();
    if (!plan) return false;
    if (plan->trivial()) return sampled;
    const ExecutionReport report = execute_plan(*plan, settings_.planner.lookahead);
    if (report.aborted_edge) handle_collision(graph_, report.aborted_edge->first, report.aborted_edge->second);
    return !report.budget_exhausted;
  }

  // Adds view-pose candidates around randomly picked targets. Returns true if any
  // candidate was attempted.
  bool sample_slice() {
    const PlannerConfig& pc = settings_.planner;
    if (static_cast<int>(graph_.view_node_count()) >= pc.graph_budget) return false;
    const auto t0 = std::chrono::steady_clock::now();
    if (targets_dirty_) {
      targets_ = resample_targets(map_, settings_.sampler, rng_, target_region());
      targets_dirty_ = false;
    }
    if (targets_.empty()) return false;
    const Workspace ws = workspace();
    std::size_t attempted = 0;
    for (int t = 0; t < pc.targets_per_slice; ++t) {
      if (static_cast<int>(graph_.view_node_count()) >= pc.graph_budget) break;
      const TargetSample target = pick_target(targets_, rng_);
      const auto poses = sample_viewposes(target, map_, ws, settings_.sampler, rng_);
      attempted += static_cast<std::size_t>(settings_.sampler.n_candidates);
      for (const ViewPose& pose : poses) {
        if (static_cast<int>(graph_.view_node_count()) >= pc.graph_budget) break;
        insert_viewpose(graph_, pose, target.type, map_, ws, settings_.motion, pc.k_nn);
      }
    }
    if (attempted == 0) return false;
    charge_compute(pc.sample_cost * static_cast<double>(attempted), seconds_since(t0));
    return true;
  }

  // Refreshes the camera node and runs the search. nullopt when the search cost
  // does not fit the remaining budget.
  std::optional<PathPlan> plan_path() {
    const PlannerConfig& pc = settings_.planner;
    if (!camera_node_ || graph_.node(*camera_node_).pose.position != camera_.position ||
        !graph_.node(*camera_node_).pose.orientation.isApprox(camera_.orientation, 0.0)) {
      camera_node_ = insert_camera_node(graph_, camera_, map_, workspace(), settings_.motion, pc.k_nn);
    } else {
      graph_.set_camera_node(*camera_node_);
    }
    const auto t0 = std::chrono::steady_clock::now();
    PathPlan plan = best_first_search(graph_, map_, settings_.camera);
    if (!charge_compute(pc.expansion_cost * static_cast<double>(plan.expansions), seconds_since(t0)))
      return std::nullopt;
    last_search_ = clock_.now();
    log_.record(clock_.now(), EventKind::Replan, seg_id(),
                {static_cast<double>(plan.nodes.size()), plan.utility,
                 static_cast<double>(plan.expansions)});
    last_plan_ = plan;
    return plan;
  }

  // Follows the plan for up to `lookahead` poses, re-checking each edge against
  // the current map before moving.
  ExecutionReport execute_plan(const PathPlan& plan, int lookahead) {
    ExecutionReport report;
    const PlannerConfig& pc = settings_.planner;
    const std::size_t last = std::min<std::size_t>(plan.nodes.size() - 1, static_cast<std::size_t>(lookahead));
    NodeId from = plan.nodes.front();
    for (std::size_t i = 1; i <= last; ++i) {
      const NodeId to = plan.nodes[i];
      if (i > 1 && clock_.now() - last_search_ >= pc.replan_interval) {
        report.replan_due = true;
        break;
      }
      const ViewNode& target = graph_.node(to);
      if (!trajectory_collision_free(map_, camera_, target.pose, settings_.motion)) {
        report.aborted_edge = std::make_pair(from, to);
        log_.record(clock_.now(), EventKind::CollisionAbort, seg_id(),
                    {static_cast<double>(from), static_cast<double>(to)});
        break;
      }
      const auto edge = graph_.edge_time(from, to);
      const double move = edge ? *edge
                               : execution_time(arm_config(camera_, segment().trolley_base),
                                                target.config, settings_.motion);
      if (!clock_.charge(move + pc.sense_cost)) {
        report.budget_exhausted = true;
        break;
      }
      camera_ = target.pose;
      if (pc.execution_noise > 0.0) perturb_camera();
      observe();
      targets_dirty_ = true;
      ++report.poses_reached;
      camera_node_ = to;
      if ((camera_.position - target.pose.position).norm() > 1e-9) {
        report.diverged = true;
        if (i < last && reconnect(plan.nodes[i + 1])) {
          from = *camera_node_;
          continue;
        }
        break;
      }
      from = to;
    }
    return report;
  }

 private:
  void perturb_camera() {
    const Workspace ws = workspace();
    const double sigma = settings_.planner.execution_noise;
    const Vec3 moved = camera_.position + sigma * Vec3(noise_rng_.normal(), noise_rng_.normal(),
                                                       noise_rng_.normal());
    if (ws.contains(moved)) camera_.position = moved;
  }

  // Inserts the reached pose as camera node and tries a direct edge to the next
  // planned node.
  bool reconnect(NodeId planned) {
    const PlannerConfig& pc = settings_.planner;
    camera_node_ = insert_camera_node(graph_, camera_, map_, workspace(), settings_.motion, pc.k_nn);
    const ViewNode& next = graph_.node(planned);
    if (graph_.has_edge(*camera_node_, planned)) return true;
    if (!trajectory_collision_free(map_, camera_, next.pose, settings_.motion)) return false;
    return graph_.add_edge(*camera_node_, planned,
                           execution_time(graph_.node(*camera_node_).config, next.config,
                                          settings_.motion));
  }

  ViewGraph graph_;
  std::optional<NodeId> camera_node_;
  std::vector<TargetSample> targets_;
  bool targets_dirty_{true};
  double last_search_{-std::numeric_limits<double>::infinity()};
  std::optional<PathPlan> last_plan_;
};

// Greedy next-best-view baseline: scores candidates one at a time, ignores the
// arm's motion cost, and pays a global motion-planning overhead per move.
class RvpEpisode : public EpisodeBase {
 public:
  using EpisodeBase::EpisodeBase;

  MetricsLog run() {
    for (std::size_t s = 0; s < segments_.size(); ++s) run_segment(s);
    return log_;
  }

  void run_segment(std::size_t index) {
    start_segment(index);
    while (!clock_.exhausted()) {
      if (!step()) break;
    }
  }

  struct Candidate {
    ViewPose pose;
    double score{0.0};
  };

  [[nodiscard]] static double score(const VisibilityCount& v, double w_roi) {
    return static_cast<double>(v.unknown_cells.size()) + w_roi * static_cast<double>(v.n_roi);
  }

  // Best-first ordering of scored candidates; stable for equal scores.
  static std::vector<Candidate> rank(std::vector<Candidate> c) {
    std::stable_sort(c.begin(), c.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    return c;
  }

  bool step() {
    const RvpConfig& rc = settings_.rvp;
    const PlannerConfig& pc = settings_.planner;
    const auto t0 = std::chrono::steady_clock::now();
    const auto targets = resample_targets(map_, settings_.sampler, rng_, target_region());
    if (targets.empty()) return false;
    const Workspace ws = workspace();
    std::vector<Candidate> candidates;
    std::size_t attempted = 0;
    for (int t = 0; t < rc.targets_per_round; ++t) {
      const TargetSample target = pick_target(targets, rng_);
      attempted += static_cast<std::size_t>(settings_.sampler.n_candidates);
      for (const ViewPose& pose : sample_viewposes(target, map_, ws, settings_.sampler, rng_))
        candidates.push_back(
            {pose, score(count_visible_cells(map_, pose, settings_.camera), rc.w_roi)});
    }
    const double simulated = pc.sample_cost * static_cast<double>(attempted) +
                             pc.expansion_cost * static_cast<double>(candidates.size());
    if (!charge_compute(simulated, seconds_since(t0))) return false;
    for (const Candidate& c : rank(std::move(candidates))) {
      if (!(c.score > 0.0)) break;
      if (!clock_.charge(rc.motion_overhead)) return false;
      if (!trajectory_collision_free(map_, camera_, c.pose, settings_.motion)) continue;
      const double move = execution_time(arm_config(camera_, segment().trolley_base),
                                         arm_config(c.pose, segment().trolley_base),
                                         settings_.motion);
      if (!clock_.charge(move + pc.sense_cost)) return false;
      camera_ = c.pose;
      observe();
      break;
    }
    return true;
  }
};

inline MetricsLog run_vmp_episode(const Scene& scene, std::span<const SegmentPlacement> segments,
                                  const EpisodeSettings& settings, std::uint64_t seed) {
  return VmpEpisode(scene, segments, settings, seed).run();
}

inline MetricsLog run_rvp_episode(const Scene& scene, std::span<const SegmentPlacement> segments,
                                  const EpisodeSettings& settings, std::uint64_t seed) {
  return RvpEpisode(scene, segments, settings, seed).run();
}

}  // namespace vmp
