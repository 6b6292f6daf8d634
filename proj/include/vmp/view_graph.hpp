#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vmp/motion.hpp"
#include "vmp/sampling.hpp"

namespace vmp {

using NodeId = int;

enum class NodeKind { RoiTarget, OccupiedTarget, FreeTarget, CameraStart };

inline NodeKind node_kind(TargetType t) {
  switch (t) {
    case TargetType::RoiTarget: return NodeKind::RoiTarget;
    case TargetType::OccupiedTarget: return NodeKind::OccupiedTarget;
    case TargetType::FreeTarget: return NodeKind::FreeTarget;
  }
  return NodeKind::FreeTarget;
}

struct ViewNode {
  ViewPose pose;
  ArmConfig config;
  NodeKind kind{NodeKind::FreeTarget};
};

struct GraphEdge {
  NodeId to{0};
  double exec_time{0.0};
};

// Undirected view-pose graph. Node ids are dense indices and never reused.
// Adjacency lists are kept sorted by neighbor id.
class ViewGraph {
 public:
  NodeId add_node(const ViewPose& pose, const ArmConfig& config, NodeKind kind) {
    nodes_.push_back({pose, config, kind});
    adjacency_.emplace_back();
    if (kind != NodeKind::CameraStart) ++view_nodes_;
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  // False when a == b or the edge already exists.
  bool add_edge(NodeId a, NodeId b, double exec_time) {
    check(a);
    check(b);
    if (a == b || has_edge(a, b)) return false;
    if (exec_time < 0.0) throw std::invalid_argument("graph: negative execution time");
    insert_sorted(adjacency_[a], {b, exec_time});
    insert_sorted(adjacency_[b], {a, exec_time});
    ++edge_count_;
    return true;
  }

  bool remove_edge(NodeId a, NodeId b) {
    if (!valid(a) || !valid(b) || !has_edge(a, b)) return false;
    erase(adjacency_[a], b);
    erase(adjacency_[b], a);
    --edge_count_;
    return true;
  }

  [[nodiscard]] std::optional<double> edge_time(NodeId a, NodeId b) const {
    if (!valid(a) || !valid(b)) return std::nullopt;
    const auto& adj = adjacency_[a];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const GraphEdge& e, NodeId id) { return e.to < id; });
    if (it == adj.end() || it->to != b) return std::nullopt;
    return it->exec_time;
  }
  [[nodiscard]] bool has_edge(NodeId a, NodeId b) const { return edge_time(a, b).has_value(); }

  [[nodiscard]] const std::vector<GraphEdge>& neighbors(NodeId id) const {
    check(id);
    return adjacency_[id];
  }
  [[nodiscard]] const ViewNode& node(NodeId id) const {
    check(id);
    return nodes_[id];
  }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return edge_count_; }
  // Nodes that came from view-pose sampling, excluding camera nodes.
  [[nodiscard]] std::size_t view_node_count() const { return view_nodes_; }

  [[nodiscard]] std::optional<NodeId> camera_node() const { return camera_; }
  void set_camera_node(NodeId id) {
    check(id);
    camera_ = id;
  }

  void clear() { *this = ViewGraph{}; }

 private:
  [[nodiscard]] bool valid(NodeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < nodes_.size();
  }
  void check(NodeId id) const {
    if (!valid(id)) throw std::out_of_range("graph: invalid node id");
  }
  static void insert_sorted(std::vector<GraphEdge>& adj, GraphEdge e) {
    auto it = std::lower_bound(adj.begin(), adj.end(), e.to,
                               [](const GraphEdge& x, NodeId id) { return x.to < id; });
    adj.insert(it, e);
  }
  static void erase(std::vector<GraphEdge>& adj, NodeId to) {
    std::erase_if(adj, [to](const GraphEdge& e) { return e.to == to; });
  }

  std::vector<ViewNode> nodes_;
  std::vector<std::vector<GraphEdge>> adjacency_;
  std::optional<NodeId> camera_;
  std::size_t edge_count_{0};
  std::size_t view_nodes_{0};
};

// Ids of the k existing nodes closest to `config`, ties broken by lower id.
inline std::vector<NodeId> nearest_configs(const ViewGraph& graph, const ArmConfig& config,
                                           int k, double w_ang, NodeId exclude = -1) {
  std::vector<std::pair<double, NodeId>> d;
  d.reserve(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    if (id == exclude) continue;
    d.emplace_back(config_distance(config, graph.node(id).config, w_ang), id);
  }
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n), d.end());
  std::vector<NodeId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(d[i].second);
  return out;
}

namespace detail {

inline NodeId insert_node(ViewGraph& graph, const ViewPose& pose, NodeKind kind,
                          const OccupancyMap& map, const Workspace& workspace,
                          const MotionParams& motion, int k_nn) {
  const ArmConfig config = arm_config(pose, workspace.base);
  const auto partners = nearest_configs(graph, config, k_nn, motion.w_ang);
  const NodeId id = graph.add_node(pose, config, kind);
  for (const NodeId other : partners) {
    const ViewNode& nb = graph.node(other);
    if (!trajectory_collision_free(map, pose, nb.pose, motion)) continue;
    graph.add_edge(id, other, execution_time(config, nb.config, motion));
  }
  return id;
}

}  // namespace detail

// Adds a sampled view pose and connects it to its k nearest configurations
// through collision-free straight-line trajectories.
inline NodeId insert_viewpose(ViewGraph& graph, const ViewPose& pose, TargetType target,
                              const OccupancyMap& map, const Workspace& workspace,
                              const MotionParams& motion, int k_nn) {
  if (!pose_reachable(workspace, pose))
    throw std::invalid_argument("insert_viewpose: pose outside workspace");
  return detail::insert_node(graph, pose, node_kind(target), map, workspace, motion, k_nn);
}

// Adds the current camera pose as a new node and makes it the search root. The
// previous camera node stays in the graph as an ordinary node.
inline NodeId insert_camera_node(ViewGraph& graph, const ViewPose& camera_pose,
                                 const OccupancyMap& map, const Workspace& workspace,
                                 const MotionParams& motion, int k_nn) {
  const NodeId id =
      detail::insert_node(graph, camera_pose, NodeKind::CameraStart, map, workspace, motion, k_nn);
  graph.set_camera_node(id);
  return id;
}

// Removes the edge; nodes stay. Missing edges are ignored.
inline void handle_collision(ViewGraph& graph, NodeId a, NodeId b) { graph.remove_edge(a, b); }

}  // namespace vmp
