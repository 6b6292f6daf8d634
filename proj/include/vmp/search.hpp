#pragma once

#include <algorithm>
#include <iterator>
#include <queue>
#include <stdexcept>
#include <vector>

#include "vmp/camera.hpp"
#include "vmp/view_graph.hpp"
#include "vmp/voxel_map.hpp"

namespace vmp {

// Utility of a node reached by a path from the camera node:
//   (unique unknown cells / path time) * (roi poses + 1) / (depth + 1)
// Zero at zero path time.
inline double node_utility(std::size_t n_unknown_unique, double path_time, int roi_count,
                           int depth) {
  if (!(path_time > 0.0)) return 0.0;
  return (static_cast<double>(n_unknown_unique) / path_time) *
         (static_cast<double>(roi_count) + 1.0) / (static_cast<double>(depth) + 1.0);
}

struct PathPlan {
  std::vector<NodeId> nodes;  // camera node first
  double total_time{0.0};
  double utility{0.0};
  int roi_count{0};
  std::size_t unknown_cells{0};
  std::size_t expansions{0};

  [[nodiscard]] bool trivial() const { return nodes.size() < 2; }
};

// Per-search node state; rebuilt for every search.
struct SearchScratch {
  bool expanded{false};
  NodeId predecessor{-1};
  double utility{0.0};
  double path_time{0.0};
  int roi_count{0};
  int depth{0};
  std::vector<PackedKey> visited;  // sorted unknown-cell keys seen along the path
};

namespace detail {

inline std::vector<PackedKey> sorted_union(const std::vector<PackedKey>& a,
                                           const std::vector<PackedKey>& b) {
  std::vector<PackedKey> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

// Best-first path search over the view graph.
//
// `unknown_of(id)` returns the sorted, de-duplicated unknown cells visible from
// node id. The queue pops the highest utility first, ties to the lower id. A
// neighbor is expanded exactly once, by the first popped node that reaches it;
// the camera node counts as expanded from the start. The result backtracks
// predecessors from the best expanded node with positive utility.
template <class UnknownFn>
PathPlan best_first_search(const ViewGraph& graph, UnknownFn&& unknown_of) {
  const auto cam = graph.camera_node();
  if (!cam) throw std::logic_error("best_first_search: camera node not set");

  std::vector<SearchScratch> s(graph.size());
  struct Entry {
    double utility;
    NodeId id;
  };
  auto lower_priority = [](const Entry& a, const Entry& b) {
    if (a.utility != b.utility) return a.utility < b.utility;
    return a.id > b.id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> queue(lower_priority);

  s[*cam].expanded = true;
  queue.push({0.0, *cam});
  PathPlan plan;
  NodeId best = -1;

  while (!queue.empty()) {
    const NodeId current = queue.top().id;
    queue.pop();
    for (const GraphEdge& e : graph.neighbors(current)) {
      SearchScratch& nb = s[e.to];
      if (nb.expanded) continue;
      const SearchScratch& pred = s[current];
      nb.predecessor = current;
      nb.expanded = true;
      ++plan.expansions;
      nb.visited = detail::sorted_union(pred.visited, unknown_of(e.to));
      nb.path_time = pred.path_time + e.exec_time;
      nb.depth = pred.depth + 1;
      nb.roi_count = pred.roi_count + (graph.node(e.to).kind == NodeKind::RoiTarget ? 1 : 0);
      nb.utility = node_utility(nb.visited.size(), nb.path_time, nb.roi_count, nb.depth);
      queue.push({nb.utility, e.to});
      if (nb.utility > 0.0 &&
          (best < 0 || nb.utility > s[best].utility || (nb.utility == s[best].utility && e.to < best)))
        best = e.to;
    }
  }

  if (best < 0) {
    plan.nodes = {*cam};
    return plan;
  }
  for (NodeId n = best; n != -1; n = s[n].predecessor) plan.nodes.push_back(n);
  std::reverse(plan.nodes.begin(), plan.nodes.end());
  plan.total_time = s[best].path_time;
  plan.utility = s[best].utility;
  plan.roi_count = s[best].roi_count;
  plan.unknown_cells = s[best].visited.size();
  return plan;
}

// Search with visibility from map ray casting.
inline PathPlan best_first_search(const ViewGraph& graph, const OccupancyMap& map,
                                  const CameraModel& camera) {
  const auto dirs = camera_ray_directions(camera, camera.gain_rays);
  return best_first_search(graph, [&](NodeId id) {
    return visible_unknown_cells(map, graph.node(id).pose, dirs, camera.max_range);
  });
}

}  // namespace vmp
