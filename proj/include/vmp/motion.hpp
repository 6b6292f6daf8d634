#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vmp/geometry.hpp"
#include "vmp/scene.hpp"
#include "vmp/voxel_map.hpp"

namespace vmp {

// Reduced arm configuration: camera position in the trolley frame plus the
// yaw/pitch of its optical axis. Roll is free.
struct ArmConfig {
  Vec3 p{Vec3::Zero()};
  double yaw{0.0};
  double pitch{0.0};
};

struct MotionParams {
  double v_lin{0.1};      // m/s
  double v_ang{0.5};      // rad/s
  double clearance{0.03};  // m
  int n_checks{20};
  double w_ang{0.2};  // m/rad, weight of rotation in config_distance

  void validate() const {
    if (!(v_lin > 0 && v_ang > 0 && clearance > 0 && n_checks > 0 && w_ang > 0))
      throw std::invalid_argument("motion: all parameters must be positive");
  }
  friend bool operator==(const MotionParams&, const MotionParams&) = default;
};

inline bool pose_reachable(const Workspace& workspace, const ViewPose& pose) {
  return workspace.contains(pose.position);
}

// Configuration without the workspace check.
inline ArmConfig arm_config(const ViewPose& pose, const ViewPose& trolley_base) {
  ArmConfig c;
  c.p = trolley_base.to_local(pose.position);
  const Vec3 f = trolley_base.orientation.conjugate() * pose.forward();
  c.yaw = std::atan2(f.y(), f.x());
  c.pitch = std::atan2(f.z(), std::hypot(f.x(), f.y()));
  return c;
}

inline ArmConfig config_of(const ViewPose& pose, const Workspace& workspace) {
  if (!pose_reachable(workspace, pose))
    throw std::invalid_argument("config_of: pose outside workspace");
  return arm_config(pose, workspace.base);
}

inline double config_distance(const ArmConfig& a, const ArmConfig& b, double w_ang = 0.2) {
  return (a.p - b.p).norm() +
         w_ang * (std::abs(wrap_angle(a.yaw - b.yaw)) + std::abs(a.pitch - b.pitch));
}

inline double execution_time(const ArmConfig& a, const ArmConfig& b, const MotionParams& params) {
  const double lin = (a.p - b.p).norm() / params.v_lin;
  const double ang =
      std::max(std::abs(wrap_angle(a.yaw - b.yaw)), std::abs(a.pitch - b.pitch)) / params.v_ang;
  return std::max(lin, ang);
}

// True iff a sphere of radius `clearance` around p touches an Occupied or Roi cell.
inline bool sphere_blocked(const OccupancyMap& map, const Vec3& p, double clearance) {
  const Vec3 r = Vec3::Constant(clearance);
  const CellKey lo = map.floor_key(p - r);
  const CellKey hi = map.floor_key(p + r);
  const double c2 = clearance * clearance;
  for (int i = lo.i; i <= hi.i; ++i)
    for (int j = lo.j; j <= hi.j; ++j)
      for (int k = lo.k; k <= hi.k; ++k) {
        const CellKey key{i, j, k};
        if (!is_opaque(map.state(key))) continue;
        if (squared_distance(map.cell_box(key), p) < c2) return true;
      }
  return false;
}

// Straight-line camera motion sampled at n_checks points, endpoints included.
// Unknown and Free cells never block.
inline bool trajectory_collision_free(const OccupancyMap& map, const ViewPose& a,
                                      const ViewPose& b, const MotionParams& params) {
  const int n = std::max(params.n_checks, 1);
  for (int s = 0; s < n; ++s) {
    const double u = n == 1 ? 0.0 : static_cast<double>(s) / (n - 1);
    if (sphere_blocked(map, a.position + u * (b.position - a.position), params.clearance))
      return false;
  }
  return true;
}

}  // namespace vmp
