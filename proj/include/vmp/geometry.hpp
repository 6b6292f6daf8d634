#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vmp {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

// Axis-aligned box, closed on both ends.
struct Box {
  Vec3 min{Vec3::Zero()};
  Vec3 max{Vec3::Zero()};

  [[nodiscard]] bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  [[nodiscard]] bool empty() const { return (max.array() <= min.array()).any(); }
  [[nodiscard]] Vec3 center() const { return 0.5 * (min + max); }
  [[nodiscard]] Vec3 size() const { return max - min; }
  [[nodiscard]] Box inflated(double margin) const {
    return {min - Vec3::Constant(margin), max + Vec3::Constant(margin)};
  }
  [[nodiscard]] Box intersection(const Box& o) const {
    return {min.cwiseMax(o.min), max.cwiseMin(o.max)};
  }

  friend bool operator==(const Box& a, const Box& b) { return a.min == b.min && a.max == b.max; }
};

// A 6-DoF camera pose. The camera looks along its local +x axis, local +z is up.
struct ViewPose {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};

  [[nodiscard]] Vec3 forward() const { return orientation * Vec3::UnitX(); }
  [[nodiscard]] Vec3 to_world(const Vec3& local) const { return position + orientation * local; }
  [[nodiscard]] Vec3 to_local(const Vec3& world) const {
    return orientation.conjugate() * (world - position);
  }
};

inline bool is_unit(const Quat& q, double tol = 1e-9) { return std::abs(q.norm() - 1.0) <= tol; }

inline Quat yaw_rotation(double yaw) { return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())); }

// Orientation whose forward axis is `dir`, with camera roll fixed so local +z stays
// in the vertical plane containing `dir`. Straight up/down falls back to world +y as left.
inline Quat orientation_from_forward(const Vec3& dir) {
  const double n = dir.norm();
  if (!(n > 0.0)) throw std::invalid_argument("orientation_from_forward: zero direction");
  const Vec3 f = dir / n;
  Vec3 left = Vec3::UnitZ().cross(f);
  if (left.norm() < 1e-12) {
    left = Vec3::UnitY();
  } else {
    left.normalize();
  }
  const Vec3 up = f.cross(left);
  Mat3 r;
  r.col(0) = f;
  r.col(1) = left;
  r.col(2) = up;
  Quat q(r);
  q.normalize();
  return q;
}

inline ViewPose look_at(const Vec3& position, const Vec3& target) {
  return {position, orientation_from_forward(target - position)};
}

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline Vec3 direction_from_yaw_pitch(double yaw, double pitch) {
  return {std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch)};
}

// Squared distance from a point to a box (zero inside).
inline double squared_distance(const Box& b, const Vec3& p) {
  const Vec3 d = (b.min - p).cwiseMax(Vec3::Zero()).cwiseMax(p - b.max);
  return d.squaredNorm();
}

// Ray/box slab test. Returns the parametric [t_enter, t_exit] clipped to [t0, t1].
inline bool clip_ray_to_box(const Box& b, const Vec3& origin, const Vec3& dir, double& t0,
                            double& t1) {
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-300) {
      if (origin[a] < b.min[a] || origin[a] > b.max[a]) return false;
      continue;
    }
    const double inv = 1.0 / dir[a];
    double ta = (b.min[a] - origin[a]) * inv;
    double tb = (b.max[a] - origin[a]) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace vmp
