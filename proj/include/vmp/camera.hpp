#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vmp/geometry.hpp"

namespace vmp {

struct RayGrid {
  int nx{16};
  int ny{16};
  friend bool operator==(const RayGrid&, const RayGrid&) = default;
};

// Pinhole depth camera. Two ray grids: a coarse one for information-gain
// estimation and a dense one for simulated sensing.
struct CameraModel {
  double hfov{60.0 * kPi / 180.0};
  double vfov{45.0 * kPi / 180.0};
  RayGrid gain_rays{16, 16};
  RayGrid sensor_rays{80, 60};
  double max_range{1.0};
  double min_range{0.1};
  double range_noise_sigma{0.0};

  void validate() const {
    if (!(hfov > 0.0 && hfov < kPi) || !(vfov > 0.0 && vfov < kPi))
      throw std::invalid_argument("camera: field of view must lie in (0, pi)");
    if (gain_rays.nx < 2 || gain_rays.ny < 2 || sensor_rays.nx < 2 || sensor_rays.ny < 2)
      throw std::invalid_argument("camera: ray grids must be at least 2x2");
    if (!(min_range >= 0.0 && min_range < max_range))
      throw std::invalid_argument("camera: require 0 <= min_range < max_range");
    if (range_noise_sigma < 0.0) throw std::invalid_argument("camera: negative noise sigma");
  }

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

// Unit ray directions in the camera frame, row-major over (v, u).
inline std::vector<Vec3> camera_ray_directions(const CameraModel& cam, const RayGrid& grid) {
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
  const double th = std::tan(0.5 * cam.hfov);
  const double tv = std::tan(0.5 * cam.vfov);
  for (int v = 0; v < grid.ny; ++v) {
    const double z = tv * (1.0 - 2.0 * (v + 0.5) / grid.ny);
    for (int u = 0; u < grid.nx; ++u) {
      const double y = th * (1.0 - 2.0 * (u + 0.5) / grid.nx);
      dirs.push_back(Vec3(1.0, y, z).normalized());
    }
  }
  return dirs;
}

}  // namespace vmp
