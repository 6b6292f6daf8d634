#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vmp/motion.hpp"
#include "vmp/rng.hpp"
#include "vmp/scene.hpp"
#include "vmp/voxel_map.hpp"

namespace vmp {

enum class TargetType { RoiTarget, OccupiedTarget, FreeTarget };

inline FrontierType frontier_of(TargetType t) {
  switch (t) {
    case TargetType::RoiTarget: return FrontierType::RoiFrontier;
    case TargetType::OccupiedTarget: return FrontierType::OccupiedFrontier;
    case TargetType::FreeTarget: return FrontierType::FreeFrontier;
  }
  return FrontierType::FreeFrontier;
}

enum class SamplingMode { Range, Workspace };

struct SamplerConfig {
  double p_roi{0.5};
  double p_occ{0.3};
  double p_free{0.2};
  double d_min{0.25};
  double d_max{0.6};
  int n_candidates{10};
  int max_targets{100};
  SamplingMode mode{SamplingMode::Workspace};
  bool use_band{true};  // distance band in Workspace mode

  void validate() const {
    if (p_roi < 0 || p_occ < 0 || p_free < 0 || std::abs(p_roi + p_occ + p_free - 1.0) > 1e-9)
      throw std::invalid_argument("sampler: probabilities must be >= 0 and sum to 1");
    if (!(d_min > 0 && d_min < d_max)) throw std::invalid_argument("sampler: need 0 < d_min < d_max");
    if (n_candidates < 0 || max_targets < 0) throw std::invalid_argument("sampler: negative count");
  }
  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

struct TargetSample {
  Vec3 position{Vec3::Zero()};
  TargetType type{TargetType::FreeTarget};
};

// Draws frontier targets: a type by the configured probabilities, then a cell of
// that type uniformly without replacement. Exhausted types are dropped and the
// draw is renormalized over the remaining ones.
inline std::vector<TargetSample> resample_targets(const OccupancyMap& map,
                                                  const SamplerConfig& config, Rng& rng,
                                                  const std::optional<Box>& region = std::nullopt) {
  constexpr std::array<TargetType, 3> kTypes{TargetType::RoiTarget, TargetType::OccupiedTarget,
                                             TargetType::FreeTarget};
  const std::array<double, 3> prob{config.p_roi, config.p_occ, config.p_free};
  std::array<std::vector<CellKey>, 3> pools;
  for (std::size_t t = 0; t < 3; ++t) pools[t] = frontier_cells(map, frontier_of(kTypes[t]), region);

  std::vector<TargetSample> out;
  while (static_cast<int>(out.size()) < config.max_targets) {
    double mass = 0.0;
    int nonempty = 0;
    for (std::size_t t = 0; t < 3; ++t)
      if (!pools[t].empty()) {
        mass += prob[t];
        ++nonempty;
      }
    if (nonempty == 0) break;
    std::size_t pick = 3;
    if (mass > 0.0) {
      double u = rng.uniform() * mass;
      for (std::size_t t = 0; t < 3; ++t) {
        if (pools[t].empty() || prob[t] <= 0.0) continue;
        pick = t;
        if (u < prob[t]) break;
        u -= prob[t];
      }
    } else {
      std::size_t n = rng.index(static_cast<std::size_t>(nonempty));
      for (std::size_t t = 0; t < 3; ++t)
        if (!pools[t].empty() && n-- == 0) pick = t;
    }
    auto& pool = pools[pick];
    const std::size_t idx = rng.index(pool.size());
    out.push_back({map.center(pool[idx]), kTypes[pick]});
    pool[idx] = pool.back();
    pool.pop_back();
  }
  return out;
}

inline const TargetSample& pick_target(const std::vector<TargetSample>& targets, Rng& rng) {
  if (targets.empty()) throw std::invalid_argument("pick_target: no targets");
  return targets[rng.index(targets.size())];
}

// The straight sight line from `from` to the target cell crosses no Occupied or
// Roi cell before the target cell itself. Unknown space is transparent.
inline bool sight_line_clear(const OccupancyMap& map, const Vec3& from, const Vec3& target) {
  const Vec3 d = target - from;
  const double len = d.norm();
  if (len <= 0.0) return true;
  const auto target_key = map.key_of(target);
  bool clear = true;
  traverse_cells(map, from, d / len, len, [&](const CellKey& k, double) {
    if (target_key && k == *target_key) return false;
    if (is_opaque(map.state(k))) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear;
}

// RANGE-select: candidates on a spherical shell around the target.
inline std::vector<ViewPose> sample_viewposes_range(const TargetSample& target,
                                                    const OccupancyMap& map,
                                                    const Workspace& workspace,
                                                    const SamplerConfig& config, Rng& rng) {
  std::vector<ViewPose> out;
  for (int n = 0; n < config.n_candidates; ++n) {
    const Vec3 dir = rng.unit_vector();
    const double dist = rng.uniform(config.d_min, config.d_max);
    const Vec3 pos = target.position + dist * dir;
    if (!workspace.contains(pos)) continue;
    if (!sight_line_clear(map, pos, target.position)) continue;
    out.push_back(look_at(pos, target.position));
  }
  return out;
}

// WORKSPACE-select: candidates drawn uniformly from the arm workspace. The
// candidate stream does not depend on use_band, so the banded output is always a
// subset of the unbanded one for the same seed.
inline std::vector<ViewPose> sample_viewposes_workspace(const TargetSample& target,
                                                        const OccupancyMap& map,
                                                        const Workspace& workspace,
                                                        const SamplerConfig& config, Rng& rng) {
  std::vector<ViewPose> out;
  for (int n = 0; n < config.n_candidates; ++n) {
    const Vec3 pos = workspace.sample(rng);
    const double dist = (pos - target.position).norm();
    if (dist <= 0.0) continue;
    if (config.use_band && (dist < config.d_min || dist > config.d_max)) continue;
    if (!sight_line_clear(map, pos, target.position)) continue;
    out.push_back(look_at(pos, target.position));
  }
  return out;
}

inline std::vector<ViewPose> sample_viewposes(const TargetSample& target, const OccupancyMap& map,
                                              const Workspace& workspace,
                                              const SamplerConfig& config, Rng& rng) {
  return config.mode == SamplingMode::Range
             ? sample_viewposes_range(target, map, workspace, config, rng)
             : sample_viewposes_workspace(target, map, workspace, config, rng);
}

}  // namespace vmp
