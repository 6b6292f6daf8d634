#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "vmp/camera.hpp"
#include "vmp/geometry.hpp"

namespace vmp {

struct CellKey {
  std::int32_t i{0};
  std::int32_t j{0};
  std::int32_t k{0};

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

// Lexicographic (i, j, k) order is preserved by the packing for indices below 2^21.
using PackedKey = std::uint64_t;

inline PackedKey pack(const CellKey& key) {
  return (static_cast<PackedKey>(key.i) << 42) | (static_cast<PackedKey>(key.j) << 21) |
         static_cast<PackedKey>(key.k);
}

inline CellKey unpack(PackedKey p) {
  constexpr PackedKey mask = (PackedKey{1} << 21) - 1;
  return {static_cast<std::int32_t>(p >> 42), static_cast<std::int32_t>((p >> 21) & mask),
          static_cast<std::int32_t>(p & mask)};
}

enum class CellState { Unknown, Free, Occupied, Roi };

inline const char* to_string(CellState s) {
  switch (s) {
    case CellState::Unknown: return "Unknown";
    case CellState::Free: return "Free";
    case CellState::Occupied: return "Occupied";
    case CellState::Roi: return "Roi";
  }
  return "?";
}

inline bool is_opaque(CellState s) { return s == CellState::Occupied || s == CellState::Roi; }

struct MapParams {
  double resolution{0.02};
  double l_hit{0.85};
  double l_miss{-0.4};
  double r_hit{0.85};
  double r_miss{-0.4};
  double l_min{-2.0};
  double l_max{3.5};
  double occ_threshold{0.0};
  double roi_threshold{0.0};

  friend bool operator==(const MapParams&, const MapParams&) = default;
};

struct CellBelief {
  double occ_logodds{0.0};
  double roi_logodds{0.0};
  std::uint32_t observations{0};
};

struct LabeledPoint {
  Vec3 position;
  bool fruit{false};
};

enum class FrontierType { RoiFrontier, OccupiedFrontier, FreeFrontier };

// Sparse voxel grid over fixed bounds. Cells live in lazily allocated 8^3 blocks
// addressed through a dense block directory; an unallocated or never-updated cell
// is Unknown.
class OccupancyMap {
 public:
  static constexpr int kBlockShift = 3;
  static constexpr int kBlockSize = 1 << kBlockShift;
  static constexpr int kBlockMask = kBlockSize - 1;
  static constexpr int kBlockCells = kBlockSize * kBlockSize * kBlockSize;

  OccupancyMap(const Box& bounds, const MapParams& params = {})
      : params_(params), bounds_(bounds), origin_(bounds.min) {
    if (!(params.resolution > 0.0)) throw std::invalid_argument("map: resolution must be > 0");
    if (bounds.empty()) throw std::invalid_argument("map: bounds must be non-empty");
    if (!(params.l_min <= 0.0 && params.l_max >= 0.0 && params.l_min < params.l_max))
      throw std::invalid_argument("map: clamp range must contain 0");
    for (int a = 0; a < 3; ++a) {
      dims_[a] = static_cast<int>(std::ceil(bounds.size()[a] / params.resolution - 1e-9));
      if (dims_[a] < 1) dims_[a] = 1;
      if (dims_[a] >= (1 << 21)) throw std::invalid_argument("map: bounds too large");
      block_dims_[a] = (dims_[a] + kBlockMask) >> kBlockShift;
    }
    blocks_.resize(static_cast<std::size_t>(block_dims_[0]) * block_dims_[1] * block_dims_[2]);
  }

  OccupancyMap(const OccupancyMap& o) : OccupancyMap(o.bounds_, o.params_) {
    for (std::size_t b = 0; b < o.blocks_.size(); ++b)
      if (o.blocks_[b]) blocks_[b] = std::make_unique<Block>(*o.blocks_[b]);
    cell_count_ = o.cell_count_;
    roi_seen_ = o.roi_seen_;
    version_ = o.version_;
  }
  OccupancyMap& operator=(const OccupancyMap& o) {
    if (this != &o) *this = OccupancyMap(o);
    return *this;
  }
  OccupancyMap(OccupancyMap&&) noexcept = default;
  OccupancyMap& operator=(OccupancyMap&&) noexcept = default;

  [[nodiscard]] const MapParams& params() const { return params_; }
  [[nodiscard]] double resolution() const { return params_.resolution; }
  [[nodiscard]] const Vec3& origin() const { return origin_; }
  [[nodiscard]] const Box& bounds() const { return bounds_; }
  [[nodiscard]] const std::array<int, 3>& dims() const { return dims_; }
  [[nodiscard]] std::size_t cell_count() const { return cell_count_; }
  // Incremented by every integration or direct cell write.
  [[nodiscard]] std::uint64_t version() const { return version_; }

  [[nodiscard]] bool in_bounds(const CellKey& k) const {
    return k.i >= 0 && k.j >= 0 && k.k >= 0 && k.i < dims_[0] && k.j < dims_[1] &&
           k.k < dims_[2];
  }

  // Cell containing p, or nullopt outside the grid.
  [[nodiscard]] std::optional<CellKey> key_of(const Vec3& p) const {
    const CellKey k = floor_key(p);
    if (!bounds_.contains(p) || !in_bounds(k)) return std::nullopt;
    return k;
  }
  [[nodiscard]] CellKey floor_key(const Vec3& p) const {
    const Vec3 q = (p - origin_) / params_.resolution;
    return {static_cast<std::int32_t>(std::floor(q.x())),
            static_cast<std::int32_t>(std::floor(q.y())),
            static_cast<std::int32_t>(std::floor(q.z()))};
  }
  [[nodiscard]] Vec3 center(const CellKey& k) const {
    return origin_ + Vec3(k.i + 0.5, k.j + 0.5, k.k + 0.5) * params_.resolution;
  }
  [[nodiscard]] Box cell_box(const CellKey& k) const {
    const Vec3 lo = origin_ + Vec3(k.i, k.j, k.k) * params_.resolution;
    return {lo, lo + Vec3::Constant(params_.resolution)};
  }

  [[nodiscard]] const CellBelief* find(const CellKey& k) const {
    if (!in_bounds(k)) return nullptr;
    const Block* b = blocks_[block_index(k)].get();
    if (!b) return nullptr;
    const Cell& c = b->cells[cell_index(k)];
    return c.belief.observations ? &c.belief : nullptr;
  }

  [[nodiscard]] CellState classify(const CellBelief& b) const {
    if (b.observations == 0) return CellState::Unknown;
    if (b.occ_logodds >= params_.occ_threshold)
      return b.roi_logodds >= params_.roi_threshold ? CellState::Roi : CellState::Occupied;
    return CellState::Free;
  }

  [[nodiscard]] CellState state(const CellKey& k) const {
    const CellBelief* b = find(k);
    return b ? classify(*b) : CellState::Unknown;
  }

  // Direct write, clamped. Used for loading dumps and building test maps.
  void set_belief(const CellKey& k, double occ, double roi) {
    if (!in_bounds(k)) throw std::out_of_range("map: key outside bounds");
    Cell& c = touch(k);
    c.belief.occ_logodds = clamp(occ);
    c.belief.roi_logodds = clamp(roi);
    if (c.belief.observations == 0) observe(c);
    note_roi(k, c);
    ++version_;
  }

  template <class Fn>
  void for_each_cell(Fn&& fn) const {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Block* blk = blocks_[b].get();
      if (!blk) continue;
      const CellKey base = block_base(b);
      for (int n = 0; n < kBlockCells; ++n) {
        const Cell& c = blk->cells[n];
        if (!c.belief.observations) continue;
        fn(CellKey{base.i + (n >> (2 * kBlockShift)), base.j + ((n >> kBlockShift) & kBlockMask),
                   base.k + (n & kBlockMask)},
           c.belief);
      }
    }
  }

  // Same as for_each_cell but restricted to blocks overlapping the key range [lo, hi].
  template <class Fn>
  void for_each_cell_in(const CellKey& lo, const CellKey& hi, Fn&& fn) const {
    const CellKey clo{std::max(lo.i, 0), std::max(lo.j, 0), std::max(lo.k, 0)};
    const CellKey chi{std::min(hi.i, dims_[0] - 1), std::min(hi.j, dims_[1] - 1),
                      std::min(hi.k, dims_[2] - 1)};
    if (clo.i > chi.i || clo.j > chi.j || clo.k > chi.k) return;
    for (int bi = clo.i >> kBlockShift; bi <= chi.i >> kBlockShift; ++bi)
      for (int bj = clo.j >> kBlockShift; bj <= chi.j >> kBlockShift; ++bj)
        for (int bk = clo.k >> kBlockShift; bk <= chi.k >> kBlockShift; ++bk) {
          const std::size_t b =
              (static_cast<std::size_t>(bi) * block_dims_[1] + bj) * block_dims_[2] + bk;
          const Block* blk = blocks_[b].get();
          if (!blk) continue;
          for (int n = 0; n < kBlockCells; ++n) {
            const Cell& c = blk->cells[n];
            if (!c.belief.observations) continue;
            const CellKey key{(bi << kBlockShift) + (n >> (2 * kBlockShift)),
                              (bj << kBlockShift) + ((n >> kBlockShift) & kBlockMask),
                              (bk << kBlockShift) + (n & kBlockMask)};
            if (key.i < clo.i || key.j < clo.j || key.k < clo.k || key.i > chi.i ||
                key.j > chi.j || key.k > chi.k)
              continue;
            fn(key, c.belief);
          }
        }
  }

  // Stored cells sorted by key.
  [[nodiscard]] std::vector<std::pair<CellKey, CellBelief>> sorted_cells() const {
    std::vector<std::pair<CellKey, CellBelief>> out;
    out.reserve(cell_count_);
    for_each_cell([&](const CellKey& k, const CellBelief& b) { out.emplace_back(k, b); });
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  // Every cell that was Roi after some update; a superset of the current Roi cells.
  [[nodiscard]] const std::unordered_set<PackedKey>& roi_candidates() const { return roi_seen_; }

  // Batched point-cloud fusion: each cell receives at most one update per role per
  // cloud, and an endpoint hit suppresses any miss for the same cell. Rays in
  // `misses` (unit directions without a return) clear free space up to miss_range.
  void integrate(const Vec3& sensor_origin, std::span<const LabeledPoint> points,
                 std::span<const Vec3> misses = {}, double miss_range = 0.0);

 private:
  struct Cell {
    CellBelief belief;
    std::uint32_t hit_stamp{0};
    std::uint32_t free_stamp{0};
    bool fruit_scratch{false};
  };
  struct Block {
    std::array<Cell, kBlockCells> cells{};
  };

  [[nodiscard]] std::size_t block_index(const CellKey& k) const {
    return (static_cast<std::size_t>(k.i >> kBlockShift) * block_dims_[1] +
            (k.j >> kBlockShift)) *
               block_dims_[2] +
           (k.k >> kBlockShift);
  }
  static int cell_index(const CellKey& k) {
    return ((k.i & kBlockMask) << (2 * kBlockShift)) | ((k.j & kBlockMask) << kBlockShift) |
           (k.k & kBlockMask);
  }
  [[nodiscard]] CellKey block_base(std::size_t b) const {
    const int bk = static_cast<int>(b % block_dims_[2]);
    const int bj = static_cast<int>((b / block_dims_[2]) % block_dims_[1]);
    const int bi = static_cast<int>(b / (static_cast<std::size_t>(block_dims_[2]) * block_dims_[1]));
    return {bi << kBlockShift, bj << kBlockShift, bk << kBlockShift};
  }

  Cell& touch(const CellKey& k) {
    auto& slot = blocks_[block_index(k)];
    if (!slot) slot = std::make_unique<Block>();
    return slot->cells[cell_index(k)];
  }

  void observe(Cell& c) {
    if (c.belief.observations++ == 0) ++cell_count_;
  }

  void note_roi(const CellKey& k, const Cell& c) {
    if (classify(c.belief) == CellState::Roi) roi_seen_.insert(pack(k));
  }

  [[nodiscard]] double clamp(double v) const { return std::clamp(v, params_.l_min, params_.l_max); }

  MapParams params_;
  Box bounds_;
  Vec3 origin_;
  std::array<int, 3> dims_{};
  std::array<int, 3> block_dims_{};
  std::vector<std::unique_ptr<Block>> blocks_;
  std::size_t cell_count_{0};
  std::unordered_set<PackedKey> roi_seen_;
  std::uint64_t version_{0};
  std::uint32_t stamp_{0};
};

// Amanatides-Woo voxel walk. Calls visit(key, t_enter) for each cell met by the ray
// origin + t * dir, t in [0, t_max], front to back, clipped to the map bounds.
// Stops early when visit returns false.
template <class Visit>
void traverse_cells(const OccupancyMap& map, const Vec3& origin, const Vec3& dir, double t_max,
                    Visit&& visit) {
  double t0 = 0.0;
  double t1 = t_max;
  const Box& bounds = map.bounds();
  if (!clip_ray_to_box(bounds, origin, dir, t0, t1)) return;
  const double res = map.resolution();
  const auto& dims = map.dims();
  const Vec3 start = origin + t0 * dir;
  CellKey key = map.floor_key(start);
  std::array<int, 3> cell{key.i, key.j, key.k};
  std::array<int, 3> step{};
  std::array<double, 3> t_next{};
  std::array<double, 3> t_delta{};
  for (int a = 0; a < 3; ++a) {
    cell[a] = std::clamp(cell[a], 0, dims[a] - 1);
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_delta[a] = res / dir[a];
      t_next[a] = (map.origin()[a] + (cell[a] + 1) * res - origin[a]) / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_delta[a] = -res / dir[a];
      t_next[a] = (map.origin()[a] + cell[a] * res - origin[a]) / dir[a];
    } else {
      step[a] = 0;
      t_delta[a] = std::numeric_limits<double>::infinity();
      t_next[a] = std::numeric_limits<double>::infinity();
    }
  }
  double t_enter = t0;
  while (true) {
    if (!visit(CellKey{cell[0], cell[1], cell[2]}, t_enter)) return;
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    t_enter = t_next[axis];
    if (t_enter > t1) return;
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= dims[axis]) return;
    t_next[axis] += t_delta[axis];
  }
}

inline void OccupancyMap::integrate(const Vec3& sensor_origin,
                                    std::span<const LabeledPoint> points,
                                    std::span<const Vec3> misses, double miss_range) {
  if (points.empty() && (misses.empty() || !(miss_range > 0.0))) return;
  ++stamp_;
  if (stamp_ == 0) {
    for (auto& blk : blocks_)
      if (blk)
        for (auto& c : blk->cells) c.hit_stamp = c.free_stamp = 0;
    stamp_ = 1;
  }
  const std::uint32_t s = stamp_;
  auto miss = [&](const CellKey& k) {
    Cell& c = touch(k);
    if (c.hit_stamp == s || c.free_stamp == s) return;
    c.free_stamp = s;
    observe(c);
    c.belief.occ_logodds = clamp(c.belief.occ_logodds + params_.l_miss);
  };

  // Endpoint pass first so hits take priority over misses.
  std::vector<CellKey> hits;
  std::vector<std::optional<CellKey>> endpoint(points.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    const auto key = key_of(points[n].position);
    endpoint[n] = key;
    if (!key) continue;
    Cell& c = touch(*key);
    if (c.hit_stamp != s) {
      c.hit_stamp = s;
      c.fruit_scratch = false;
      hits.push_back(*key);
    }
    c.fruit_scratch = c.fruit_scratch || points[n].fruit;
  }
  for (const CellKey& k : hits) {
    Cell& c = touch(k);
    observe(c);
    c.belief.occ_logodds = clamp(c.belief.occ_logodds + params_.l_hit);
    c.belief.roi_logodds =
        clamp(c.belief.roi_logodds + (c.fruit_scratch ? params_.r_hit : params_.r_miss));
    note_roi(k, c);
  }

  for (std::size_t n = 0; n < points.size(); ++n) {
    const Vec3 delta = points[n].position - sensor_origin;
    const double len = delta.norm();
    if (len <= 0.0) continue;
    const Vec3 dir = delta / len;
    const std::optional<CellKey> end = endpoint[n];
    traverse_cells(*this, sensor_origin, dir, len, [&](const CellKey& k, double) {
      if (end && k == *end) return false;
      miss(k);
      return true;
    });
  }
  if (miss_range > 0.0)
    for (const Vec3& dir : misses)
      traverse_cells(*this, sensor_origin, dir, miss_range, [&](const CellKey& k, double) {
        miss(k);
        return true;
      });
  ++version_;
}

inline void integrate_point_cloud(OccupancyMap& map, const Vec3& sensor_origin,
                                  std::span<const LabeledPoint> points) {
  map.integrate(sensor_origin, points);
}

inline CellState cell_state(const OccupancyMap& map, const CellKey& key) { return map.state(key); }

// ---------------------------------------------------------------------------
// Frontiers

inline bool has_unknown_neighbor(const OccupancyMap& map, const CellKey& k) {
  static constexpr std::array<std::array<int, 3>, 6> kOffsets{
      {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
  for (const auto& o : kOffsets)
    if (map.state({k.i + o[0], k.j + o[1], k.k + o[2]}) == CellState::Unknown) return true;
  return false;
}

inline CellState frontier_state(FrontierType t) {
  switch (t) {
    case FrontierType::RoiFrontier: return CellState::Roi;
    case FrontierType::OccupiedFrontier: return CellState::Occupied;
    case FrontierType::FreeFrontier: return CellState::Free;
  }
  return CellState::Unknown;
}

// Frontier cells of one type, sorted by key, optionally restricted to a world box.
inline std::vector<CellKey> frontier_cells(const OccupancyMap& map, FrontierType type,
                                           const std::optional<Box>& region = std::nullopt) {
  const CellState want = frontier_state(type);
  std::vector<CellKey> out;
  auto visit = [&](const CellKey& k, const CellBelief& b) {
    if (map.classify(b) == want && has_unknown_neighbor(map, k)) out.push_back(k);
  };
  if (region) {
    const Box r = region->intersection(map.bounds());
    if (r.empty()) return out;
    map.for_each_cell_in(map.floor_key(r.min), map.floor_key(r.max), visit);
  } else {
    map.for_each_cell(visit);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Vec3> extract_frontiers(const OccupancyMap& map, FrontierType type) {
  std::vector<Vec3> out;
  for (const CellKey& k : frontier_cells(map, type)) out.push_back(map.center(k));
  return out;
}

// ---------------------------------------------------------------------------
// Ray casting

struct RayResult {
  std::optional<CellKey> terminal;
  CellState terminal_state{CellState::Unknown};
  std::vector<CellKey> traversed_unknown;
  std::size_t traversed_free{0};
};

namespace detail {

template <class OnUnknown, class OnFree>
inline std::optional<std::pair<CellKey, CellState>> walk_ray(const OccupancyMap& map,
                                                             const Vec3& origin, const Vec3& dir,
                                                             double max_range,
                                                             OnUnknown&& on_unknown,
                                                             OnFree&& on_free) {
  std::optional<std::pair<CellKey, CellState>> hit;
  traverse_cells(map, origin, dir, max_range, [&](const CellKey& k, double) {
    const CellState s = map.state(k);
    if (is_opaque(s)) {
      hit.emplace(k, s);
      return false;
    }
    if (s == CellState::Unknown)
      on_unknown(k);
    else
      on_free(k);
    return true;
  });
  return hit;
}

inline Vec3 checked_direction(const Vec3& direction) {
  const double n = direction.norm();
  if (!(n > 1e-12)) throw std::invalid_argument("cast_ray: zero direction");
  return direction / n;
}

}  // namespace detail

// Unknown cells are transparent; the ray stops at the first Occupied or Roi cell,
// at max_range, or at the map bounds.
inline RayResult cast_ray(const OccupancyMap& map, const Vec3& origin, const Vec3& direction,
                          double max_range) {
  if (!(max_range > 0.0)) throw std::invalid_argument("cast_ray: max_range must be > 0");
  const Vec3 dir = detail::checked_direction(direction);
  RayResult r;
  const auto hit = detail::walk_ray(
      map, origin, dir, max_range, [&](const CellKey& k) { r.traversed_unknown.push_back(k); },
      [&](const CellKey&) { ++r.traversed_free; });
  if (hit) {
    r.terminal = hit->first;
    r.terminal_state = hit->second;
  }
  return r;
}

struct VisibilityCount {
  std::vector<PackedKey> unknown_cells;  // sorted, unique
  std::size_t n_free{0};
  std::size_t n_occupied{0};
  std::size_t n_roi{0};
  std::size_t rays_cast{0};

  friend bool operator==(const VisibilityCount&, const VisibilityCount&) = default;
};

inline void sort_unique(std::vector<PackedKey>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Casts the camera's gain ray grid. n_free counts distinct Free cells traversed.
inline VisibilityCount count_visible_cells(const OccupancyMap& map, const ViewPose& pose,
                                           const CameraModel& camera) {
  VisibilityCount out;
  std::vector<PackedKey> free;
  const Mat3 rot = pose.orientation.toRotationMatrix();
  for (const Vec3& local : camera_ray_directions(camera, camera.gain_rays)) {
    const Vec3 dir = rot * local;
    const auto hit = detail::walk_ray(
        map, pose.position, dir, camera.max_range,
        [&](const CellKey& k) { out.unknown_cells.push_back(pack(k)); },
        [&](const CellKey& k) { free.push_back(pack(k)); });
    ++out.rays_cast;
    if (hit) {
      if (hit->second == CellState::Roi)
        ++out.n_roi;
      else
        ++out.n_occupied;
    }
  }
  sort_unique(out.unknown_cells);
  sort_unique(free);
  out.n_free = free.size();
  return out;
}

// Unknown cells reached by rays along the given camera-frame directions, sorted
// and unique.
inline std::vector<PackedKey> visible_unknown_cells(const OccupancyMap& map, const ViewPose& pose,
                                                    std::span<const Vec3> local_dirs,
                                                    double max_range) {
  std::vector<PackedKey> out;
  out.reserve(local_dirs.size() * 32);
  const Mat3 rot = pose.orientation.toRotationMatrix();
  for (const Vec3& local : local_dirs) {
    traverse_cells(map, pose.position, rot * local, max_range, [&](const CellKey& k, double) {
      const CellState s = map.state(k);
      if (s == CellState::Unknown) {
        out.push_back(pack(k));
        return true;
      }
      return s == CellState::Free;
    });
  }
  sort_unique(out);
  return out;
}

// ---------------------------------------------------------------------------
// Text dump
//
//   vmp-map v1
//   resolution <r>
//   origin <x> <y> <z>
//   bounds <minx> <miny> <minz> <maxx> <maxy> <maxz>
//   cells <n>
//   <i> <j> <k> <occ_logodds> <roi_logodds>     (n lines, sorted by key)

namespace detail {
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_map(std::ostream& os, const OccupancyMap& map) {
  using detail::fmt_double;
  const auto cells = map.sorted_cells();
  os << "vmp-map v1\n";
  os << "resolution " << fmt_double(map.resolution()) << "\n";
  os << "origin " << fmt_double(map.origin().x()) << " " << fmt_double(map.origin().y()) << " "
     << fmt_double(map.origin().z()) << "\n";
  const Box& b = map.bounds();
  os << "bounds " << fmt_double(b.min.x()) << " " << fmt_double(b.min.y()) << " "
     << fmt_double(b.min.z()) << " " << fmt_double(b.max.x()) << " " << fmt_double(b.max.y())
     << " " << fmt_double(b.max.z()) << "\n";
  os << "cells " << cells.size() << "\n";
  for (const auto& [k, c] : cells)
    os << k.i << " " << k.j << " " << k.k << " " << fmt_double(c.occ_logodds) << " "
       << fmt_double(c.roi_logodds) << "\n";
}

inline OccupancyMap read_map(std::istream& is, MapParams params = {}) {
  auto fail = [](const std::string& what) {
    throw std::runtime_error("map dump: " + what);
  };
  std::string tag, version;
  if (!(is >> tag >> version) || tag != "vmp-map" || version != "v1") fail("bad header");
  Box bounds;
  Vec3 origin;
  std::size_t n = 0;
  if (!(is >> tag >> params.resolution) || tag != "resolution") fail("missing resolution");
  if (!(is >> tag >> origin.x() >> origin.y() >> origin.z()) || tag != "origin")
    fail("missing origin");
  if (!(is >> tag >> bounds.min.x() >> bounds.min.y() >> bounds.min.z() >> bounds.max.x() >>
        bounds.max.y() >> bounds.max.z()) ||
      tag != "bounds")
    fail("missing bounds");
  if (origin != bounds.min) fail("origin must equal bounds minimum");
  if (!(is >> tag >> n) || tag != "cells") fail("missing cell count");
  OccupancyMap map(bounds, params);
  for (std::size_t c = 0; c < n; ++c) {
    CellKey k;
    double occ = 0, roi = 0;
    if (!(is >> k.i >> k.j >> k.k >> occ >> roi)) fail("truncated cell records");
    if (!map.in_bounds(k)) fail("cell outside bounds");
    map.set_belief(k, occ, roi);
  }
  return map;
}

}  // namespace vmp
