#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "vmp/camera.hpp"
#include "vmp/geometry.hpp"
#include "vmp/rng.hpp"
#include "vmp/voxel_map.hpp"

namespace vmp {

struct Fruit {
  int id{0};
  Vec3 center{Vec3::Zero()};
  double radius{0.04};
};

// Thin oriented box.
struct Leaf {
  Vec3 center{Vec3::Zero()};
  Quat orientation{Quat::Identity()};
  Vec3 half_extents{0.07, 0.045, 0.002};
};

// Vertical (z-aligned) capped cylinder centered at `center`.
struct Stem {
  Vec3 center{Vec3::Zero()};
  double radius{0.012};
  double height{1.2};
};

// ---------------------------------------------------------------------------
// Analytic ray intersections. Each returns the smallest t in [t_min, t_max] at
// which origin + t * dir meets the surface; dir must be unit length.

inline std::optional<double> intersect(const Fruit& f, const Vec3& o, const Vec3& d, double t_min,
                                       double t_max) {
  const Vec3 oc = o - f.center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - f.radius * f.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  for (const double t : {-b - s, -b + s})
    if (t >= t_min && t <= t_max) return t;
  return std::nullopt;
}

inline std::optional<double> intersect(const Leaf& l, const Vec3& o, const Vec3& d, double t_min,
                                       double t_max) {
  const Quat inv = l.orientation.conjugate();
  const Vec3 lo = inv * (o - l.center);
  const Vec3 ld = inv * d;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double e = l.half_extents[a];
    if (std::abs(ld[a]) < 1e-300) {
      if (lo[a] < -e || lo[a] > e) return std::nullopt;
      continue;
    }
    double ta = (-e - lo[a]) / ld[a];
    double tb = (e - lo[a]) / ld[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 >= t_min && t0 <= t_max) return t0;
  if (t1 >= t_min && t1 <= t_max) return t1;
  return std::nullopt;
}

inline std::optional<double> intersect(const Stem& s, const Vec3& o, const Vec3& d, double t_min,
                                       double t_max) {
  const double z_lo = s.center.z() - 0.5 * s.height;
  const double z_hi = s.center.z() + 0.5 * s.height;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double t) {
    if (t >= t_min && t <= t_max && t < best) best = t;
  };
  // Side wall.
  const double ox = o.x() - s.center.x();
  const double oy = o.y() - s.center.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-300) {
    const double b = ox * d.x() + oy * d.y();
    const double c = ox * ox + oy * oy - s.radius * s.radius;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double q = std::sqrt(disc);
      for (const double t : {(-b - q) / a, (-b + q) / a}) {
        const double z = o.z() + t * d.z();
        if (z >= z_lo && z <= z_hi) consider(t);
      }
    }
  }
  // Caps.
  if (std::abs(d.z()) > 1e-300) {
    for (const double zc : {z_lo, z_hi}) {
      const double t = (zc - o.z()) / d.z();
      const double x = o.x() + t * d.x() - s.center.x();
      const double y = o.y() + t * d.y() - s.center.y();
      if (x * x + y * y <= s.radius * s.radius) consider(t);
    }
  }
  if (std::isinf(best)) return std::nullopt;
  return best;
}

// Distance from p to the primitive surface.
inline double surface_distance(const Fruit& f, const Vec3& p) {
  return std::abs((p - f.center).norm() - f.radius);
}
inline double surface_distance(const Leaf& l, const Vec3& p) {
  const Vec3 q = (l.orientation.conjugate() * (p - l.center)).cwiseAbs() - l.half_extents;
  const double outside = q.cwiseMax(Vec3::Zero()).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return std::abs(outside + inside);
}
inline double surface_distance(const Stem& s, const Vec3& p) {
  const double radial = std::hypot(p.x() - s.center.x(), p.y() - s.center.y()) - s.radius;
  const double axial = std::abs(p.z() - s.center.z()) - 0.5 * s.height;
  const double outside = std::hypot(std::max(radial, 0.0), std::max(axial, 0.0));
  const double inside = std::min(std::max(radial, axial), 0.0);
  return std::abs(outside + inside);
}

inline double bounding_radius(const Fruit& f) { return f.radius; }
inline double bounding_radius(const Leaf& l) { return l.half_extents.norm(); }
inline double bounding_radius(const Stem& s) { return std::hypot(s.radius, 0.5 * s.height); }

// ---------------------------------------------------------------------------

struct SceneHit {
  double t{0.0};
  bool fruit{false};
  int fruit_id{-1};
};

struct Scene {
  std::vector<Fruit> fruits;
  std::vector<Leaf> leaves;
  std::vector<Stem> stems;
  Box bounds;

  void validate() const {
    if (bounds.empty()) throw std::invalid_argument("scene: empty bounds");
    std::unordered_set<int> ids;
    for (const Fruit& f : fruits) {
      if (!ids.insert(f.id).second)
        throw std::invalid_argument("scene: duplicate fruit id " + std::to_string(f.id));
      if (!(f.radius > 0.0 && f.radius <= 0.1))
        throw std::invalid_argument("scene: fruit radius outside (0, 0.1]");
      if (squared_distance(bounds, f.center) > f.radius * f.radius)
        throw std::invalid_argument("scene: fruit outside bounds");
    }
  }

  [[nodiscard]] const Fruit& fruit(int id) const {
    for (const Fruit& f : fruits)
      if (f.id == id) return f;
    throw std::out_of_range("scene: unknown fruit id " + std::to_string(id));
  }

  // Nearest hit along the ray. With foliage_only, fruits are ignored.
  [[nodiscard]] std::optional<SceneHit> raycast(const Vec3& o, const Vec3& d, double t_min,
                                                double t_max, bool foliage_only = false) const {
    std::optional<SceneHit> best;
    double limit = t_max;
    auto test = [&](const auto& prim, bool is_fruit, int id) {
      if (auto t = intersect(prim, o, d, t_min, limit)) {
        limit = *t;
        best = SceneHit{*t, is_fruit, id};
      }
    };
    if (!foliage_only)
      for (const Fruit& f : fruits) test(f, true, f.id);
    for (const Leaf& l : leaves) test(l, false, -1);
    for (const Stem& s : stems) test(s, false, -1);
    return best;
  }

  // Primitives whose bounding sphere lies within `range` of p.
  [[nodiscard]] Scene near(const Vec3& p, double range) const {
    Scene out;
    out.bounds = bounds;
    auto close = [&](const Vec3& c, double r) { return (c - p).norm() <= range + r; };
    for (const Fruit& f : fruits)
      if (close(f.center, bounding_radius(f))) out.fruits.push_back(f);
    for (const Leaf& l : leaves)
      if (close(l.center, bounding_radius(l))) out.leaves.push_back(l);
    for (const Stem& s : stems)
      if (close(s.center, bounding_radius(s))) out.stems.push_back(s);
    return out;
  }

  [[nodiscard]] double surface_distance_to(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Fruit& f : fruits) best = std::min(best, surface_distance(f, p));
    for (const Leaf& l : leaves) best = std::min(best, surface_distance(l, p));
    for (const Stem& s : stems) best = std::min(best, surface_distance(s, p));
    return best;
  }
};

// Camera workspace: a box expressed in the trolley frame.
struct Workspace {
  ViewPose base;
  Box local;

  [[nodiscard]] bool contains(const Vec3& world) const { return local.contains(base.to_local(world)); }
  [[nodiscard]] Vec3 sample(Rng& rng) const { return base.to_world(rng.in_box(local)); }
  [[nodiscard]] Vec3 center() const { return base.to_world(local.center()); }
  [[nodiscard]] Box world_aabb() const {
    Box out{Vec3::Constant(std::numeric_limits<double>::infinity()),
            Vec3::Constant(-std::numeric_limits<double>::infinity())};
    for (int c = 0; c < 8; ++c) {
      const Vec3 corner((c & 1) ? local.max.x() : local.min.x(),
                        (c & 2) ? local.max.y() : local.min.y(),
                        (c & 4) ? local.max.z() : local.min.z());
      const Vec3 w = base.to_world(corner);
      out.min = out.min.cwiseMin(w);
      out.max = out.max.cwiseMax(w);
    }
    return out;
  }
};

struct SegmentPlacement {
  int segment_index{0};
  ViewPose trolley_base;
  Box workspace;  // trolley frame
  double time_budget{60.0};

  [[nodiscard]] Workspace arm_workspace() const { return {trolley_base, workspace}; }
  // Camera pose at segment start: workspace center, looking along the trolley's +x.
  [[nodiscard]] ViewPose start_pose() const {
    return {trolley_base.to_world(workspace.center()), trolley_base.orientation};
  }
};

struct Scenario {
  std::string name;
  Scene scene;
  std::vector<SegmentPlacement> segments;
};

// ---------------------------------------------------------------------------
// Simulated depth sensor

struct DepthScan {
  std::vector<LabeledPoint> points;
  std::vector<Vec3> misses;  // world directions of rays without a return
};

inline DepthScan render_scan(const Scene& scene, const ViewPose& pose, const CameraModel& camera,
                             Rng* noise = nullptr) {
  const Scene local = scene.near(pose.position, camera.max_range);
  const Mat3 rot = pose.orientation.toRotationMatrix();
  DepthScan scan;
  for (const Vec3& dl : camera_ray_directions(camera, camera.sensor_rays)) {
    const Vec3 d = rot * dl;
    const auto hit = local.raycast(pose.position, d, camera.min_range, camera.max_range);
    if (!hit) {
      scan.misses.push_back(d);
      continue;
    }
    double t = hit->t;
    if (noise && camera.range_noise_sigma > 0.0) t += camera.range_noise_sigma * noise->normal();
    scan.points.push_back({pose.position + t * d, hit->fruit});
  }
  return scan;
}

// Labeled hit points only; rays without a return yield nothing.
inline std::vector<LabeledPoint> render_depth(const Scene& scene, const ViewPose& pose,
                                              const CameraModel& camera, Rng* noise = nullptr) {
  return render_scan(scene, pose, camera, noise).points;
}

// Fraction of sight rays from the camera to the fruit's visible disc that are
// blocked by foliage before reaching the fruit surface.
inline double occluded_fraction(const Scene& scene, int fruit_id, const ViewPose& pose,
                                const CameraModel& /*camera*/, int samples = 1024) {
  const Fruit& f = scene.fruit(fruit_id);
  const Vec3 view = f.center - pose.position;
  if (view.norm() <= f.radius) return 0.0;
  const Vec3 axis = view.normalized();
  const Vec3 u = (std::abs(axis.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX()).cross(axis).normalized();
  const Vec3 w = axis.cross(u);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  int blocked = 0;
  for (int i = 0; i < samples; ++i) {
    const double rho = f.radius * std::sqrt((i + 0.5) / samples);
    const double phi = i * golden;
    const Vec3 q = f.center + rho * (std::cos(phi) * u + std::sin(phi) * w);
    const Vec3 d = (q - pose.position).normalized();
    const auto t_fruit = intersect(f, pose.position, d, 0.0, std::numeric_limits<double>::infinity());
    if (!t_fruit) continue;
    if (scene.raycast(pose.position, d, 0.0, *t_fruit, true)) ++blocked;
  }
  return static_cast<double>(blocked) / samples;
}

// ---------------------------------------------------------------------------
// Scene text format
//
//   scene v1
//   fruit <id> <cx> <cy> <cz> <r>
//   leaf <cx> <cy> <cz> <qx> <qy> <qz> <qw> <ex> <ey> <ez>     (half extents)
//   stem <cx> <cy> <cz> <r> <h>
//   bounds <minx> <miny> <minz> <maxx> <maxy> <maxz>            (optional)
//   segment <index> <bx> <by> <bz> <yaw> <wminx> <wminy> <wminz> <wmaxx> <wmaxy> <wmaxz> <budget>
//                                                              (optional, repeatable)

inline void write_scenario(std::ostream& os, const Scenario& sc) {
  using detail::fmt_double;
  auto v3 = [](const Vec3& v) {
    return fmt_double(v.x()) + " " + fmt_double(v.y()) + " " + fmt_double(v.z());
  };
  os << "scene v1\n";
  os << "bounds " << v3(sc.scene.bounds.min) << " " << v3(sc.scene.bounds.max) << "\n";
  for (const Fruit& f : sc.scene.fruits)
    os << "fruit " << f.id << " " << v3(f.center) << " " << fmt_double(f.radius) << "\n";
  for (const Leaf& l : sc.scene.leaves) {
    const Quat& q = l.orientation;
    os << "leaf " << v3(l.center) << " " << fmt_double(q.x()) << " " << fmt_double(q.y()) << " "
       << fmt_double(q.z()) << " " << fmt_double(q.w()) << " " << v3(l.half_extents) << "\n";
  }
  for (const Stem& s : sc.scene.stems)
    os << "stem " << v3(s.center) << " " << fmt_double(s.radius) << " " << fmt_double(s.height)
       << "\n";
  for (const SegmentPlacement& seg : sc.segments) {
    const Vec3 f = seg.trolley_base.forward();
    os << "segment " << seg.segment_index << " " << v3(seg.trolley_base.position) << " "
       << fmt_double(std::atan2(f.y(), f.x())) << " " << v3(seg.workspace.min) << " "
       << v3(seg.workspace.max) << " " << fmt_double(seg.time_budget) << "\n";
  }
}

inline Box default_workspace() { return {Vec3(0.0, -0.5, 0.25), Vec3(0.3, 0.5, 1.15)}; }

inline Scenario read_scenario(std::istream& is, const std::string& name = "file") {
  Scenario sc;
  sc.name = name;
  std::string line;
  int line_no = 0;
  bool header = false;
  bool have_bounds = false;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("scene file line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (!header) {
      std::string version;
      if (tag != "scene" || !(ls >> version) || version != "v1") fail("expected 'scene v1'");
      header = true;
      continue;
    }
    if (tag == "fruit") {
      Fruit f;
      if (!(ls >> f.id >> f.center.x() >> f.center.y() >> f.center.z() >> f.radius))
        fail("malformed fruit");
      sc.scene.fruits.push_back(f);
    } else if (tag == "leaf") {
      Leaf l;
      double qx, qy, qz, qw;
      if (!(ls >> l.center.x() >> l.center.y() >> l.center.z() >> qx >> qy >> qz >> qw >>
            l.half_extents.x() >> l.half_extents.y() >> l.half_extents.z()))
        fail("malformed leaf");
      l.orientation = Quat(qw, qx, qy, qz);
      if (l.orientation.norm() < 1e-12) fail("leaf quaternion is zero");
      if (std::abs(l.orientation.norm() - 1.0) > 1e-12) l.orientation.normalize();
      sc.scene.leaves.push_back(l);
    } else if (tag == "stem") {
      Stem s;
      if (!(ls >> s.center.x() >> s.center.y() >> s.center.z() >> s.radius >> s.height))
        fail("malformed stem");
      sc.scene.stems.push_back(s);
    } else if (tag == "bounds") {
      Box& b = sc.scene.bounds;
      if (!(ls >> b.min.x() >> b.min.y() >> b.min.z() >> b.max.x() >> b.max.y() >> b.max.z()))
        fail("malformed bounds");
      have_bounds = true;
    } else if (tag == "segment") {
      SegmentPlacement seg;
      double yaw = 0.0;
      Vec3 p;
      if (!(ls >> seg.segment_index >> p.x() >> p.y() >> p.z() >> yaw >> seg.workspace.min.x() >>
            seg.workspace.min.y() >> seg.workspace.min.z() >> seg.workspace.max.x() >>
            seg.workspace.max.y() >> seg.workspace.max.z() >> seg.time_budget))
        fail("malformed segment");
      seg.trolley_base = {p, yaw_rotation(yaw)};
      sc.segments.push_back(seg);
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!header) throw std::runtime_error("scene file: missing 'scene v1' header");
  if (!have_bounds) {
    Box b{Vec3::Constant(std::numeric_limits<double>::infinity()),
          Vec3::Constant(-std::numeric_limits<double>::infinity())};
    auto grow = [&](const Vec3& c, double r) {
      b.min = b.min.cwiseMin(c - Vec3::Constant(r));
      b.max = b.max.cwiseMax(c + Vec3::Constant(r));
    };
    for (const Fruit& f : sc.scene.fruits) grow(f.center, f.radius);
    for (const Leaf& l : sc.scene.leaves) grow(l.center, bounding_radius(l));
    for (const Stem& s : sc.scene.stems) grow(s.center, bounding_radius(s));
    if (b.empty()) b = {Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 1.0)};
    sc.scene.bounds = b.inflated(0.5);
  }
  if (sc.segments.empty()) {
    SegmentPlacement seg;
    const Vec3 c = sc.scene.bounds.center();
    seg.trolley_base = {Vec3(c.x(), sc.scene.bounds.min.y() + 0.05, sc.scene.bounds.min.z()),
                        yaw_rotation(kPi / 2)};
    seg.workspace = default_workspace();
    sc.segments.push_back(seg);
  }
  sc.scene.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// Built-in glasshouse scenarios. Rows run along world x; the trolley aisle is the
// plane y = 0 and plant rows stand at y = +/-kRowOffset. Every row is split into
// four 1 m segments; each segment places the trolley base on the aisle facing
// the row.

struct ScenarioSpec {
  std::string name{"scenario1"};
  std::uint64_t seed{0};
  double time_budget{60.0};
};

namespace detail {

inline constexpr double kRowOffset = 0.55;
inline constexpr double kLevelHeight = 1.3;

struct PlantSpec {
  Vec3 base;        // stem foot
  double aisle_dir;  // world yaw pointing from the stem toward the aisle
  int n_fruits;
  int n_leaves;
};

inline bool leaf_clear_of(const Leaf& leaf, const std::vector<Fruit>& fruits, double margin) {
  for (const Fruit& f : fruits)
    if (surface_distance(leaf, f.center) < f.radius + margin) return false;
  return true;
}

inline void grow_plant(const PlantSpec& p, Rng& rng, int& next_id, Scene& scene) {
  Stem stem;
  stem.height = 1.2;
  stem.center = p.base + Vec3(0, 0, 0.1 + 0.5 * stem.height);
  scene.stems.push_back(stem);

  std::vector<Fruit> placed;
  for (int n = 0; n < p.n_fruits; ++n) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Fruit f;
      f.radius = rng.uniform(0.03, 0.042);
      const double ang = p.aisle_dir + rng.uniform(-1.7, 1.7);
      const double off = rng.uniform(0.055, 0.085);
      const double z = rng.uniform(0.35, 1.15);
      f.center = p.base + Vec3(off * std::cos(ang), off * std::sin(ang), z);
      bool ok = true;
      for (const Fruit& g : placed)
        if ((g.center - f.center).norm() < f.radius + g.radius + 0.07) ok = false;
      if (!ok) continue;
      f.id = next_id++;
      placed.push_back(f);
      break;
    }
  }
  if (static_cast<int>(placed.size()) != p.n_fruits)
    throw std::logic_error("scenario: could not place fruits");

  for (int n = 0; n < p.n_leaves; ++n) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      Leaf leaf;
      leaf.half_extents = Vec3(rng.uniform(0.06, 0.08), rng.uniform(0.035, 0.05), 0.002);
      const double yaw = rng.uniform(0.0, 2.0 * kPi);
      const double droop = rng.uniform(0.3, 1.1);
      const double z = rng.uniform(0.3, 1.25);
      const Vec3 out(std::cos(yaw), std::sin(yaw), 0.0);
      leaf.center = p.base + Vec3(0, 0, z) + (0.02 + leaf.half_extents.x()) * out;
      leaf.orientation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                              Eigen::AngleAxisd(droop, Vec3::UnitY()));
      if (!leaf_clear_of(leaf, placed, 0.012)) continue;
      scene.leaves.push_back(leaf);
      break;
    }
  }
  scene.fruits.insert(scene.fruits.end(), placed.begin(), placed.end());
}

// Plants for one level: two rows of six, fruit totals pinned to n_fruits.
inline void grow_level(int level, int n_fruits, Rng& rng, int& next_id, Scene& scene) {
  constexpr int kPlantsPerRow = 6;
  constexpr int kPlants = 2 * kPlantsPerRow;
  std::vector<int> counts(kPlants, n_fruits / kPlants);
  for (int extra = n_fruits % kPlants; extra > 0;) {
    const std::size_t p = rng.index(kPlants);
    if (counts[p] == n_fruits / kPlants) {
      ++counts[p];
      --extra;
    }
  }
  const double z0 = level * kLevelHeight;
  for (int row = 0; row < 2; ++row) {
    const double y = row == 0 ? kRowOffset : -kRowOffset;
    for (int i = 0; i < kPlantsPerRow; ++i) {
      PlantSpec p;
      p.base = Vec3(1.0 / 3.0 + i * 2.0 / 3.0, y, z0);
      p.aisle_dir = row == 0 ? -kPi / 2 : kPi / 2;
      p.n_fruits = counts[row * kPlantsPerRow + i];
      p.n_leaves = 7;
      grow_plant(p, rng, next_id, scene);
    }
  }
}

inline std::vector<SegmentPlacement> row_segments(int levels, double budget, const Box& workspace) {
  std::vector<SegmentPlacement> out;
  for (int level = 0; level < levels; ++level)
    for (int row = 0; row < 2; ++row)
      for (int s = 0; s < 4; ++s) {
        SegmentPlacement seg;
        seg.segment_index = static_cast<int>(out.size());
        seg.trolley_base = {Vec3(0.5 + s, 0.0, level * kLevelHeight),
                            yaw_rotation(row == 0 ? kPi / 2 : -kPi / 2)};
        seg.workspace = workspace;
        seg.time_budget = budget;
        out.push_back(seg);
      }
  return out;
}

}  // namespace detail

inline Scenario build_scenario(const ScenarioSpec& spec) {
  Scenario sc;
  sc.name = spec.name;
  Rng rng(spec.seed ^ 0x5eed5eedULL);
  int next_id = 0;
  if (spec.name == "scenario1") {
    detail::grow_level(0, 47, rng, next_id, sc.scene);
    sc.scene.bounds = {Vec3(-0.5, -0.9, 0.0), Vec3(4.5, 0.9, 1.5)};
    sc.segments = detail::row_segments(1, spec.time_budget, default_workspace());
  } else if (spec.name == "scenario2") {
    detail::grow_level(0, 47, rng, next_id, sc.scene);
    detail::grow_level(1, 47, rng, next_id, sc.scene);
    // Upper-level gutters.
    for (const double y : {detail::kRowOffset, -detail::kRowOffset}) {
      Leaf gutter;
      gutter.center = Vec3(2.0, y, detail::kLevelHeight + 0.04);
      gutter.half_extents = Vec3(2.2, 0.1, 0.02);
      sc.scene.leaves.push_back(gutter);
    }
    sc.scene.bounds = {Vec3(-0.5, -0.9, 0.0), Vec3(4.5, 0.9, 2.8)};
    sc.segments = detail::row_segments(2, spec.time_budget, default_workspace());
  } else if (spec.name == "micro") {
    for (int i = 0; i < 2; ++i) {
      detail::PlantSpec p;
      p.base = Vec3(0.3 + 0.4 * i, detail::kRowOffset, 0.0);
      p.aisle_dir = -kPi / 2;
      p.n_fruits = 2;
      p.n_leaves = 3;
      detail::grow_plant(p, rng, next_id, sc.scene);
    }
    sc.scene.bounds = {Vec3(-0.3, -0.3, 0.0), Vec3(1.3, 0.9, 1.5)};
    SegmentPlacement seg;
    seg.trolley_base = {Vec3(0.5, 0.0, 0.0), yaw_rotation(kPi / 2)};
    seg.workspace = default_workspace();
    seg.time_budget = spec.time_budget;
    sc.segments.push_back(seg);
  } else {
    throw std::invalid_argument("unknown scenario '" + spec.name + "'");
  }
  sc.scene.validate();
  return sc;
}

}  // namespace vmp
