#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vmp/testing/oracles.hpp"
#include "vmp/voxel_map.hpp"

using namespace vmp;

namespace {

OccupancyMap cube_map(int n = 20, double res = 0.02) {
  MapParams p;
  p.resolution = res;
  return OccupancyMap({Vec3::Zero(), Vec3::Constant(n * res)}, p);
}

Vec3 cell_center(const OccupancyMap& m, int i, int j, int k) { return m.center({i, j, k}); }

// Small deterministic map used for the dump golden file.
OccupancyMap golden_map() {
  OccupancyMap m = cube_map(8);
  const Vec3 origin = cell_center(m, 0, 4, 4);
  const std::vector<LabeledPoint> cloud{{cell_center(m, 6, 4, 4), true},
                                        {cell_center(m, 5, 6, 4), false},
                                        {cell_center(m, 4, 2, 3), false}};
  m.integrate(origin, cloud);
  return m;
}

}  // namespace

TEST(VoxelMap, SingleRayTenCellsEndingOnFruit) {
  OccupancyMap m = cube_map();
  const std::vector<LabeledPoint> cloud{{cell_center(m, 9, 5, 5), true}};
  integrate_point_cloud(m, cell_center(m, 0, 5, 5), cloud);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(cell_state(m, {i, 5, 5}), CellState::Free) << i;
  EXPECT_EQ(cell_state(m, {9, 5, 5}), CellState::Roi);
  EXPECT_EQ(m.cell_count(), 10u);
  EXPECT_DOUBLE_EQ(m.find({3, 5, 5})->occ_logodds, -0.4);
}

TEST(VoxelMap, RepeatedHitAddsLogOdds) {
  OccupancyMap m = cube_map();
  const std::vector<LabeledPoint> cloud{{cell_center(m, 9, 5, 5), false}};
  m.integrate(cell_center(m, 0, 5, 5), cloud);
  m.integrate(cell_center(m, 0, 5, 5), cloud);
  EXPECT_DOUBLE_EQ(m.find({9, 5, 5})->occ_logodds, 1.7);
  EXPECT_EQ(m.state({9, 5, 5}), CellState::Occupied);
}

TEST(VoxelMap, CrossingRaysShareOneMissUpdate) {
  OccupancyMap m = cube_map();
  const Vec3 o = cell_center(m, 0, 5, 5);
  // Both rays pass through cell (2,5,5) before diverging.
  const std::vector<LabeledPoint> cloud{{cell_center(m, 9, 5, 5), false},
                                        {cell_center(m, 9, 5, 5) + Vec3(0, 0.005, 0), false}};
  m.integrate(o, cloud);
  EXPECT_DOUBLE_EQ(m.find({2, 5, 5})->occ_logodds, -0.4);
}

TEST(VoxelMap, BatchedUpdateMatchesCounterOracle) {
  Rng rng(11);
  const double res = 0.02;
  for (int trial = 0; trial < 50; ++trial) {
    OccupancyMap m = cube_map(20, res);
    const Vec3 origin = rng.in_box({Vec3::Constant(0.15), Vec3::Constant(0.25)});
    std::vector<LabeledPoint> cloud;
    while (cloud.size() < 40) {
      const Vec3 p = rng.in_box({Vec3::Constant(0.01), Vec3::Constant(0.39)});
      const Vec3 d = (p - origin).normalized();
      const double len = (p - origin).norm();
      if (vmp::testing::grazing(m, origin, d, len, 1.5 * res / 10.0)) continue;
      cloud.push_back({p, rng.uniform() < 0.3});
    }
    // Per-cell counters from an independent traversal.
    std::map<CellKey, int> hits;
    std::map<CellKey, bool> fruit;
    std::set<CellKey> misses;
    for (const LabeledPoint& pt : cloud) {
      const CellKey end = m.floor_key(pt.position);
      ++hits[end];
      fruit[end] = fruit[end] || pt.fruit;
      const Vec3 d = (pt.position - origin).normalized();
      const double len = (pt.position - origin).norm();
      std::optional<CellKey> last;
      for (double t = 0.0; t <= len; t += res / 10.0) {
        const CellKey k = m.floor_key(origin + t * d);
        if (k == end) break;
        if (!last || *last != k) misses.insert(k);
        last = k;
      }
    }
    m.integrate(origin, cloud);
    std::size_t expected_cells = 0;
    for (const auto& [k, n] : hits) {
      ++expected_cells;
      const CellBelief* b = m.find(k);
      ASSERT_NE(b, nullptr);
      EXPECT_DOUBLE_EQ(b->occ_logodds, 0.85);
      EXPECT_DOUBLE_EQ(b->roi_logodds, fruit[k] ? 0.85 : -0.4);
    }
    for (const CellKey& k : misses) {
      if (hits.contains(k)) continue;
      ++expected_cells;
      const CellBelief* b = m.find(k);
      ASSERT_NE(b, nullptr);
      EXPECT_DOUBLE_EQ(b->occ_logodds, -0.4);
    }
    EXPECT_EQ(m.cell_count(), expected_cells) << "trial " << trial;
  }
}

TEST(VoxelMap, EmptyCloudIsNoOp) {
  OccupancyMap m = cube_map();
  const auto v = m.version();
  m.integrate(Vec3::Constant(0.1), {});
  EXPECT_EQ(m.cell_count(), 0u);
  EXPECT_EQ(m.version(), v);
}

TEST(VoxelMap, PointOutsideBoundsIsClipped) {
  OccupancyMap m = cube_map();
  const std::vector<LabeledPoint> cloud{{Vec3(0.9, 0.11, 0.11), false}};
  EXPECT_NO_THROW(m.integrate(cell_center(m, 0, 5, 5), cloud));
  EXPECT_EQ(m.cell_count(), 20u);
  EXPECT_EQ(m.state({19, 5, 5}), CellState::Free);
}

TEST(VoxelMap, MissRaysClearToRange) {
  OccupancyMap m = cube_map();
  const std::vector<Vec3> misses{Vec3::UnitX()};
  m.integrate(cell_center(m, 0, 5, 5), {}, misses, 0.1);
  EXPECT_EQ(m.state({4, 5, 5}), CellState::Free);
  EXPECT_EQ(m.state({6, 5, 5}), CellState::Unknown);
}

TEST(VoxelMap, HitWinsOverMissInOneCloud) {
  OccupancyMap m = cube_map();
  const Vec3 o = cell_center(m, 0, 5, 5);
  const std::vector<LabeledPoint> cloud{{cell_center(m, 4, 5, 5), false},
                                        {cell_center(m, 9, 5, 5), false}};
  m.integrate(o, cloud);
  EXPECT_DOUBLE_EQ(m.find({4, 5, 5})->occ_logodds, 0.85);
}

TEST(VoxelMap, CellStateThresholds) {
  OccupancyMap m = cube_map();
  EXPECT_EQ(cell_state(m, {1, 1, 1}), CellState::Unknown);
  EXPECT_EQ(cell_state(m, {-1, 0, 0}), CellState::Unknown);
  EXPECT_EQ(cell_state(m, {100, 0, 0}), CellState::Unknown);
  m.set_belief({1, 1, 1}, 0.85, -0.4);
  EXPECT_EQ(cell_state(m, {1, 1, 1}), CellState::Occupied);
  m.set_belief({2, 2, 2}, 0.85, 0.85);
  EXPECT_EQ(cell_state(m, {2, 2, 2}), CellState::Roi);
  m.set_belief({3, 3, 3}, -0.4, 0.85);
  EXPECT_EQ(cell_state(m, {3, 3, 3}), CellState::Free);
}

TEST(VoxelMap, LogOddsStayClamped) {
  Rng rng(5);
  OccupancyMap m = cube_map();
  const Vec3 o = cell_center(m, 0, 10, 10);
  for (int round = 0; round < 40; ++round) {
    std::vector<LabeledPoint> cloud;
    for (int n = 0; n < 30; ++n)
      cloud.push_back({rng.in_box({Vec3(0.2, 0.1, 0.1), Vec3(0.35, 0.3, 0.3)}), rng.uniform() < 0.5});
    m.integrate(o, cloud);
  }
  m.for_each_cell([&](const CellKey&, const CellBelief& b) {
    EXPECT_GE(b.occ_logodds, -2.0);
    EXPECT_LE(b.occ_logodds, 3.5);
    EXPECT_GE(b.roi_logodds, -2.0);
    EXPECT_LE(b.roi_logodds, 3.5);
  });
}

TEST(VoxelMap, RepeatedMissesNeverOccupy) {
  OccupancyMap m = cube_map();
  const std::vector<LabeledPoint> cloud{{cell_center(m, 9, 5, 5), false}};
  for (int n = 0; n < 20; ++n) m.integrate(cell_center(m, 0, 5, 5), cloud);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(m.state({i, 5, 5}), CellState::Free);
}

TEST(Frontiers, UnknownMapHasNone) {
  const OccupancyMap m = cube_map();
  for (const FrontierType t :
       {FrontierType::RoiFrontier, FrontierType::OccupiedFrontier, FrontierType::FreeFrontier})
    EXPECT_TRUE(extract_frontiers(m, t).empty());
}

TEST(Frontiers, IsolatedFreeCell) {
  OccupancyMap m = cube_map();
  m.set_belief({4, 4, 4}, -0.4, -0.4);
  const auto f = extract_frontiers(m, FrontierType::FreeFrontier);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_TRUE(f[0].isApprox(m.center({4, 4, 4})));
  EXPECT_TRUE(extract_frontiers(m, FrontierType::OccupiedFrontier).empty());
}

TEST(Frontiers, EnclosedCellIsNotFrontier) {
  OccupancyMap m = cube_map();
  for (int i = 3; i <= 5; ++i)
    for (int j = 3; j <= 5; ++j)
      for (int k = 3; k <= 5; ++k) m.set_belief({i, j, k}, -0.4, -0.4);
  const auto cells = frontier_cells(m, FrontierType::FreeFrontier);
  EXPECT_EQ(cells.size(), 26u);
  EXPECT_FALSE(std::binary_search(cells.begin(), cells.end(), CellKey{4, 4, 4}));
  EXPECT_TRUE(std::is_sorted(cells.begin(), cells.end()));
}

TEST(Frontiers, MatchesNeighborScanOracle) {
  const auto r = vmp::testing::frontier_suite(100, 21);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(RayCast, UnknownThenOccupied) {
  OccupancyMap m = cube_map();
  m.set_belief({6, 5, 5}, 0.85, -0.4);
  const RayResult r = cast_ray(m, cell_center(m, 1, 5, 5), Vec3::UnitX(), 1.0);
  ASSERT_TRUE(r.terminal);
  EXPECT_EQ(*r.terminal, (CellKey{6, 5, 5}));
  EXPECT_EQ(r.terminal_state, CellState::Occupied);
  EXPECT_EQ(r.traversed_unknown.size(), 5u);
}

TEST(RayCast, FreeCorridorToMaxRange) {
  OccupancyMap m = cube_map();
  for (int i = 0; i < 20; ++i) m.set_belief({i, 5, 5}, -0.4, -0.4);
  const RayResult r = cast_ray(m, cell_center(m, 0, 5, 5), Vec3::UnitX(), 0.2);
  EXPECT_FALSE(r.terminal);
  EXPECT_TRUE(r.traversed_unknown.empty());
  EXPECT_GT(r.traversed_free, 0u);
}

TEST(RayCast, ZeroDirectionThrows) {
  const OccupancyMap m = cube_map();
  EXPECT_THROW(cast_ray(m, Vec3::Constant(0.1), Vec3::Zero(), 1.0), std::invalid_argument);
}

TEST(RayCast, MatchesMarchingOracle) {
  const auto r = vmp::testing::raycast_suite(2000, 22);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(Visibility, FacingUnknownSpace) {
  const OccupancyMap m = cube_map();
  CameraModel cam;
  const ViewPose pose{cell_center(m, 1, 10, 10), Quat::Identity()};
  const VisibilityCount v = count_visible_cells(m, pose, cam);
  EXPECT_EQ(v.n_roi, 0u);
  EXPECT_EQ(v.n_occupied, 0u);
  EXPECT_GT(v.unknown_cells.size(), 0u);
  EXPECT_EQ(v.rays_cast, 256u);
}

TEST(Visibility, WallBehindFreeSpace) {
  MapParams p;
  OccupancyMap m({Vec3(0, -0.6, -0.6), Vec3(1.0, 0.6, 0.6)}, p);
  const CellKey wall_lo = m.floor_key(Vec3(0.5, -0.6, -0.6));
  const auto& d = m.dims();
  for (int i = 0; i < d[0]; ++i)
    for (int j = 0; j < d[1]; ++j)
      for (int k = 0; k < d[2]; ++k) {
        if (i < wall_lo.i) m.set_belief({i, j, k}, -0.4, -0.4);
        else if (i == wall_lo.i) m.set_belief({i, j, k}, 0.85, -0.4);
      }
  CameraModel cam;
  const VisibilityCount v = count_visible_cells(m, {Vec3(0.01, 0, 0), Quat::Identity()}, cam);
  EXPECT_TRUE(v.unknown_cells.empty());
  EXPECT_EQ(v.n_occupied, 256u);
}

TEST(Visibility, EqualsPerRayUnion) {
  Rng rng(31);
  CameraModel cam;
  cam.gain_rays = {8, 6};
  for (int n = 0; n < 30; ++n) {
    const OccupancyMap m = vmp::testing::random_map(rng, 20, 0.02, 0.5, 0.4, 0.07);
    const ViewPose pose = look_at(rng.in_box(m.bounds()), rng.in_box(m.bounds()));
    const VisibilityCount got = count_visible_cells(m, pose, cam);
    const VisibilityCount want = vmp::testing::per_ray_union(m, pose, cam);
    EXPECT_EQ(got.unknown_cells, want.unknown_cells);
    EXPECT_EQ(got.n_roi, want.n_roi);
    EXPECT_EQ(got.n_occupied, want.n_occupied);
    const auto dirs = camera_ray_directions(cam, cam.gain_rays);
    EXPECT_EQ(visible_unknown_cells(m, pose, dirs, cam.max_range), want.unknown_cells);
  }
}

TEST(Visibility, Deterministic) {
  Rng rng(32);
  const OccupancyMap m = vmp::testing::random_map(rng, 20, 0.02, 0.5, 0.4, 0.07);
  const ViewPose pose = look_at(Vec3::Constant(0.05), Vec3::Constant(0.3));
  const CameraModel cam;
  EXPECT_EQ(count_visible_cells(m, pose, cam), count_visible_cells(m, pose, cam));
}

TEST(MapDump, MatchesGoldenFile) {
  std::ostringstream os;
  write_map(os, golden_map());
  std::ifstream in(VMP_TEST_DATA_DIR "/golden_map.txt");
  ASSERT_TRUE(in) << "missing golden file";
  std::stringstream want;
  want << in.rdbuf();
  EXPECT_EQ(os.str(), want.str());
}

TEST(MapDump, RoundTrip) {
  const OccupancyMap m = golden_map();
  std::stringstream ss;
  write_map(ss, m);
  const OccupancyMap back = read_map(ss);
  EXPECT_EQ(back.cell_count(), m.cell_count());
  std::ostringstream a, b;
  write_map(a, m);
  write_map(b, back);
  EXPECT_EQ(a.str(), b.str());
}

TEST(MapDump, RejectsBadHeader) {
  std::istringstream in("not-a-map v1\n");
  EXPECT_THROW(read_map(in), std::runtime_error);
}

TEST(PackedKey, RoundTripsAndKeepsOrder) {
  const CellKey a{3, 7, 1}, b{3, 8, 0};
  EXPECT_EQ(unpack(pack(a)), a);
  EXPECT_LT(pack(a), pack(b));
}
