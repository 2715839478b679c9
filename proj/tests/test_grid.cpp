#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "xview/grid.hpp"

using namespace xview;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent binning oracle: scan every bin interval for membership.
std::optional<VoxelIndex> scan_oracle(const std::array<double, 3>& values, const GridSpec& g) {
  const auto v = wrap_values(values, g);
  std::array<std::int64_t, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    bool found = false;
    for (std::int32_t b = 0; b < g.bins[a]; ++b) {
      const double bin_lo = g.lo[a] + b * g.pitch(a);
      const double bin_hi = b + 1 == g.bins[a] ? g.hi[a] : g.lo[a] + (b + 1) * g.pitch(a);
      if (v[a] >= bin_lo && v[a] < bin_hi) {
        idx[a] = b;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return VoxelIndex{idx[0], idx[1], idx[2]};
}

std::optional<VoxelIndex> vox(const std::array<double, 3>& v, const GridSpec& g) {
  return voxelize(v, g);
}

GridSpec simple_grid() {
  GridSpec g;
  g.lo = {0.0, 0.0, 0.0};
  g.hi = {10.0, 10.0, 10.0};
  g.bins = {10, 10, 10};
  return g;
}

}  // namespace

TEST_CASE("voxelize: frozen single-axis cases") {
  const GridSpec g = simple_grid();
  const auto a = vox({3.7, 0.0, 0.0}, g);
  REQUIRE(a.has_value());
  CHECK(a->i == 3);
  // half-open upper edge
  CHECK_FALSE(vox({10.0, 0.0, 0.0}, g).has_value());
  CHECK(vox({0.0, 0.0, 0.0}, g).has_value());
  CHECK_FALSE(vox({-1e-12, 0.0, 0.0}, g).has_value());
}

TEST_CASE("voxelize matches the exhaustive scan oracle on random values") {
  GridSpec g;
  g.lo = {0.0, -kPi, 0.0};
  g.hi = {10.0, kPi, 5.0};
  g.bins = {10, 36, 5};
  g.periodic_theta = true;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(-2.0, 12.0);
  std::uniform_real_distribution<double> t(-10.0, 10.0);
  std::uniform_real_distribution<double> p(-1.0, 6.0);
  for (int n = 0; n < 10000; ++n) {
    const std::array<double, 3> v{r(rng), t(rng), p(rng)};
    CHECK(voxelize(v, g) == scan_oracle(v, g));
  }

  GridSpec plain = simple_grid();
  for (int n = 0; n < 10000; ++n) {
    const std::array<double, 3> v{r(rng), r(rng), r(rng)};
    CHECK(voxelize(v, plain) == scan_oracle(v, plain));
  }
}

TEST_CASE("voxelize: exact boundary values on a binary-exact grid") {
  GridSpec g;
  g.lo = {0.0, 0.0, 0.0};
  g.hi = {8.0, 8.0, 8.0};
  g.bins = {16, 16, 16};  // pitch 0.5, boundaries exact in binary
  for (int b = 0; b < 16; ++b) {
    const double edge = 0.5 * b;
    const auto got = vox({edge, 0.0, 0.0}, g);
    REQUIRE(got.has_value());
    CHECK(got->i == b);
    CHECK(vox({edge, 0.0, 0.0}, g) == scan_oracle({edge, 0.0, 0.0}, g));
  }
  CHECK_FALSE(vox({8.0, 0.0, 0.0}, g).has_value());
}

TEST_CASE("periodic wrap: theta and theta + 2*pi voxelize identically") {
  GridSpec g;
  g.lo = {0.0, -kPi, 0.0};
  g.hi = {1.0, kPi, 1.0};
  g.bins = {1, 360, 1};
  g.periodic_theta = true;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t(-kPi, kPi);
  for (int n = 0; n < 10000; ++n) {
    const double theta = t(rng);
    const auto a = vox({0.5, theta, 0.5}, g);
    const auto b = vox({0.5, theta + 2.0 * kPi, 0.5}, g);
    const auto c = vox({0.5, theta - 2.0 * kPi, 0.5}, g);
    REQUIRE(a.has_value());
    CHECK(a == b);
    CHECK(a == c);
  }
}

TEST_CASE("periodic_theta requires a 2*pi span") {
  GridSpec g;
  g.lo = {0.0, -kPi, 0.0};
  g.hi = {1.0, kPi / 2, 1.0};
  g.bins = {1, 10, 1};
  g.periodic_theta = true;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("grid validation rejects empty extents and zero bins") {
  GridSpec g = simple_grid();
  g.bins[0] = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = simple_grid();
  g.lo[2] = g.hi[2];
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("voxel_center: frozen cases") {
  const GridSpec g = simple_grid();
  CHECK(voxel_center({3, 0, 0}, g)[0] == doctest::Approx(3.5).epsilon(1e-15));

  GridSpec single;
  single.lo = {-1.0, 0.0, 0.0};
  single.hi = {1.0, 1.0, 1.0};
  single.bins = {1, 1, 1};
  CHECK(voxel_center({0, 0, 0}, single)[0] == 0.0);

  CHECK_THROWS_AS(voxel_center({10, 0, 0}, g), std::out_of_range);
}

TEST_CASE("center consistency: voxelize(voxel_center(idx)) == idx for every voxel") {
  GridSpec g;
  g.lo = {0.0, -kPi, -2.5};
  g.hi = {7.3, kPi, 1.5};
  g.bins = {11, 24, 7};
  g.periodic_theta = true;
  for (std::int64_t lin = 0; lin < g.voxel_count(); ++lin) {
    const VoxelIndex idx = index_at(lin, g);
    CHECK(voxelize(voxel_center(idx, g), g) == std::optional<VoxelIndex>(idx));
  }
}

TEST_CASE("linear_index and index_at are inverse") {
  const GridSpec g = simple_grid();
  for (std::int64_t lin = 0; lin < g.voxel_count(); lin += 37)
    CHECK(linear_index(index_at(lin, g), g) == lin);
  CHECK_THROWS_AS(linear_index({0, 0, 10}, g), std::out_of_range);
}

namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double span = 12.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-span / 4.0, span);
  std::uniform_real_distribution<float> in(0.0f, 1.0f);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PointXYZI p;
    p.x = static_cast<float>(c(rng));
    p.y = static_cast<float>(c(rng));
    p.z = static_cast<float>(c(rng));
    p.intensity = in(rng);
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace

TEST_CASE("aggregate: one point at a voxel center has zero offset channels") {
  const GridSpec g = simple_grid();
  PointCloud cloud;
  cloud.points.push_back({3.5f, 4.5f, 5.5f, 0.25f});
  const FeatureGrid grid =
      aggregate(cloud, ViewSpec{}, g, static_cast<FeatureMask>(Feature::mean_offset));
  const auto f = grid.features(VoxelIndex{3, 4, 5});
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 0.0);
  CHECK(grid.occupancy(linear_index({3, 4, 5}, g)) == 1);
}

TEST_CASE("aggregate: empty cloud gives an all-zero grid") {
  const FeatureGrid grid = aggregate(PointCloud{}, ViewSpec{}, simple_grid(), kAllFeatures);
  CHECK(grid.total_occupancy() == 0);
  CHECK(grid.out_of_range() == 0);
  for (const double v : grid.value_data()) CHECK(v == 0.0);
}

TEST_CASE("aggregate: count channel matches a brute-force tally") {
  const GridSpec g = simple_grid();
  const PointCloud cloud = random_cloud(100, 23);
  const FeatureGrid grid =
      aggregate(cloud, ViewSpec{}, g, static_cast<FeatureMask>(Feature::count));

  std::vector<std::uint32_t> tally(static_cast<std::size_t>(g.voxel_count()), 0);
  std::size_t outside = 0;
  for (const PointXYZI& p : cloud.points) {
    bool in = true;
    std::array<std::int64_t, 3> idx{};
    const std::array<double, 3> v{p.x, p.y, p.z};
    for (int a = 0; a < 3; ++a) {
      if (v[a] < g.lo[a] || v[a] >= g.hi[a]) {
        in = false;
        break;
      }
      idx[a] = static_cast<std::int64_t>((v[a] - g.lo[a]) / g.pitch(a));
    }
    if (in)
      ++tally[static_cast<std::size_t>((idx[0] * g.bins[1] + idx[1]) * g.bins[2] + idx[2])];
    else
      ++outside;
  }
  for (std::int64_t lin = 0; lin < g.voxel_count(); ++lin) {
    CHECK(grid.occupancy(lin) == tally[static_cast<std::size_t>(lin)]);
    CHECK(grid.features(lin)[0] ==
          std::log1p(static_cast<double>(tally[static_cast<std::size_t>(lin)])));
  }
  CHECK(grid.out_of_range() == outside);
}

TEST_CASE("aggregate: a cloud entirely out of range gives an all-empty grid") {
  PointCloud cloud;
  for (int i = 0; i < 50; ++i)
    cloud.points.push_back({-5.0f - i, 100.0f, 100.0f, 0.5f});
  const FeatureGrid grid = aggregate(cloud, ViewSpec{}, simple_grid(), kAllFeatures);
  CHECK(grid.total_occupancy() == 0);
  CHECK(grid.out_of_range() == 50);
  for (const double v : grid.value_data()) CHECK(v == 0.0);
}

TEST_CASE("aggregate conservation: occupancy plus out_of_range equals N") {
  const PointCloud cloud = random_cloud(5000, 29, 20.0);
  for (const ViewKind kind : {ViewKind::cartesian, ViewKind::spherical, ViewKind::cylindrical}) {
    GridSpec g;
    if (kind == ViewKind::cartesian) {
      g = simple_grid();
    } else {
      g.lo = {0.0, -kPi, kind == ViewKind::spherical ? 0.0 : -5.0};
      g.hi = {15.0, kPi, kind == ViewKind::spherical ? kPi : 5.0};
      g.bins = {15, 60, 18};
      g.periodic_theta = true;
    }
    const ViewSpec view{kind, kind == ViewKind::cartesian ? Point3{} : Point3{2.0, -1.0, 0.5}};
    const FeatureGrid grid = aggregate(cloud, view, g, kAllFeatures);
    CHECK(grid.total_occupancy() + grid.out_of_range() == cloud.size());
  }
}

TEST_CASE("aggregate is identical under any permutation of the input") {
  PointCloud cloud = random_cloud(2000, 31);
  const ViewSpec view{ViewKind::spherical, {1.0, 2.0, 0.0}};
  GridSpec g;
  g.lo = {0.0, -kPi, 0.0};
  g.hi = {25.0, kPi, kPi};
  g.bins = {25, 72, 36};
  const FeatureGrid a = aggregate(cloud, view, g, kAllFeatures);

  std::mt19937_64 rng(37);
  std::shuffle(cloud.points.begin(), cloud.points.end(), rng);
  const FeatureGrid b = aggregate(cloud, view, g, kAllFeatures);
  CHECK(a == b);
}

TEST_CASE("aggregate is identical for any worker count") {
  const PointCloud cloud = random_cloud(3000, 41);
  const ViewSpec view{ViewKind::cylindrical, {0.5, -0.5, 0.0}};
  GridSpec g;
  g.lo = {0.0, -kPi, -5.0};
  g.hi = {25.0, kPi, 5.0};
  g.bins = {25, 90, 10};
  g.periodic_theta = true;
  const FeatureGrid serial = aggregate(cloud, view, g, kAllFeatures, 1);
  for (const int workers : {2, 3, 8}) {
    CHECK(serial == aggregate(cloud, view, g, kAllFeatures, workers));
  }
}

TEST_CASE("feature masks map to channel layouts") {
  CHECK(channel_count(kAllFeatures) == 6);
  CHECK(channel_count(static_cast<FeatureMask>(Feature::count)) == 1);
  const auto names = channel_names(kAllFeatures);
  REQUIRE(names.size() == 6);
  CHECK(names[0] == "count");
  CHECK(names[3] == "mean_offset_0");
}
