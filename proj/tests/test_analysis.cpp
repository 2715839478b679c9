#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "xview/analysis.hpp"
#include "xview/config.hpp"

using namespace xview;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

ViewSetConfig desk_config() {
  ViewSetConfig cfg;
  cfg.bev.name = "bev";
  cfg.bev.grid.lo = {0.0, -40.0, -3.0};
  cfg.bev.grid.hi = {70.4, 40.0, 1.0};
  cfg.bev.grid.bins = {176, 200, 10};
  cfg.bev.features = kAllFeatures;

  ViewEntry ego;
  ego.name = "pv_ego";
  ego.view = {ViewKind::spherical, {0.0, 0.0, 0.0}};
  ego.grid.lo = {0.0, -42.3 * kDeg, 60.3 * kDeg};
  ego.grid.hi = {80.0, 41.7 * kDeg, 120.3 * kDeg};
  ego.grid.bins = {160, 84, 60};
  ego.features = static_cast<FeatureMask>(Feature::count);
  cfg.pvs.push_back(ego);

  ViewEntry far;
  far.name = "pv_far";
  far.view = {ViewKind::spherical, {60.0, 0.0, 0.0}};
  far.grid.lo = {0.0, -kPi, 0.0};
  far.grid.hi = {80.0, kPi, kPi};
  far.grid.bins = {160, 360, 90};
  far.grid.periodic_theta = true;
  far.features = static_cast<FeatureMask>(Feature::count);
  cfg.pvs.push_back(far);
  return cfg;
}

SceneSpec frustum_scene() {
  SceneSpec s;
  s.sensor_origin = {0.0, 0.0, 1.73};
  s.ground_z = 0.0;
  s.azimuth_start = -40.0 * kDeg;
  s.azimuth_span = 80.0 * kDeg;
  s.azimuth_count = 500;
  for (int k = 0; k < 32; ++k) s.elevations.push_back((-20.0 + 0.65 * k) * kDeg);
  s.boxes.push_back({{30.0, 0.0, 0.8}, 4.0, 4.0, 1.6, 0.0});
  return s;
}

}  // namespace

TEST_CASE("density_report: a single point occupies one voxel in every view") {
  PointCloud cloud;
  cloud.points.push_back({30.0f, 2.0f, -1.0f, 0.5f});
  const ViewSetConfig cfg = desk_config();
  const DensityReport report = density_report(cloud, cfg);
  REQUIRE(report.rows.size() == 3);  // one populated bin per view
  for (const DensityRow& row : report.rows) {
    CHECK(row.occupied == 1);
    CHECK(row.mean_pts == 1.0);
    CHECK_FALSE(row.cv_defined);
    if (row.view != "pv_far") CHECK(row.bin_lo == 30.0);
  }
}

TEST_CASE("density_report: empty cloud yields an empty report") {
  const DensityReport report = density_report(PointCloud{}, desk_config());
  CHECK(report.rows.empty());
  CHECK(density_csv(report) == "view,bin_lo,occupied,mean_pts,cv\n");
}

TEST_CASE("density CSV: fixed header, one row per populated bin, plain decimals") {
  const SynthCloud synth = synth_scene(frustum_scene(), 3);
  const DensityReport report = density_report(synth.cloud, desk_config());
  const std::string csv = density_csv(report);

  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "view,bin_lo,occupied,mean_pts,cv");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.find(' ') == std::string::npos);
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == report.rows.size());
  CHECK(rows > 10);
}

TEST_CASE("density_report: ego perspective view is more even than BEV on a ground scene") {
  SceneSpec scene = frustum_scene();
  scene.boxes.clear();
  const SynthCloud synth = synth_scene(scene, 5);
  const DensityReport report = density_report(synth.cloud, desk_config());

  // compare CVs where both views define them
  std::size_t compared = 0;
  for (const DensityRow& bev_row : report.rows) {
    if (bev_row.view != "bev" || !bev_row.cv_defined) continue;
    for (const DensityRow& pv_row : report.rows) {
      if (pv_row.view != "pv_ego" || pv_row.bin_lo != bev_row.bin_lo || !pv_row.cv_defined)
        continue;
      if (bev_row.bin_lo < 10.0 || bev_row.bin_lo >= 60.0) continue;
      ++compared;
      CHECK(pv_row.cv < bev_row.cv);
    }
  }
  CHECK(compared >= 5);
}

TEST_CASE("coverage_report: boxes outside a view's grid count zero voxels there") {
  SceneSpec scene = frustum_scene();
  const SynthCloud synth = synth_scene(scene, 7);

  ViewSetConfig cfg = desk_config();
  cfg.pvs[1].grid.lo = {0.0, -10.0 * kDeg, 80.0 * kDeg};
  cfg.pvs[1].grid.hi = {5.0, 10.0 * kDeg, 100.0 * kDeg};  // r < 5 m: box at 30 m is outside
  cfg.pvs[1].grid.bins = {10, 20, 20};
  cfg.pvs[1].grid.periodic_theta = false;
  cfg.pvs[1].view.origin = {0.0, 0.0, 0.0};

  const CoverageReport report = coverage_report(synth, scene, cfg);
  REQUIRE(report.rows.size() == 3);  // one box, three views
  for (const CoverageRow& row : report.rows) {
    CHECK(row.box == 0);
    CHECK(row.voxels <= row.points);
    if (row.view == "pv_far") CHECK(row.voxels == 0);
    if (row.view == "bev") CHECK(row.voxels > 0);
  }
  const std::string csv = coverage_csv(report);
  CHECK(csv.rfind("box,view,voxels,points\n", 0) == 0);
}

TEST_CASE("coverage counts are stable under azimuth seed changes (4 m box)") {
  SceneSpec scene = frustum_scene();
  scene.boxes.clear();
  scene.boxes.push_back({{30.0, 0.0, 2.0}, 4.0, 4.0, 4.0, 0.0});
  scene.azimuth_count = 900;

  const ViewSetConfig cfg = desk_config();
  std::vector<double> ego_counts;
  for (const std::uint64_t seed : {1ull, 2ull}) {
    const SynthCloud synth = synth_scene(scene, seed);
    const CoverageReport report = coverage_report(synth, scene, cfg);
    for (const CoverageRow& row : report.rows)
      if (row.view == "pv_ego") ego_counts.push_back(static_cast<double>(row.voxels));
  }
  REQUIRE(ego_counts.size() == 2);
  CHECK(std::abs(ego_counts[0] - ego_counts[1]) <= 0.10 * ego_counts[0]);
}

TEST_CASE("run_fuse_pipeline: serial and parallel agree bit-for-bit") {
  const SynthCloud synth = synth_scene(frustum_scene(), 11);
  const ViewSetConfig cfg = desk_config();
  const FusePipelineResult serial = run_fuse_pipeline(synth.cloud, cfg, 1);
  const FusePipelineResult parallel = run_fuse_pipeline(synth.cloud, cfg, 4);
  CHECK(serial.fused.grid == parallel.fused.grid);
  CHECK(serial.fused.provenance == parallel.fused.provenance);
  CHECK(serial.fused.grid.channels() == cfg.fused_channels());
  // timings cover every stage
  REQUIRE(serial.timings.size() == 5);  // 3 aggregates + fuse + total
  CHECK(serial.timings.back().stage == "total");
  REQUIRE(serial.views.size() == 3);
  CHECK(serial.views[0].name == "bev");
}

TEST_CASE("format_double is locale-independent and round-trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-3.0) == "-3");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
