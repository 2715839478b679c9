#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xview/cloud.hpp"
#include "xview/fusion.hpp"
#include "xview/scene.hpp"

namespace xview {

// Occupied-voxel statistics per view, bucketed by the ego distance (Euclidean norm of
// the voxel center's Cartesian position) in fixed-width bins.
struct DensityRow {
  std::string view;
  double bin_lo = 0.0;
  std::uint64_t occupied = 0;
  double mean_pts = 0.0;
  double cv = 0.0;        // sample std over mean of points-per-occupied-voxel
  bool cv_defined = false;  // needs >= 2 occupied voxels in the bin
};

struct DensityReport {
  std::vector<DensityRow> rows;  // view-major (bev first), bin ascending
  double bin_width = 2.0;
};

inline constexpr double kDensityBinWidth = 2.0;
inline constexpr double kDensityMaxDistance = 80.0;

DensityReport density_report(const PointCloud& cloud, const ViewSetConfig& cfg,
                             double bin_width = kDensityBinWidth,
                             double max_distance = kDensityMaxDistance);
std::string density_csv(const DensityReport& report);

// Distinct occupied voxels attributed to each obstacle box, per view.
struct CoverageRow {
  std::int32_t box = 0;
  std::string view;
  std::uint64_t voxels = 0;
  std::uint64_t points = 0;  // points the box produced (voxels <= points)
};

struct CoverageReport {
  std::vector<CoverageRow> rows;  // box-major, view order as configured
};

CoverageReport coverage_report(const SynthCloud& synth, const SceneSpec& scene,
                               const ViewSetConfig& cfg);
std::string coverage_csv(const CoverageReport& report);

struct StageTime {
  std::string stage;
  double seconds = 0.0;
};

struct ViewStageInfo {
  std::string name;
  std::uint64_t occupied_voxels = 0;
  std::uint64_t points_binned = 0;
  std::uint64_t out_of_range = 0;
};

struct FusePipelineResult {
  FusedGrid fused;
  std::vector<StageTime> timings;      // aggregate:<view>..., fuse, total
  std::vector<ViewStageInfo> views;
};

/// Full pipeline: transform + aggregate each configured view, then fuse onto the BEV
/// grid. With workers > 1 the per-view aggregations run as independent parallel tasks
/// and the fusion shards voxels; the result is identical to the serial run.
FusePipelineResult run_fuse_pipeline(const PointCloud& cloud, const ViewSetConfig& cfg,
                                     int workers);

/// Locale-independent shortest round-trip formatting (used for all CSV output).
std::string format_double(double v);

}  // namespace xview
