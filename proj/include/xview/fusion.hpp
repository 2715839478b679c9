#pragma once

#include <span>
#include <string>
#include <vector>

#include "xview/cloud.hpp"
#include "xview/geometry.hpp"
#include "xview/grid.hpp"

namespace xview {

enum class FuseMode { concat, add };

const char* to_string(FuseMode mode);
FuseMode parse_fuse_mode(const std::string& name);

/// One configured view stream: name + frame + voxel grid + the features its stream
/// aggregates.
struct ViewEntry {
  std::string name;
  ViewSpec view;
  GridSpec grid;
  FeatureMask features = kAllFeatures;

  int channels() const { return channel_count(features); }
  friend bool operator==(const ViewEntry&, const ViewEntry&) = default;
};

/// One BEV stream plus K >= 1 perspective streams, fused onto the BEV grid.
struct ViewSetConfig {
  ViewEntry bev;
  std::vector<ViewEntry> pvs;
  FuseMode fuse_mode = FuseMode::concat;

  int fused_channels() const;
  void validate() const;  // throws ConfigError
  friend bool operator==(const ViewSetConfig&, const ViewSetConfig&) = default;
};

struct ChannelBlock {
  std::string view;
  int begin = 0;
  int count = 0;
  friend bool operator==(const ChannelBlock&, const ChannelBlock&) = default;
};

struct FusedGrid {
  FeatureGrid grid;                      // lives on the BEV GridSpec
  std::vector<ChannelBlock> provenance;  // which view filled which channel block
};

/// Trilinear lookup over the voxel-center lattice. Returns true when q lies inside the
/// grid extent (the interpolation support); otherwise writes zeros to `out` and returns
/// false. Queries between the extent edge and the outermost centers clamp per axis; a
/// periodic theta axis wraps across the seam instead. Total: never throws for finite or
/// non-finite q (non-finite queries are out of support).
bool interpolate(const FeatureGrid& g, const std::array<double, 3>& q, std::span<double> out);
bool interpolate(const FeatureGrid& g, const ViewCoord& q, std::span<double> out);
std::vector<double> interpolate(const FeatureGrid& g, const ViewCoord& q,
                                bool* out_of_support = nullptr);

/// BEV-dominant fusion: project every BEV voxel center into each perspective view,
/// interpolate the PV grids there and append (or add) the results, one pass, no
/// point-level intermediate. In concat mode the BEV channels are copied bit-identically.
/// Sharding over workers does not change the output.
FusedGrid bdli_fuse(const FeatureGrid& bev, const ViewSetConfig& cfg,
                    const std::vector<FeatureGrid>& pv_grids, int workers = 1);

/// Two-pass voxel->point->voxel fusion: interpolate every view at each raw point, then
/// mean-pool the point features back into BEV voxels. Kept as a comparison baseline;
/// the pooling discards per-point offsets inside a voxel.
FusedGrid mvf_fuse(const FeatureGrid& bev, const ViewSetConfig& cfg,
                   const std::vector<FeatureGrid>& pv_grids, const PointCloud& points);

}  // namespace xview
