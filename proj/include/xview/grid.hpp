#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xview/cloud.hpp"
#include "xview/geometry.hpp"

namespace xview {

// Axis order is (x, y, z) for cartesian grids and (r, theta, phi) for perspective
// grids; the azimuth sits on axis 1 either way.
inline constexpr int kThetaAxis = 1;

/// Per-axis half-open extents [lo, hi) with uniform bins. periodic_theta wraps the
/// azimuth axis and is only valid when that axis spans exactly 2*pi.
struct GridSpec {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
  std::array<std::int32_t, 3> bins{1, 1, 1};
  bool periodic_theta = false;

  double pitch(int axis) const { return (hi[axis] - lo[axis]) / bins[axis]; }
  std::int64_t voxel_count() const { return std::int64_t{bins[0]} * bins[1] * bins[2]; }
  void validate() const;  // throws std::invalid_argument
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct VoxelIndex {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;
  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
};

std::int64_t linear_index(const VoxelIndex& idx, const GridSpec& g);  // checked
VoxelIndex index_at(std::int64_t linear, const GridSpec& g);

/// Wraps the theta component into [lo, hi) when the grid is periodic; all other
/// components pass through untouched.
std::array<double, 3> wrap_values(const std::array<double, 3>& values, const GridSpec& g);

/// Half-open binning: in range iff lo <= v < hi on every axis (after the periodic
/// wrap). Out-of-range is a normal outcome, not an error.
std::optional<VoxelIndex> voxelize(const std::array<double, 3>& values, const GridSpec& g);
std::optional<VoxelIndex> voxelize(const ViewCoord& c, const GridSpec& g);

std::array<double, 3> voxel_center(const VoxelIndex& idx, const GridSpec& g);

enum class Feature : unsigned {
  count = 1u << 0,           // log1p of the member-point count
  mean_intensity = 1u << 1,
  max_intensity = 1u << 2,
  mean_offset = 1u << 3,     // mean member offset from the voxel center (3 channels)
};

using FeatureMask = unsigned;

inline constexpr FeatureMask kAllFeatures =
    static_cast<FeatureMask>(Feature::count) |
    static_cast<FeatureMask>(Feature::mean_intensity) |
    static_cast<FeatureMask>(Feature::max_intensity) |
    static_cast<FeatureMask>(Feature::mean_offset);

bool has_feature(FeatureMask mask, Feature f);
int channel_count(FeatureMask mask);
std::vector<std::string> channel_names(FeatureMask mask);

/// Dense per-voxel feature store, voxel-major with the channel index innermost.
/// Empty voxels hold all-zero features and occupancy 0.
class FeatureGrid {
 public:
  FeatureGrid() = default;
  FeatureGrid(const GridSpec& spec, int channels);

  const GridSpec& spec() const { return spec_; }
  int channels() const { return channels_; }
  std::int64_t voxel_count() const { return static_cast<std::int64_t>(occupancy_.size()); }
  bool empty() const { return occupancy_.empty(); }

  std::int64_t linear(const VoxelIndex& idx) const { return linear_index(idx, spec_); }
  VoxelIndex index(std::int64_t lin) const { return index_at(lin, spec_); }

  std::span<double> features(std::int64_t lin);
  std::span<const double> features(std::int64_t lin) const;
  std::span<double> features(const VoxelIndex& idx) { return features(linear(idx)); }
  std::span<const double> features(const VoxelIndex& idx) const { return features(linear(idx)); }

  std::uint32_t occupancy(std::int64_t lin) const;
  void set_occupancy(std::int64_t lin, std::uint32_t n);
  std::uint64_t total_occupancy() const;

  /// Points that fell outside the grid during aggregation (0 for derived grids).
  std::uint64_t out_of_range() const { return out_of_range_; }
  void set_out_of_range(std::uint64_t n) { out_of_range_ = n; }

  std::span<const double> value_data() const { return values_; }
  std::span<double> value_data() { return values_; }
  std::span<const std::uint32_t> occupancy_data() const { return occupancy_; }
  std::span<std::uint32_t> occupancy_data() { return occupancy_; }

  /// Bit-exact comparison of the stored values (plus spec/occupancy equality).
  friend bool operator==(const FeatureGrid& a, const FeatureGrid& b);

 private:
  std::int64_t checked(std::int64_t lin) const;

  GridSpec spec_{};
  int channels_ = 0;
  std::vector<double> values_;
  std::vector<std::uint32_t> occupancy_;
  std::uint64_t out_of_range_ = 0;
};

/// Bins a cloud in the view's frame and reduces handcrafted per-voxel features.
/// Deterministic for any point order and worker count: members of each voxel are
/// reduced in a canonical order (sorted by voxel, then by coordinate value), so the
/// result is identical to a serial run.
FeatureGrid aggregate(const PointCloud& cloud, const ViewSpec& view, const GridSpec& grid,
                      FeatureMask features, int workers = 1);

}  // namespace xview
