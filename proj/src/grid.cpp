#include "xview/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "xview/parallel.hpp"

namespace xview {

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(lo[a]) || !std::isfinite(hi[a]))
      throw std::invalid_argument("grid: extent must be finite on axis " + std::to_string(a));
    if (!(lo[a] < hi[a]))
      throw std::invalid_argument("grid: lo >= hi on axis " + std::to_string(a));
    if (bins[a] < 1)
      throw std::invalid_argument("grid: bins must be >= 1 on axis " + std::to_string(a));
  }
  if (periodic_theta) {
    const double span = hi[kThetaAxis] - lo[kThetaAxis];
    if (std::abs(span - 2.0 * std::numbers::pi) > 1e-12)
      throw std::invalid_argument("grid: periodic_theta requires the theta axis to span 2*pi");
  }
}

std::int64_t linear_index(const VoxelIndex& idx, const GridSpec& g) {
  if (idx.i < 0 || idx.i >= g.bins[0] || idx.j < 0 || idx.j >= g.bins[1] || idx.k < 0 ||
      idx.k >= g.bins[2])
    throw std::out_of_range("voxel index out of range");
  return (idx.i * g.bins[1] + idx.j) * g.bins[2] + idx.k;
}

VoxelIndex index_at(std::int64_t linear, const GridSpec& g) {
  if (linear < 0 || linear >= g.voxel_count())
    throw std::out_of_range("linear voxel index out of range");
  VoxelIndex idx;
  idx.k = linear % g.bins[2];
  linear /= g.bins[2];
  idx.j = linear % g.bins[1];
  idx.i = linear / g.bins[1];
  return idx;
}

std::array<double, 3> wrap_values(const std::array<double, 3>& values, const GridSpec& g) {
  auto out = values;
  if (g.periodic_theta) {
    const double lo = g.lo[kThetaAxis];
    const double hi = g.hi[kThetaAxis];
    const double span = hi - lo;
    double w = std::fmod(out[kThetaAxis] - lo, span);
    if (w < 0.0) w += span;
    double v = lo + w;
    if (v >= hi) v = lo;  // rounding guard: keep the wrapped value inside [lo, hi)
    out[kThetaAxis] = v;
  }
  return out;
}

std::optional<VoxelIndex> voxelize(const std::array<double, 3>& values, const GridSpec& g) {
  const auto v = wrap_values(values, g);
  std::array<std::int64_t, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    // NaN fails the range test, so non-finite values land out of range.
    if (!(v[a] >= g.lo[a] && v[a] < g.hi[a])) return std::nullopt;
    auto i = static_cast<std::int64_t>(std::floor((v[a] - g.lo[a]) / g.pitch(a)));
    idx[a] = std::clamp<std::int64_t>(i, 0, g.bins[a] - 1);
  }
  return VoxelIndex{idx[0], idx[1], idx[2]};
}

std::optional<VoxelIndex> voxelize(const ViewCoord& c, const GridSpec& g) {
  return voxelize(c.values(), g);
}

std::array<double, 3> voxel_center(const VoxelIndex& idx, const GridSpec& g) {
  if (idx.i < 0 || idx.i >= g.bins[0] || idx.j < 0 || idx.j >= g.bins[1] || idx.k < 0 ||
      idx.k >= g.bins[2])
    throw std::out_of_range("voxel_center: index out of range");
  return {g.lo[0] + (static_cast<double>(idx.i) + 0.5) * g.pitch(0),
          g.lo[1] + (static_cast<double>(idx.j) + 0.5) * g.pitch(1),
          g.lo[2] + (static_cast<double>(idx.k) + 0.5) * g.pitch(2)};
}

bool has_feature(FeatureMask mask, Feature f) {
  return (mask & static_cast<FeatureMask>(f)) != 0;
}

int channel_count(FeatureMask mask) {
  int c = 0;
  if (has_feature(mask, Feature::count)) c += 1;
  if (has_feature(mask, Feature::mean_intensity)) c += 1;
  if (has_feature(mask, Feature::max_intensity)) c += 1;
  if (has_feature(mask, Feature::mean_offset)) c += 3;
  return c;
}

std::vector<std::string> channel_names(FeatureMask mask) {
  std::vector<std::string> names;
  if (has_feature(mask, Feature::count)) names.push_back("count");
  if (has_feature(mask, Feature::mean_intensity)) names.push_back("mean_intensity");
  if (has_feature(mask, Feature::max_intensity)) names.push_back("max_intensity");
  if (has_feature(mask, Feature::mean_offset)) {
    names.push_back("mean_offset_0");
    names.push_back("mean_offset_1");
    names.push_back("mean_offset_2");
  }
  return names;
}

FeatureGrid::FeatureGrid(const GridSpec& spec, int channels) : spec_(spec), channels_(channels) {
  spec_.validate();
  if (channels < 1) throw std::invalid_argument("FeatureGrid: channels must be >= 1");
  const std::int64_t nvox = spec_.voxel_count();
  values_.assign(static_cast<std::size_t>(nvox) * static_cast<std::size_t>(channels), 0.0);
  occupancy_.assign(static_cast<std::size_t>(nvox), 0u);
}

std::int64_t FeatureGrid::checked(std::int64_t lin) const {
  if (lin < 0 || lin >= voxel_count()) throw std::out_of_range("FeatureGrid: voxel out of range");
  return lin;
}

std::span<double> FeatureGrid::features(std::int64_t lin) {
  checked(lin);
  return {values_.data() + static_cast<std::size_t>(lin) * channels_,
          static_cast<std::size_t>(channels_)};
}

std::span<const double> FeatureGrid::features(std::int64_t lin) const {
  checked(lin);
  return {values_.data() + static_cast<std::size_t>(lin) * channels_,
          static_cast<std::size_t>(channels_)};
}

std::uint32_t FeatureGrid::occupancy(std::int64_t lin) const {
  return occupancy_[static_cast<std::size_t>(checked(lin))];
}

void FeatureGrid::set_occupancy(std::int64_t lin, std::uint32_t n) {
  occupancy_[static_cast<std::size_t>(checked(lin))] = n;
}

std::uint64_t FeatureGrid::total_occupancy() const {
  std::uint64_t total = 0;
  for (const std::uint32_t n : occupancy_) total += n;
  return total;
}

bool operator==(const FeatureGrid& a, const FeatureGrid& b) {
  if (!(a.spec_ == b.spec_) || a.channels_ != b.channels_ ||
      a.out_of_range_ != b.out_of_range_ || a.occupancy_ != b.occupancy_ ||
      a.values_.size() != b.values_.size())
    return false;
  if (a.values_.empty()) return true;
  return std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(double)) == 0;
}

namespace {

struct Sample {
  std::int64_t cell = -1;  // -1: out of range
  std::array<double, 3> value{};  // wrapped axis values; binning and offsets use these
  float intensity = 0.0f;
};

// Canonical reduction order: by voxel, then by coordinate value, then by intensity.
// Equal keys carry equal contributions, so the reduced features do not depend on the
// input point order at all.
bool sample_less(const Sample& a, const Sample& b) {
  if (a.cell != b.cell) return a.cell < b.cell;
  if (a.value[0] != b.value[0]) return a.value[0] < b.value[0];
  if (a.value[1] != b.value[1]) return a.value[1] < b.value[1];
  if (a.value[2] != b.value[2]) return a.value[2] < b.value[2];
  return a.intensity < b.intensity;
}

}  // namespace

FeatureGrid aggregate(const PointCloud& cloud, const ViewSpec& view, const GridSpec& grid,
                      FeatureMask features, int workers) {
  view.validate();
  grid.validate();
  if (channel_count(features) == 0)
    throw std::invalid_argument("aggregate: feature set selects no channels");

  FeatureGrid out(grid, channel_count(features));
  const auto n = static_cast<std::int64_t>(cloud.size());

  std::vector<Sample> samples(cloud.size());
  parallel_for(0, n, workers, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const PointXYZI& pt = cloud.points[static_cast<std::size_t>(i)];
      Sample s;
      s.intensity = pt.intensity;
      s.value = wrap_values(view_values(position(pt), view), grid);
      if (const auto idx = voxelize(s.value, grid)) s.cell = linear_index(*idx, grid);
      samples[static_cast<std::size_t>(i)] = s;
    }
  });
  std::sort(samples.begin(), samples.end(), sample_less);

  const bool want_count = has_feature(features, Feature::count);
  const bool want_mean_int = has_feature(features, Feature::mean_intensity);
  const bool want_max_int = has_feature(features, Feature::max_intensity);
  const bool want_offset = has_feature(features, Feature::mean_offset);

  std::size_t i = 0;
  std::uint64_t dropped = 0;
  while (i < samples.size() && samples[i].cell < 0) {
    ++i;
    ++dropped;
  }
  while (i < samples.size()) {
    const std::int64_t cell = samples[i].cell;
    const auto center = voxel_center(index_at(cell, grid), grid);
    std::uint64_t count = 0;
    double sum_intensity = 0.0;
    float max_intensity = 0.0f;
    std::array<double, 3> sum_offset{0.0, 0.0, 0.0};
    std::size_t j = i;
    for (; j < samples.size() && samples[j].cell == cell; ++j) {
      const Sample& s = samples[j];
      ++count;
      sum_intensity += s.intensity;
      max_intensity = std::max(max_intensity, s.intensity);
      for (int a = 0; a < 3; ++a) sum_offset[a] += s.value[a] - center[a];
    }
    auto f = out.features(cell);
    int c = 0;
    if (want_count) f[c++] = std::log1p(static_cast<double>(count));
    if (want_mean_int) f[c++] = sum_intensity / static_cast<double>(count);
    if (want_max_int) f[c++] = max_intensity;
    if (want_offset)
      for (int a = 0; a < 3; ++a) f[c++] = sum_offset[a] / static_cast<double>(count);
    out.set_occupancy(cell, static_cast<std::uint32_t>(count));
    i = j;
  }
  out.set_out_of_range(dropped);
  return out;
}

}  // namespace xview
