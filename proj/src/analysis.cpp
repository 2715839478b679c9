#include "xview/analysis.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "xview/errors.hpp"
#include "xview/grid.hpp"
#include "xview/parallel.hpp"

namespace xview {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<const ViewEntry*> all_views(const ViewSetConfig& cfg) {
  std::vector<const ViewEntry*> views;
  views.push_back(&cfg.bev);
  for (const ViewEntry& pv : cfg.pvs) views.push_back(&pv);
  return views;
}

// Sparse per-voxel point tally; keeps fine angular grids affordable.
std::unordered_map<std::int64_t, std::uint32_t> occupancy_tally(const PointCloud& cloud,
                                                                const ViewEntry& e) {
  std::unordered_map<std::int64_t, std::uint32_t> tally;
  for (const PointXYZI& pt : cloud.points) {
    if (const auto idx = voxelize(view_values(position(pt), e.view), e.grid))
      ++tally[linear_index(*idx, e.grid)];
  }
  return tally;
}

struct BinAccum {
  std::uint64_t voxels = 0;
  std::uint64_t sum = 0;
  std::uint64_t sumsq = 0;
};

// Sample coefficient of variation from exact integer sums; order-independent.
void finish_row(DensityRow& row, const BinAccum& acc) {
  row.occupied = acc.voxels;
  row.mean_pts = static_cast<double>(acc.sum) / static_cast<double>(acc.voxels);
  if (acc.voxels >= 2) {
    const unsigned __int128 m = acc.voxels;
    const unsigned __int128 num =
        m * static_cast<unsigned __int128>(acc.sumsq) -
        static_cast<unsigned __int128>(acc.sum) * static_cast<unsigned __int128>(acc.sum);
    const double var = static_cast<double>(num) /
                       (static_cast<double>(acc.voxels) * static_cast<double>(acc.voxels - 1));
    row.cv = std::sqrt(var) / row.mean_pts;
    row.cv_defined = true;
  }
}

}  // namespace

DensityReport density_report(const PointCloud& cloud, const ViewSetConfig& cfg,
                             double bin_width, double max_distance) {
  cfg.validate();
  if (!(bin_width > 0.0) || !(max_distance > 0.0))
    throw std::invalid_argument("density_report: bin width and max distance must be positive");

  DensityReport report;
  report.bin_width = bin_width;
  const auto nbins = static_cast<std::size_t>(std::ceil(max_distance / bin_width));

  for (const ViewEntry* e : all_views(cfg)) {
    const auto tally = occupancy_tally(cloud, *e);
    std::vector<BinAccum> bins(nbins);
    for (const auto& [lin, count] : tally) {
      const auto center = voxel_center(index_at(lin, e->grid), e->grid);
      const double dist = norm(view_point(center, e->view));
      if (!(dist >= 0.0) || dist >= max_distance) continue;
      auto& acc = bins[static_cast<std::size_t>(dist / bin_width)];
      ++acc.voxels;
      acc.sum += count;
      acc.sumsq += static_cast<std::uint64_t>(count) * count;
    }
    for (std::size_t b = 0; b < nbins; ++b) {
      if (bins[b].voxels == 0) continue;
      DensityRow row;
      row.view = e->name;
      row.bin_lo = static_cast<double>(b) * bin_width;
      finish_row(row, bins[b]);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string density_csv(const DensityReport& report) {
  std::ostringstream out;
  out << "view,bin_lo,occupied,mean_pts,cv\n";
  for (const DensityRow& row : report.rows) {
    out << row.view << ',' << format_double(row.bin_lo) << ',' << row.occupied << ','
        << format_double(row.mean_pts) << ',';
    if (row.cv_defined) out << format_double(row.cv);
    out << '\n';
  }
  return out.str();
}

CoverageReport coverage_report(const SynthCloud& synth, const SceneSpec& scene,
                               const ViewSetConfig& cfg) {
  cfg.validate();
  scene.validate();
  if (synth.cloud.size() != synth.provenance.size())
    throw std::invalid_argument("coverage_report: provenance does not match the cloud");

  const auto views = all_views(cfg);
  CoverageReport report;
  for (std::size_t b = 0; b < scene.boxes.size(); ++b) {
    std::uint64_t box_points = 0;
    std::vector<std::unordered_set<std::int64_t>> occupied(views.size());
    for (std::size_t i = 0; i < synth.cloud.size(); ++i) {
      if (synth.provenance[i] != static_cast<std::int32_t>(b)) continue;
      ++box_points;
      const Point3 p = position(synth.cloud.points[i]);
      for (std::size_t v = 0; v < views.size(); ++v) {
        if (const auto idx = voxelize(view_values(p, views[v]->view), views[v]->grid))
          occupied[v].insert(linear_index(*idx, views[v]->grid));
      }
    }
    for (std::size_t v = 0; v < views.size(); ++v) {
      CoverageRow row;
      row.box = static_cast<std::int32_t>(b);
      row.view = views[v]->name;
      row.voxels = occupied[v].size();
      row.points = box_points;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string coverage_csv(const CoverageReport& report) {
  std::ostringstream out;
  out << "box,view,voxels,points\n";
  for (const CoverageRow& row : report.rows)
    out << row.box << ',' << row.view << ',' << row.voxels << ',' << row.points << '\n';
  return out.str();
}

FusePipelineResult run_fuse_pipeline(const PointCloud& cloud, const ViewSetConfig& cfg,
                                     int workers) {
  cfg.validate();
  workers = std::max(1, workers);

  FusePipelineResult result;
  const auto t_total = Clock::now();

  const auto views = all_views(cfg);
  FeatureGrid bev_grid;
  std::vector<FeatureGrid> pv_grids(cfg.pvs.size());
  std::vector<double> agg_seconds(views.size(), 0.0);

  auto aggregate_view = [&](std::size_t slot) {
    const ViewEntry& e = *views[slot];
    const auto t0 = Clock::now();
    FeatureGrid grid = aggregate(cloud, e.view, e.grid, e.features, 1);
    agg_seconds[slot] = seconds_since(t0);
    if (slot == 0)
      bev_grid = std::move(grid);
    else
      pv_grids[slot - 1] = std::move(grid);
  };

  if (workers > 1) {
    // one independent task per view stream
    std::vector<std::future<void>> tasks;
    tasks.reserve(views.size());
    for (std::size_t v = 0; v < views.size(); ++v)
      tasks.push_back(std::async(std::launch::async, aggregate_view, v));
    for (auto& t : tasks) t.get();
  } else {
    for (std::size_t v = 0; v < views.size(); ++v) aggregate_view(v);
  }

  for (std::size_t v = 0; v < views.size(); ++v) {
    result.timings.push_back({"aggregate:" + views[v]->name, agg_seconds[v]});
    const FeatureGrid& grid = v == 0 ? bev_grid : pv_grids[v - 1];
    std::uint64_t occupied = 0;
    for (const std::uint32_t n : grid.occupancy_data()) occupied += n > 0 ? 1 : 0;
    result.views.push_back({views[v]->name, occupied, grid.total_occupancy(),
                            grid.out_of_range()});
  }

  const auto t_fuse = Clock::now();
  result.fused = bdli_fuse(bev_grid, cfg, pv_grids, workers);
  result.timings.push_back({"fuse", seconds_since(t_fuse)});
  result.timings.push_back({"total", seconds_since(t_total)});
  return result;
}

}  // namespace xview
