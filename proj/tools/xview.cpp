// xview: multi-view LiDAR grid tooling.
//
// Subcommands: synth, stats, coverage, fuse, info.
// Exit codes: 0 success, 1 usage/format error, 2 invariant violation in a self-check.

#include <CLI11.hpp>

#include <numbers>
#include <fstream>
#include <iostream>
#include <string>

#include "xview/analysis.hpp"
#include "xview/config.hpp"
#include "xview/errors.hpp"
#include "xview/grid_io.hpp"
#include "xview/parallel.hpp"
#include "xview/scene.hpp"

namespace {

using namespace xview;

struct CommonOpts {
  std::string config_path;
  std::string input_path;
  std::string scene_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::string parallel = "auto";
  bool frustum = false;
  double frustum_h_deg = 40.5;
  double frustum_v_deg = 15.0;
};

int parse_parallel(const std::string& text) {
  if (text == "auto") return resolve_workers(0);
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("--parallel: expected a positive integer or \"auto\"");
  }
  if (used != text.size() || n < 1)
    throw ConfigError("--parallel: expected a positive integer or \"auto\"");
  return n;
}

PointCloud load_cloud(const CommonOpts& opts) {
  if (!opts.input_path.empty() && !opts.scene_path.empty())
    throw ConfigError("give either --input or --scene, not both");
  PointCloud cloud;
  if (!opts.input_path.empty())
    cloud = read_kitti_bin(opts.input_path);
  else if (!opts.scene_path.empty())
    cloud = synth_scene(read_scene(opts.scene_path), opts.seed).cloud;
  else
    throw ConfigError("an input cloud is required: --input <file.bin> or --scene <scene.json>");
  if (opts.frustum) {
    constexpr double deg = std::numbers::pi / 180.0;
    cloud = frustum_filter(cloud, opts.frustum_h_deg * deg, opts.frustum_v_deg * deg);
  }
  return cloud;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw FormatError("write failed for " + path);
}

int cmd_synth(const CommonOpts& opts, const std::string& provenance_path) {
  if (opts.scene_path.empty()) throw ConfigError("synth requires --scene");
  if (opts.out_path.empty()) throw ConfigError("synth requires --out");
  const SceneSpec scene = read_scene(opts.scene_path);
  const SynthCloud synth = synth_scene(scene, opts.seed);
  write_kitti_bin(opts.out_path, synth.cloud);
  if (!provenance_path.empty()) {
    std::string csv = "index,source\n";
    for (std::size_t i = 0; i < synth.provenance.size(); ++i)
      csv += std::to_string(i) + "," + std::to_string(synth.provenance[i]) + "\n";
    write_text(provenance_path, csv);
  }
  std::cerr << "synth: " << synth.cloud.size() << " points ("
            << static_cast<std::size_t>(scene.azimuth_count) * scene.elevations.size()
            << " rays) -> " << opts.out_path << "\n";
  return 0;
}

int cmd_stats(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw ConfigError("stats requires --config");
  const ViewSetConfig cfg = read_config(opts.config_path);
  const PointCloud cloud = load_cloud(opts);
  if (cloud.empty()) std::cerr << "warning: empty input cloud; emitting an empty report\n";
  const DensityReport report = density_report(cloud, cfg);
  write_text(opts.out_path, density_csv(report));
  return 0;
}

int cmd_coverage(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw ConfigError("coverage requires --config");
  if (!opts.input_path.empty())
    throw ConfigError("coverage needs per-point provenance; real clouds (--input) are not supported, use --scene");
  if (opts.scene_path.empty()) throw ConfigError("coverage requires --scene");
  const ViewSetConfig cfg = read_config(opts.config_path);
  const SceneSpec scene = read_scene(opts.scene_path);
  if (scene.boxes.empty()) throw ConfigError("coverage requires a scene with at least one box");
  const SynthCloud synth = synth_scene(scene, opts.seed);
  const CoverageReport report = coverage_report(synth, scene, cfg);
  write_text(opts.out_path, coverage_csv(report));
  return 0;
}

int cmd_fuse(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw ConfigError("fuse requires --config");
  if (opts.out_path.empty()) throw ConfigError("fuse requires --out");
  const ViewSetConfig cfg = read_config(opts.config_path);
  const PointCloud cloud = load_cloud(opts);
  const int workers = parse_parallel(opts.parallel);

  const FusePipelineResult serial = run_fuse_pipeline(cloud, cfg, 1);
  const FusePipelineResult parallel = run_fuse_pipeline(cloud, cfg, workers);

  for (const ViewStageInfo& v : serial.views) {
    if (v.points_binned + v.out_of_range != cloud.size())
      throw SelfCheckError("view \"" + v.name + "\": occupancy + out_of_range != point count");
  }
  if (!(serial.fused.grid == parallel.fused.grid))
    throw SelfCheckError("serial and parallel fused grids differ");

  GridMeta meta;
  meta.view_name = "fused";
  meta.view = cfg.bev.view;
  for (const ChannelBlock& block : serial.fused.provenance) {
    const ViewEntry* entry = nullptr;
    if (block.view == cfg.bev.name) entry = &cfg.bev;
    for (const ViewEntry& pv : cfg.pvs)
      if (pv.name == block.view) entry = &pv;
    if (entry && cfg.fuse_mode == FuseMode::concat) {
      for (const std::string& name : channel_names(entry->features))
        meta.channel_names.push_back(block.view + "/" + name);
    }
  }
  if (cfg.fuse_mode == FuseMode::add)
    for (const std::string& name : channel_names(cfg.bev.features))
      meta.channel_names.push_back("sum/" + name);
  meta.provenance = serial.fused.provenance;
  meta.config_json = serialize_config(cfg);
  write_grid(opts.out_path, parallel.fused.grid, meta);

  std::cout << "points: " << cloud.size() << "\n";
  std::cout << "workers: " << workers << "\n";
  std::cout << "stage,mode,seconds\n";
  for (const StageTime& t : serial.timings)
    std::cout << t.stage << ",serial," << format_double(t.seconds) << "\n";
  for (const StageTime& t : parallel.timings)
    std::cout << t.stage << ",parallel," << format_double(t.seconds) << "\n";
  for (const ViewStageInfo& v : serial.views)
    std::cout << "view " << v.name << ": occupied=" << v.occupied_voxels
              << " out_of_range=" << v.out_of_range << "\n";
  std::cout << "self-check: serial and parallel fused grids are bit-identical\n";
  std::cout << "wrote " << opts.out_path << " and " << sidecar_path(opts.out_path).string()
            << "\n";
  return 0;
}

int cmd_info(const CommonOpts& opts) {
  if (!opts.config_path.empty()) {
    const ViewSetConfig cfg = read_config(opts.config_path);
    std::cout << "config: " << opts.config_path << "\n";
    std::cout << "fuse_mode: " << to_string(cfg.fuse_mode) << "\n";
    auto describe = [](const ViewEntry& e) {
      std::cout << "  " << e.name << ": " << to_string(e.view.kind) << " origin ("
                << format_double(e.view.origin.x) << ", " << format_double(e.view.origin.y)
                << ", " << format_double(e.view.origin.z) << "), bins " << e.grid.bins[0] << "x"
                << e.grid.bins[1] << "x" << e.grid.bins[2]
                << (e.grid.periodic_theta ? " (periodic theta)" : "") << ", channels "
                << e.channels() << "\n";
    };
    std::cout << "views:\n";
    describe(cfg.bev);
    for (const ViewEntry& pv : cfg.pvs) describe(pv);
    std::cout << "fused channels: " << cfg.fused_channels() << "\n";
    const double bev_mb = static_cast<double>(cfg.bev.grid.voxel_count()) *
                          cfg.fused_channels() * sizeof(double) / (1024.0 * 1024.0);
    std::cout << "fused grid memory: " << format_double(bev_mb) << " MiB\n";
  }
  if (!opts.scene_path.empty()) {
    const SceneSpec scene = read_scene(opts.scene_path);
    std::cout << "scene: " << opts.scene_path << "\n";
    std::cout << "  rays: " << scene.azimuth_count << " azimuths x " << scene.elevations.size()
              << " rings, boxes: " << scene.boxes.size() << "\n";
  }
  if (!opts.input_path.empty()) {
    const PointCloud cloud = read_kitti_bin(opts.input_path);
    std::cout << "cloud: " << opts.input_path << "\n";
    std::cout << "  points: " << cloud.size() << "\n";
    if (!cloud.empty()) {
      float lo[4] = {cloud.points[0].x, cloud.points[0].y, cloud.points[0].z,
                     cloud.points[0].intensity};
      float hi[4] = {lo[0], lo[1], lo[2], lo[3]};
      for (const PointXYZI& p : cloud.points) {
        const float v[4] = {p.x, p.y, p.z, p.intensity};
        for (int a = 0; a < 4; ++a) {
          lo[a] = std::min(lo[a], v[a]);
          hi[a] = std::max(hi[a], v[a]);
        }
      }
      std::cout << "  x [" << lo[0] << ", " << hi[0] << "], y [" << lo[1] << ", " << hi[1]
                << "], z [" << lo[2] << ", " << hi[2] << "], intensity [" << lo[3] << ", "
                << hi[3] << "]\n";
    }
  }
  if (opts.config_path.empty() && opts.scene_path.empty() && opts.input_path.empty())
    throw ConfigError("info needs at least one of --config, --scene, --input");
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_parallel = false) {
  cmd->add_option("--config", opts.config_path, "view-set config JSON");
  cmd->add_option("--input", opts.input_path, "input point cloud (.bin)");
  cmd->add_option("--scene", opts.scene_path, "synthetic scene spec JSON");
  cmd->add_option("--seed", opts.seed, "seed for synthetic scenes");
  cmd->add_option("--out", opts.out_path, "output path (default: stdout for reports)");
  cmd->add_flag("--frustum", opts.frustum, "keep only front-frustum points");
  cmd->add_option("--frustum-h-deg", opts.frustum_h_deg, "horizontal half angle (deg)");
  cmd->add_option("--frustum-v-deg", opts.frustum_v_deg, "vertical half angle (deg)");
  if (with_parallel)
    cmd->add_option("--parallel", opts.parallel, "worker count or \"auto\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-view LiDAR voxel grids: transforms, fusion and density analysis"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string provenance_path;

  CLI::App* synth = app.add_subcommand("synth", "cast a synthetic scene and write a .bin cloud");
  add_common(synth, opts);
  synth->add_option("--provenance", provenance_path, "also write per-point provenance CSV");

  CLI::App* stats = app.add_subcommand("stats", "per-view occupancy density report (CSV)");
  add_common(stats, opts);

  CLI::App* coverage =
      app.add_subcommand("coverage", "per-box occupied-voxel counts per view (CSV)");
  add_common(coverage, opts);

  CLI::App* fuse =
      app.add_subcommand("fuse", "aggregate every view and fuse onto the BEV grid");
  add_common(fuse, opts, true);

  CLI::App* info = app.add_subcommand("info", "describe a config, scene or cloud");
  add_common(info, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(opts, provenance_path);
    if (stats->parsed()) return cmd_stats(opts);
    if (coverage->parsed()) return cmd_coverage(opts);
    if (fuse->parsed()) return cmd_fuse(opts);
    if (info->parsed()) return cmd_info(opts);
  } catch (const SelfCheckError& e) {
    std::cerr << "self-check failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
