#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xview/fusion.hpp"
#include "xview/grid.hpp"

namespace xview {

/// Sidecar metadata stored next to a grid blob.
struct GridMeta {
  std::string view_name;
  ViewSpec view;
  std::vector<std::string> channel_names;  // one per channel
  std::vector<ChannelBlock> provenance;    // empty for plain per-view grids
  std::string config_json;                 // producing config echo, empty if none
};

std::filesystem::path sidecar_path(const std::filesystem::path& blob_path);

/// Writes the feature blob (little-endian float32, voxel-major, channel innermost) and
/// a JSON sidecar describing the grid, view and channels. The pair round-trips through
/// read_grid byte-exactly. Occupancy is in-memory metadata and is not persisted.
void write_grid(const std::filesystem::path& blob_path, const FeatureGrid& grid,
                const GridMeta& meta);

struct LoadedGrid {
  FeatureGrid grid;
  GridMeta meta;
};

LoadedGrid read_grid(const std::filesystem::path& blob_path);

}  // namespace xview
