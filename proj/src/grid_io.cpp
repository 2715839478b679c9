#include "xview/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "xview/errors.hpp"

namespace xview {

namespace {

using jsonu::Json;

constexpr int kFormatVersion = 1;

void put_f32_le(std::vector<std::byte>& out, float f) {
  const auto u = std::bit_cast<std::uint32_t>(f);
  out.push_back(static_cast<std::byte>(u & 0xffu));
  out.push_back(static_cast<std::byte>((u >> 8) & 0xffu));
  out.push_back(static_cast<std::byte>((u >> 16) & 0xffu));
  out.push_back(static_cast<std::byte>((u >> 24) & 0xffu));
}

float get_f32_le(const std::byte* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(std::to_integer<unsigned>(p[0])) |
                          static_cast<std::uint32_t>(std::to_integer<unsigned>(p[1])) << 8 |
                          static_cast<std::uint32_t>(std::to_integer<unsigned>(p[2])) << 16 |
                          static_cast<std::uint32_t>(std::to_integer<unsigned>(p[3])) << 24;
  return std::bit_cast<float>(u);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& blob_path) {
  std::filesystem::path p = blob_path;
  p += ".json";
  return p;
}

void write_grid(const std::filesystem::path& blob_path, const FeatureGrid& grid,
                const GridMeta& meta) {
  if (grid.empty()) throw std::invalid_argument("write_grid: empty grid");
  if (!meta.channel_names.empty() &&
      meta.channel_names.size() != static_cast<std::size_t>(grid.channels()))
    throw std::invalid_argument("write_grid: channel name count does not match the grid");

  std::vector<std::byte> blob;
  blob.reserve(grid.value_data().size() * 4);
  for (const double v : grid.value_data()) put_f32_le(blob, static_cast<float>(v));

  std::ofstream out(blob_path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + blob_path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
  if (!out) throw FormatError("write failed for " + blob_path.string());

  const GridSpec& gs = grid.spec();
  Json j;
  j["format"] = "xview-grid";
  j["version"] = kFormatVersion;
  j["view"] = {{"name", meta.view_name},
               {"kind", to_string(meta.view.kind)},
               {"origin", {meta.view.origin.x, meta.view.origin.y, meta.view.origin.z}}};
  j["grid"] = {{"lo", gs.lo}, {"hi", gs.hi}, {"bins", gs.bins}, {"periodic_theta", gs.periodic_theta}};
  j["channels"] = meta.channel_names.empty()
                      ? Json(std::vector<std::string>(static_cast<std::size_t>(grid.channels()), ""))
                      : Json(meta.channel_names);
  j["layout"] = "voxel-major (i,j,k), channel innermost, little-endian float32";
  if (!meta.provenance.empty()) {
    Json blocks = Json::array();
    for (const ChannelBlock& b : meta.provenance)
      blocks.push_back({{"view", b.view}, {"begin", b.begin}, {"count", b.count}});
    j["provenance"] = blocks;
  }
  if (!meta.config_json.empty())
    j["config"] = jsonu::parse_text(meta.config_json, "write_grid config echo");

  std::ofstream side(sidecar_path(blob_path), std::ios::trunc);
  if (!side) throw FormatError("cannot open " + sidecar_path(blob_path).string() + " for writing");
  side << j.dump(2) << "\n";
  if (!side) throw FormatError("write failed for " + sidecar_path(blob_path).string());
}

LoadedGrid read_grid(const std::filesystem::path& blob_path) {
  std::ifstream side_in(sidecar_path(blob_path));
  if (!side_in) throw FormatError("cannot open " + sidecar_path(blob_path).string());
  std::ostringstream side_buf;
  side_buf << side_in.rdbuf();
  const Json j = jsonu::parse_text(side_buf.str(), "grid sidecar");

  if (jsonu::string_at(jsonu::member(j, "format", "sidecar"), "sidecar.format") != "xview-grid")
    throw FormatError("sidecar: not an xview-grid file");

  GridSpec gs;
  const Json& jg = jsonu::member(j, "grid", "sidecar");
  gs.lo = jsonu::triple_at(jsonu::member(jg, "lo", "sidecar.grid"), "sidecar.grid.lo");
  gs.hi = jsonu::triple_at(jsonu::member(jg, "hi", "sidecar.grid"), "sidecar.grid.hi");
  const Json& bins = jsonu::member(jg, "bins", "sidecar.grid");
  if (!bins.is_array() || bins.size() != 3) throw FormatError("sidecar.grid.bins: expected 3 ints");
  for (std::size_t a = 0; a < 3; ++a)
    gs.bins[a] = static_cast<std::int32_t>(jsonu::integer_at(bins[a], "sidecar.grid.bins"));
  gs.periodic_theta = jsonu::bool_at(jsonu::member(jg, "periodic_theta", "sidecar.grid"),
                                     "sidecar.grid.periodic_theta");

  const Json& channels = jsonu::member(j, "channels", "sidecar");
  if (!channels.is_array() || channels.empty())
    throw FormatError("sidecar.channels: expected a non-empty array");

  LoadedGrid loaded;
  loaded.grid = FeatureGrid(gs, static_cast<int>(channels.size()));
  loaded.meta.channel_names.reserve(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c)
    loaded.meta.channel_names.push_back(jsonu::string_at(channels[c], "sidecar.channels"));

  const Json& view = jsonu::member(j, "view", "sidecar");
  loaded.meta.view_name = jsonu::string_at(jsonu::member(view, "name", "sidecar.view"),
                                           "sidecar.view.name");
  loaded.meta.view.kind = parse_view_kind(
      jsonu::string_at(jsonu::member(view, "kind", "sidecar.view"), "sidecar.view.kind"));
  const auto origin = jsonu::triple_at(jsonu::member(view, "origin", "sidecar.view"),
                                       "sidecar.view.origin");
  loaded.meta.view.origin = {origin[0], origin[1], origin[2]};

  if (const Json* blocks = jsonu::member_opt(j, "provenance", "sidecar")) {
    for (const Json& jb : *blocks) {
      ChannelBlock b;
      b.view = jsonu::string_at(jsonu::member(jb, "view", "sidecar.provenance"), "provenance.view");
      b.begin = static_cast<int>(
          jsonu::integer_at(jsonu::member(jb, "begin", "sidecar.provenance"), "provenance.begin"));
      b.count = static_cast<int>(
          jsonu::integer_at(jsonu::member(jb, "count", "sidecar.provenance"), "provenance.count"));
      loaded.meta.provenance.push_back(b);
    }
  }
  if (const Json* cfg = jsonu::member_opt(j, "config", "sidecar"))
    loaded.meta.config_json = cfg->dump(2) + "\n";

  std::ifstream blob_in(blob_path, std::ios::binary);
  if (!blob_in) throw FormatError("cannot open " + blob_path.string());
  blob_in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(blob_in.tellg());
  blob_in.seekg(0, std::ios::beg);
  const std::size_t expected = loaded.grid.value_data().size() * 4;
  if (size != expected)
    throw FormatError("grid blob " + blob_path.string() + ": expected " +
                      std::to_string(expected) + " bytes, found " + std::to_string(size));
  std::vector<std::byte> blob(size);
  if (size > 0) blob_in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(size));
  if (!blob_in) throw FormatError("read failed for " + blob_path.string());

  auto values = loaded.grid.value_data();
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = static_cast<double>(get_f32_le(blob.data() + i * 4));
  return loaded;
}

}  // namespace xview
