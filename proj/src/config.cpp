#include "xview/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json_util.hpp"
#include "xview/errors.hpp"

namespace xview {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

using jsonu::Json;

}  // namespace

GridSpec default_grid(ViewKind kind) {
  GridSpec g;
  switch (kind) {
    case ViewKind::cartesian:
      g.lo = {0.0, -40.0, -3.0};
      g.hi = {70.4, 40.0, 1.0};
      g.bins = {704, 800, 40};  // 0.1 m pitch
      break;
    case ViewKind::spherical:
      g.lo = {0.0, -kPi, 0.0};
      g.hi = {80.0, kPi, kPi};
      g.bins = {160, 1800, 180};  // 0.5 m, 0.2 deg, 1 deg
      g.periodic_theta = true;
      break;
    case ViewKind::cylindrical:
      g.lo = {0.0, -kPi, -3.0};
      g.hi = {80.0, kPi, 1.0};
      g.bins = {160, 1800, 40};  // 0.5 m, 0.2 deg, 0.1 m
      g.periodic_theta = true;
      break;
  }
  return g;
}

FeatureMask parse_features(const std::vector<std::string>& names) {
  FeatureMask mask = 0;
  for (const std::string& name : names) {
    if (name == "count")
      mask |= static_cast<FeatureMask>(Feature::count);
    else if (name == "mean_intensity")
      mask |= static_cast<FeatureMask>(Feature::mean_intensity);
    else if (name == "max_intensity")
      mask |= static_cast<FeatureMask>(Feature::max_intensity);
    else if (name == "mean_offset")
      mask |= static_cast<FeatureMask>(Feature::mean_offset);
    else
      throw ConfigError("unknown feature \"" + name + "\"");
  }
  return mask;
}

std::vector<std::string> feature_names(FeatureMask mask) {
  std::vector<std::string> names;
  if (has_feature(mask, Feature::count)) names.push_back("count");
  if (has_feature(mask, Feature::mean_intensity)) names.push_back("mean_intensity");
  if (has_feature(mask, Feature::max_intensity)) names.push_back("max_intensity");
  if (has_feature(mask, Feature::mean_offset)) names.push_back("mean_offset");
  return names;
}

namespace {

GridSpec parse_grid(const Json& j, const std::string& path) {
  GridSpec g;
  g.lo = jsonu::triple_at(jsonu::member(j, "lo", path), path + ".lo");
  g.hi = jsonu::triple_at(jsonu::member(j, "hi", path), path + ".hi");
  const Json& bins = jsonu::member(j, "bins", path);
  if (!bins.is_array() || bins.size() != 3)
    throw ConfigError(path + ".bins: expected an array of 3 integers");
  for (std::size_t a = 0; a < 3; ++a) {
    const std::string bp = path + ".bins[" + std::to_string(a) + "]";
    const auto b = jsonu::integer_at(bins[a], bp);
    if (b < 1) throw ConfigError(bp + ": must be >= 1");
    if (b > std::numeric_limits<std::int32_t>::max()) throw ConfigError(bp + ": too large");
    g.bins[a] = static_cast<std::int32_t>(b);
  }
  if (const Json* p = jsonu::member_opt(j, "periodic_theta", path))
    g.periodic_theta = jsonu::bool_at(*p, path + ".periodic_theta");
  for (int a = 0; a < 3; ++a) {
    if (!(g.lo[a] < g.hi[a]))
      throw ConfigError(path + ".lo[" + std::to_string(a) + "]: lo must be < hi");
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return g;
}

FeatureMask parse_feature_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of feature names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < j.size(); ++i)
    names.push_back(jsonu::string_at(j[i], path + "[" + std::to_string(i) + "]"));
  try {
    return parse_features(names);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ViewEntry parse_entry(const Json& j, const std::string& path, bool is_bev,
                      const std::string& default_name) {
  ViewEntry e;
  if (const Json* name = jsonu::member_opt(j, "name", path))
    e.name = jsonu::string_at(*name, path + ".name");
  else
    e.name = default_name;

  if (is_bev) {
    e.view.kind = ViewKind::cartesian;
    if (const Json* kind = jsonu::member_opt(j, "kind", path)) {
      if (parse_view_kind(jsonu::string_at(*kind, path + ".kind")) != ViewKind::cartesian)
        throw ConfigError(path + ".kind: the BEV view must be cartesian");
    }
    if (const Json* origin = jsonu::member_opt(j, "origin", path)) {
      const auto v = jsonu::triple_at(*origin, path + ".origin");
      if (v != std::array<double, 3>{0.0, 0.0, 0.0})
        throw ConfigError(path + ".origin: cartesian views must keep the origin at (0,0,0)");
    }
  } else {
    const std::string kind = jsonu::string_at(jsonu::member(j, "kind", path), path + ".kind");
    try {
      e.view.kind = parse_view_kind(kind);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(path + ".kind: " + err.what());
    }
    const auto v = jsonu::triple_at(jsonu::member(j, "origin", path), path + ".origin");
    e.view.origin = {v[0], v[1], v[2]};
  }

  if (const Json* grid = jsonu::member_opt(j, "grid", path))
    e.grid = parse_grid(*grid, path + ".grid");
  else
    e.grid = default_grid(e.view.kind);

  if (const Json* features = jsonu::member_opt(j, "features", path))
    e.features = parse_feature_list(*features, path + ".features");
  else
    e.features = kAllFeatures;
  return e;
}

}  // namespace

ViewSetConfig parse_config(const std::string& json_text) {
  const Json j = jsonu::parse_text(json_text, "config");
  if (!j.is_object()) throw ConfigError("config: expected an object");

  ViewSetConfig cfg;
  if (const Json* mode = jsonu::member_opt(j, "fuse_mode", "config")) {
    try {
      cfg.fuse_mode = parse_fuse_mode(jsonu::string_at(*mode, "config.fuse_mode"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.fuse_mode: ") + e.what());
    }
  }
  cfg.bev = parse_entry(jsonu::member(j, "bev", "config"), "bev", true, "bev");

  const Json& pvs = jsonu::member(j, "pvs", "config");
  if (!pvs.is_array()) throw ConfigError("pvs: expected an array");
  for (std::size_t k = 0; k < pvs.size(); ++k) {
    const std::string path = "pvs[" + std::to_string(k) + "]";
    cfg.pvs.push_back(parse_entry(pvs[k], path, false, "pv" + std::to_string(k)));
  }

  cfg.validate();
  return cfg;
}

ViewSetConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

Json grid_json(const GridSpec& g) {
  Json j;
  j["lo"] = g.lo;
  j["hi"] = g.hi;
  j["bins"] = g.bins;
  j["periodic_theta"] = g.periodic_theta;
  return j;
}

Json entry_json(const ViewEntry& e) {
  Json j;
  j["name"] = e.name;
  j["kind"] = to_string(e.view.kind);
  j["origin"] = {e.view.origin.x, e.view.origin.y, e.view.origin.z};
  j["grid"] = grid_json(e.grid);
  j["features"] = feature_names(e.features);
  return j;
}

}  // namespace

std::string serialize_config(const ViewSetConfig& cfg) {
  Json j;
  j["fuse_mode"] = to_string(cfg.fuse_mode);
  j["bev"] = entry_json(cfg.bev);
  Json pvs = Json::array();
  for (const ViewEntry& pv : cfg.pvs) pvs.push_back(entry_json(pv));
  j["pvs"] = pvs;
  return j.dump(2) + "\n";
}

}  // namespace xview
