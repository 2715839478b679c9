#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xview/fusion.hpp"

namespace xview {

/// Parses a view-set config from JSON (// comments allowed). Schema violations and
/// physical invariant violations raise ConfigError with the offending field path.
ViewSetConfig parse_config(const std::string& json_text);
ViewSetConfig read_config(const std::filesystem::path& path);

/// Canonical JSON form; parse(serialize(cfg)) == cfg.
std::string serialize_config(const ViewSetConfig& cfg);

/// Documented default grid for a view kind, used when a config omits "grid":
///   cartesian   [0,70.4) x [-40,40) x [-3,1) m at 0.1 m pitch
///   spherical   r [0,80) m at 0.5 m, theta full circle at 0.2 deg (periodic),
///               phi [0,pi) at 1 deg
///   cylindrical r and theta as spherical, z [-3,1) m at 0.1 m pitch
GridSpec default_grid(ViewKind kind);

FeatureMask parse_features(const std::vector<std::string>& names);
std::vector<std::string> feature_names(FeatureMask mask);

}  // namespace xview
