#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xview/cloud.hpp"
#include "xview/geometry.hpp"

namespace xview {

/// Axis-aligned box rotated by yaw about z, acting as a ray-stopping obstacle.
struct ObstacleBox {
  Point3 center;
  double length = 1.0;  // x extent before yaw
  double width = 1.0;   // y extent before yaw
  double height = 1.0;  // z extent
  double yaw = 0.0;     // radians
  friend bool operator==(const ObstacleBox&, const ObstacleBox&) = default;
};

/// Synthetic rotating-LiDAR scene: rays uniform in azimuth, one per (azimuth, ring)
/// pair, stopped by the ground plane or by obstacle boxes. Scene geometry is given in
/// world coordinates; the emitted cloud is in the sensor frame (sensor at the origin).
struct SceneSpec {
  Point3 sensor_origin{0.0, 0.0, 1.73};
  double ground_z = 0.0;
  double azimuth_start = 0.0;  // radians
  double azimuth_span = 0.0;   // radians, rays cover [start, start+span)
  std::int32_t azimuth_count = 0;
  std::vector<double> elevations;  // ring angles, radians
  std::vector<ObstacleBox> boxes;

  void validate() const;  // throws ConfigError
  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

inline constexpr std::int32_t kGroundSource = -1;

struct SynthCloud {
  PointCloud cloud;
  std::vector<std::int32_t> provenance;  // kGroundSource or the stopping box index
};

/// Deterministic given the seed; the seed only perturbs the azimuth phase. Rays that
/// hit nothing produce no point. Output order is azimuth-major, ring-minor.
SynthCloud synth_scene(const SceneSpec& scene, std::uint64_t seed);

SceneSpec parse_scene(const std::string& json_text);
SceneSpec read_scene(const std::filesystem::path& path);
std::string serialize_scene(const SceneSpec& scene);

}  // namespace xview
