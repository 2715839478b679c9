#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <vector>

#include "xview/geometry.hpp"

namespace xview {

struct PointXYZI {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float intensity = 0.0f;
  friend bool operator==(const PointXYZI&, const PointXYZI&) = default;
};

inline Point3 position(const PointXYZI& p) {
  return {static_cast<double>(p.x), static_cast<double>(p.y), static_cast<double>(p.z)};
}

struct PointCloud {
  std::vector<PointXYZI> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

// KITTI velodyne layout: consecutive 16-byte records of four little-endian float32
// values (x, y, z, intensity), in file order.
PointCloud decode_kitti(std::span<const std::byte> bytes);
std::vector<std::byte> encode_kitti(const PointCloud& cloud);
PointCloud read_kitti_bin(const std::filesystem::path& path);
void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud);

/// Keeps points with x > 0, |atan2(y,x)| <= half_angle_h and
/// |atan2(z, hypot(x,y))| <= half_angle_v; order preserved. Angles in radians,
/// each in (0, pi/2).
PointCloud frustum_filter(const PointCloud& cloud, double half_angle_h, double half_angle_v);

// Angular stand-in for the usual front-camera overlap of a rotating sensor.
inline constexpr double kDefaultFrustumHalfAngleH = 40.5 * std::numbers::pi / 180.0;
inline constexpr double kDefaultFrustumHalfAngleV = 15.0 * std::numbers::pi / 180.0;

}  // namespace xview
