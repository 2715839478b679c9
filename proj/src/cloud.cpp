#include "xview/cloud.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "xview/errors.hpp"

namespace xview {

namespace {

constexpr std::size_t kRecordBytes = 16;

float read_f32_le(const std::byte* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(std::to_integer<unsigned>(p[0])) |
                          static_cast<std::uint32_t>(std::to_integer<unsigned>(p[1])) << 8 |
                          static_cast<std::uint32_t>(std::to_integer<unsigned>(p[2])) << 16 |
                          static_cast<std::uint32_t>(std::to_integer<unsigned>(p[3])) << 24;
  return std::bit_cast<float>(u);
}

void write_f32_le(std::byte* p, float f) {
  const auto u = std::bit_cast<std::uint32_t>(f);
  p[0] = static_cast<std::byte>(u & 0xffu);
  p[1] = static_cast<std::byte>((u >> 8) & 0xffu);
  p[2] = static_cast<std::byte>((u >> 16) & 0xffu);
  p[3] = static_cast<std::byte>((u >> 24) & 0xffu);
}

}  // namespace

PointCloud decode_kitti(std::span<const std::byte> bytes) {
  if (bytes.size() % kRecordBytes != 0) {
    const std::size_t offset = bytes.size() - bytes.size() % kRecordBytes;
    throw FormatError("kitti bin: length " + std::to_string(bytes.size()) +
                      " is not a multiple of 16 (partial record at offset " +
                      std::to_string(offset) + ")");
  }
  PointCloud cloud;
  const std::size_t n = bytes.size() / kRecordBytes;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::byte* rec = bytes.data() + i * kRecordBytes;
    PointXYZI p;
    p.x = read_f32_le(rec);
    p.y = read_f32_le(rec + 4);
    p.z = read_f32_le(rec + 8);
    p.intensity = read_f32_le(rec + 12);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      throw FormatError("kitti bin: non-finite value in point " + std::to_string(i));
    }
    cloud.points[i] = p;
  }
  return cloud;
}

std::vector<std::byte> encode_kitti(const PointCloud& cloud) {
  std::vector<std::byte> out(cloud.size() * kRecordBytes);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::byte* rec = out.data() + i * kRecordBytes;
    const PointXYZI& p = cloud.points[i];
    write_f32_le(rec, p.x);
    write_f32_le(rec + 4, p.y);
    write_f32_le(rec + 8, p.z);
    write_f32_le(rec + 12, p.intensity);
  }
  return out;
}

PointCloud read_kitti_bin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(size);
  if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw FormatError("read failed for " + path.string());
  return decode_kitti(bytes);
}

void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud) {
  const auto bytes = encode_kitti(cloud);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

PointCloud frustum_filter(const PointCloud& cloud, double half_angle_h, double half_angle_v) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (!(half_angle_h > 0.0 && half_angle_h < kHalfPi))
    throw std::invalid_argument("frustum_filter: horizontal half angle outside (0, pi/2)");
  if (!(half_angle_v > 0.0 && half_angle_v < kHalfPi))
    throw std::invalid_argument("frustum_filter: vertical half angle outside (0, pi/2)");

  PointCloud kept;
  kept.points.reserve(cloud.size());
  for (const PointXYZI& p : cloud.points) {
    const double x = p.x, y = p.y, z = p.z;
    if (!(x > 0.0)) continue;
    if (std::abs(std::atan2(y, x)) > half_angle_h) continue;
    if (std::abs(std::atan2(z, std::hypot(x, y))) > half_angle_v) continue;
    kept.points.push_back(p);
  }
  return kept;
}

}  // namespace xview
