#pragma once

#include <array>
#include <string>

namespace xview {

enum class ViewKind { cartesian, spherical, cylindrical };

const char* to_string(ViewKind kind);
ViewKind parse_view_kind(const std::string& name);

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool is_finite() const;
  friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

constexpr Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
constexpr Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

double norm(const Point3& p);

/// Perspective-view coordinate triple. r is the range (>= 0) and theta the azimuth in
/// (-pi, pi]. phi is the polar angle in [0, pi] for spherical views and the z offset in
/// meters for cylindrical views. `degenerate` marks coordinates whose angular part was
/// undefined (point at the view origin or on the cylinder axis) and filled by convention.
struct ViewCoord {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  bool degenerate = false;

  std::array<double, 3> values() const { return {r, theta, phi}; }
};

/// A coordinate frame: the sensor Cartesian frame itself, or a spherical/cylindrical
/// frame whose origin may be translated anywhere in the scene.
struct ViewSpec {
  ViewKind kind = ViewKind::cartesian;
  Point3 origin;  // cartesian views keep the origin at (0,0,0)

  void validate() const;
  friend bool operator==(const ViewSpec&, const ViewSpec&) = default;
};

/// Cartesian point -> perspective coordinates around v.origin. Rejects cartesian views
/// (they do not transform).
ViewCoord to_view(const Point3& p, const ViewSpec& v);

/// Analytic inverse of to_view. Rejects cartesian views.
Point3 from_view(const ViewCoord& c, const ViewSpec& v);

/// Per-axis values of p in the view's frame: {x,y,z} for cartesian, {r,theta,phi} otherwise.
std::array<double, 3> view_values(const Point3& p, const ViewSpec& v);

/// Cartesian position of a coordinate triple in the view's frame (inverse of view_values).
Point3 view_point(const std::array<double, 3>& values, const ViewSpec& v);

}  // namespace xview
