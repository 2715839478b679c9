#include "xview/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xview {

namespace {

constexpr double kPi = std::numbers::pi;

// atan2 covers [-pi, pi]; fold the single -pi value onto +pi so theta lies in (-pi, pi].
double azimuth(double dy, double dx) {
  double theta = std::atan2(dy, dx);
  if (theta == -kPi) theta = kPi;
  return theta;
}

}  // namespace

const char* to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::cartesian: return "cartesian";
    case ViewKind::spherical: return "spherical";
    case ViewKind::cylindrical: return "cylindrical";
  }
  return "?";
}

ViewKind parse_view_kind(const std::string& name) {
  if (name == "cartesian") return ViewKind::cartesian;
  if (name == "spherical") return ViewKind::spherical;
  if (name == "cylindrical") return ViewKind::cylindrical;
  throw std::invalid_argument("unknown view kind: \"" + name + "\"");
}

bool Point3::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

double norm(const Point3& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

void ViewSpec::validate() const {
  if (!origin.is_finite()) throw std::invalid_argument("view origin must be finite");
  if (kind == ViewKind::cartesian && !(origin == Point3{}))
    throw std::invalid_argument("cartesian views must keep the origin at (0,0,0)");
}

ViewCoord to_view(const Point3& p, const ViewSpec& v) {
  v.validate();
  if (v.kind == ViewKind::cartesian)
    throw std::invalid_argument("to_view: cartesian views do not transform");
  if (!p.is_finite()) throw std::invalid_argument("to_view: point must be finite");

  const double dx = p.x - v.origin.x;
  const double dy = p.y - v.origin.y;
  const double dz = p.z - v.origin.z;

  ViewCoord c;
  if (v.kind == ViewKind::spherical) {
    c.r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (c.r == 0.0) {
      // point at the view origin: angles fixed by convention
      return {0.0, 0.0, kPi / 2.0, true};
    }
    c.theta = azimuth(dy, dx);
    c.phi = std::acos(std::clamp(dz / c.r, -1.0, 1.0));
  } else {
    c.r = std::sqrt(dx * dx + dy * dy);
    c.phi = dz;  // exact: the z axis is only translated
    if (c.r == 0.0) {
      c.theta = 0.0;
      c.degenerate = true;
      return c;
    }
    c.theta = azimuth(dy, dx);
  }
  return c;
}

Point3 from_view(const ViewCoord& c, const ViewSpec& v) {
  v.validate();
  if (v.kind == ViewKind::cartesian)
    throw std::invalid_argument("from_view: cartesian views do not transform");
  if (!(std::isfinite(c.r) && std::isfinite(c.theta) && std::isfinite(c.phi)))
    throw std::invalid_argument("from_view: coordinate must be finite");
  if (c.r < 0.0) throw std::invalid_argument("from_view: negative range");

  if (v.kind == ViewKind::spherical) {
    if (c.phi < 0.0 || c.phi > kPi)
      throw std::invalid_argument("from_view: spherical phi outside [0, pi]");
    const double s = std::sin(c.phi);
    return {v.origin.x + c.r * s * std::cos(c.theta),
            v.origin.y + c.r * s * std::sin(c.theta),
            v.origin.z + c.r * std::cos(c.phi)};
  }
  return {v.origin.x + c.r * std::cos(c.theta),
          v.origin.y + c.r * std::sin(c.theta),
          v.origin.z + c.phi};
}

std::array<double, 3> view_values(const Point3& p, const ViewSpec& v) {
  if (v.kind == ViewKind::cartesian) {
    if (!p.is_finite()) throw std::invalid_argument("view_values: point must be finite");
    return {p.x, p.y, p.z};
  }
  return to_view(p, v).values();
}

Point3 view_point(const std::array<double, 3>& values, const ViewSpec& v) {
  if (v.kind == ViewKind::cartesian) return {values[0], values[1], values[2]};
  return from_view(ViewCoord{values[0], values[1], values[2]}, v);
}

}  // namespace xview
