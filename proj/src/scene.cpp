#include "xview/scene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "json_util.hpp"
#include "xview/errors.hpp"

namespace xview {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRayEps = 1e-9;

}  // namespace

void SceneSpec::validate() const {
  if (!sensor_origin.is_finite()) throw ConfigError("sensor_origin: must be finite");
  if (!std::isfinite(ground_z)) throw ConfigError("ground_z: must be finite");
  if (!(sensor_origin.z > ground_z))
    throw ConfigError("sensor_origin: sensor must sit above the ground plane");
  if (azimuth_count < 1) throw ConfigError("azimuth.count: must be >= 1");
  if (!(azimuth_span > 0.0) || azimuth_span > 2.0 * kPi + 1e-9)
    throw ConfigError("azimuth.span: must lie in (0, 2*pi]");
  if (!std::isfinite(azimuth_start)) throw ConfigError("azimuth.start: must be finite");
  if (elevations.empty()) throw ConfigError("elevations: at least one ring is required");
  for (std::size_t k = 0; k < elevations.size(); ++k) {
    if (!std::isfinite(elevations[k]) || std::abs(elevations[k]) >= kPi / 2.0)
      throw ConfigError("elevations[" + std::to_string(k) + "]: must lie in (-pi/2, pi/2)");
  }
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const std::string path = "boxes[" + std::to_string(b) + "]";
    const ObstacleBox& box = boxes[b];
    if (!box.center.is_finite()) throw ConfigError(path + ".center: must be finite");
    if (!(box.length > 0.0 && box.width > 0.0 && box.height > 0.0))
      throw ConfigError(path + ".size: all extents must be positive");
    if (!std::isfinite(box.yaw)) throw ConfigError(path + ".yaw: must be finite");
    if (box.center.z - box.height / 2.0 < ground_z - 1e-9)
      throw ConfigError(path + ": box reaches below the ground plane");
  }
}

namespace {

// Entry parameter of a ray against the yawed box, or nothing if the ray starts inside
// or misses. Slab test in the box frame.
std::optional<double> ray_box_entry(const Point3& o, const Point3& d, const ObstacleBox& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double ox = o.x - box.center.x;
  const double oy = o.y - box.center.y;
  const double oz = o.z - box.center.z;
  const double po[3] = {c * ox + s * oy, -s * ox + c * oy, oz};
  const double pd[3] = {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
  const double half[3] = {box.length / 2.0, box.width / 2.0, box.height / 2.0};

  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(pd[a]) < 1e-15) {
      if (std::abs(po[a]) > half[a]) return std::nullopt;
      continue;
    }
    double t0 = (-half[a] - po[a]) / pd[a];
    double t1 = (half[a] - po[a]) / pd[a];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
  }
  if (tmax < tmin) return std::nullopt;
  if (tmin <= kRayEps) return std::nullopt;
  return tmin;
}

}  // namespace

SynthCloud synth_scene(const SceneSpec& scene, std::uint64_t seed) {
  scene.validate();

  const double step = scene.azimuth_span / scene.azimuth_count;
  // The seed only perturbs the azimuth phase; use raw generator bits so the result does
  // not depend on a library's distribution implementation.
  std::mt19937_64 rng(seed);
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double phase = unit * step;

  SynthCloud out;
  out.cloud.points.reserve(static_cast<std::size_t>(scene.azimuth_count) *
                           scene.elevations.size());
  const Point3& o = scene.sensor_origin;

  for (std::int32_t i = 0; i < scene.azimuth_count; ++i) {
    const double az = scene.azimuth_start + phase + static_cast<double>(i) * step;
    const double caz = std::cos(az);
    const double saz = std::sin(az);
    for (const double el : scene.elevations) {
      const double cel = std::cos(el);
      const Point3 d{cel * caz, cel * saz, std::sin(el)};

      double best_t = std::numeric_limits<double>::infinity();
      std::int32_t source = std::numeric_limits<std::int32_t>::min();
      if (d.z < 0.0) {
        best_t = (scene.ground_z - o.z) / d.z;
        source = kGroundSource;
      }
      for (std::size_t b = 0; b < scene.boxes.size(); ++b) {
        if (const auto t = ray_box_entry(o, d, scene.boxes[b]); t && *t < best_t) {
          best_t = *t;
          source = static_cast<std::int32_t>(b);
        }
      }
      if (source == std::numeric_limits<std::int32_t>::min()) continue;

      // emit in the sensor frame
      PointXYZI p;
      p.x = static_cast<float>(best_t * d.x);
      p.y = static_cast<float>(best_t * d.y);
      p.z = static_cast<float>(best_t * d.z);
      p.intensity = 0.5f;
      out.cloud.points.push_back(p);
      out.provenance.push_back(source);
    }
  }
  return out;
}

namespace {

using jsonu::Json;

std::vector<double> parse_elevations(const Json& j, const std::string& path) {
  std::vector<double> out;
  if (const Json* list = jsonu::member_opt(j, "elevations", path)) {
    if (!list->is_array()) throw ConfigError(path + ".elevations: expected an array");
    for (std::size_t k = 0; k < list->size(); ++k)
      out.push_back(jsonu::number_at((*list)[k], path + ".elevations[" + std::to_string(k) + "]"));
    return out;
  }
  if (const Json* list = jsonu::member_opt(j, "elevations_deg", path)) {
    if (!list->is_array()) throw ConfigError(path + ".elevations_deg: expected an array");
    for (std::size_t k = 0; k < list->size(); ++k)
      out.push_back(kDegToRad * jsonu::number_at((*list)[k], path + ".elevations_deg[" +
                                                                std::to_string(k) + "]"));
    return out;
  }
  if (const Json* rings = jsonu::member_opt(j, "rings", path)) {
    const std::string rp = path + ".rings";
    const auto count = jsonu::integer_at(jsonu::member(*rings, "count", rp), rp + ".count");
    if (count < 1) throw ConfigError(rp + ".count: must be >= 1");
    const double min_deg = jsonu::number_at(jsonu::member(*rings, "min_deg", rp), rp + ".min_deg");
    const double max_deg = jsonu::number_at(jsonu::member(*rings, "max_deg", rp), rp + ".max_deg");
    if (count == 1) {
      out.push_back(kDegToRad * min_deg);
      return out;
    }
    for (std::int64_t k = 0; k < count; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(count - 1);
      out.push_back(kDegToRad * (min_deg + f * (max_deg - min_deg)));
    }
    return out;
  }
  throw ConfigError(path + ": one of elevations, elevations_deg or rings is required");
}

}  // namespace

SceneSpec parse_scene(const std::string& json_text) {
  const Json j = jsonu::parse_text(json_text, "scene");
  const std::string root = "scene";
  if (!j.is_object()) throw ConfigError(root + ": expected an object");

  SceneSpec scene;
  if (const Json* origin = jsonu::member_opt(j, "sensor_origin", root)) {
    const auto v = jsonu::triple_at(*origin, root + ".sensor_origin");
    scene.sensor_origin = {v[0], v[1], v[2]};
  }
  if (const Json* gz = jsonu::member_opt(j, "ground_z", root))
    scene.ground_z = jsonu::number_at(*gz, root + ".ground_z");

  const Json& az = jsonu::member(j, "azimuth", root);
  const std::string ap = root + ".azimuth";
  scene.azimuth_count = static_cast<std::int32_t>(
      jsonu::integer_at(jsonu::member(az, "count", ap), ap + ".count"));
  if (const Json* v = jsonu::member_opt(az, "start", ap))
    scene.azimuth_start = jsonu::number_at(*v, ap + ".start");
  else
    scene.azimuth_start =
        kDegToRad * jsonu::number_at(jsonu::member(az, "start_deg", ap), ap + ".start_deg");
  if (const Json* v = jsonu::member_opt(az, "span", ap))
    scene.azimuth_span = jsonu::number_at(*v, ap + ".span");
  else
    scene.azimuth_span =
        kDegToRad * jsonu::number_at(jsonu::member(az, "span_deg", ap), ap + ".span_deg");

  scene.elevations = parse_elevations(j, root);

  if (const Json* boxes = jsonu::member_opt(j, "boxes", root)) {
    if (!boxes->is_array()) throw ConfigError(root + ".boxes: expected an array");
    for (std::size_t b = 0; b < boxes->size(); ++b) {
      const std::string bp = root + ".boxes[" + std::to_string(b) + "]";
      const Json& jb = (*boxes)[b];
      ObstacleBox box;
      const auto center = jsonu::triple_at(jsonu::member(jb, "center", bp), bp + ".center");
      box.center = {center[0], center[1], center[2]};
      const auto size = jsonu::triple_at(jsonu::member(jb, "size", bp), bp + ".size");
      box.length = size[0];
      box.width = size[1];
      box.height = size[2];
      if (const Json* v = jsonu::member_opt(jb, "yaw", bp))
        box.yaw = jsonu::number_at(*v, bp + ".yaw");
      else if (const Json* vdeg = jsonu::member_opt(jb, "yaw_deg", bp))
        box.yaw = kDegToRad * jsonu::number_at(*vdeg, bp + ".yaw_deg");
      scene.boxes.push_back(box);
    }
  }

  scene.validate();
  return scene;
}

SceneSpec read_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string serialize_scene(const SceneSpec& scene) {
  Json j;
  j["sensor_origin"] = {scene.sensor_origin.x, scene.sensor_origin.y, scene.sensor_origin.z};
  j["ground_z"] = scene.ground_z;
  j["azimuth"] = {{"start", scene.azimuth_start},
                  {"span", scene.azimuth_span},
                  {"count", scene.azimuth_count}};
  j["elevations"] = scene.elevations;
  Json boxes = Json::array();
  for (const ObstacleBox& box : scene.boxes) {
    Json jb;
    jb["center"] = {box.center.x, box.center.y, box.center.z};
    jb["size"] = {box.length, box.width, box.height};
    jb["yaw"] = box.yaw;
    boxes.push_back(jb);
  }
  j["boxes"] = boxes;
  return j.dump(2) + "\n";
}

}  // namespace xview
