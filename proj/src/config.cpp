#include "holecalib/config.hpp"

#include <fstream>

#include <json.hpp>

#include "holecalib/errors.hpp"

namespace holecalib {

using nlohmann::json;

namespace {

json vec_to_json(const Vec3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3d vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const PassThroughBounds& b) {
  j = json{{"min", vec_to_json(b.min)}, {"max", vec_to_json(b.max)}};
}

void from_json(const json& j, PassThroughBounds& b) {
  b.min = vec_from_json(j.at("min"));
  b.max = vec_from_json(j.at("max"));
}

void to_json(json& j, const TargetGeometry& g) {
  json markers = json::array();
  for (const auto& m : g.marker_center_offsets) markers.push_back({m.x(), m.y()});
  j = json{{"hole_radius", g.hole_radius},   {"centers_width", g.centers_width},
           {"centers_height", g.centers_height}, {"board_width", g.board_width},
           {"board_height", g.board_height}, {"marker_size", g.marker_size},
           {"marker_center_offsets", markers}};
}

void from_json(const json& j, TargetGeometry& g) {
  read_opt(j, "hole_radius", g.hole_radius);
  read_opt(j, "centers_width", g.centers_width);
  read_opt(j, "centers_height", g.centers_height);
  read_opt(j, "board_width", g.board_width);
  read_opt(j, "board_height", g.board_height);
  read_opt(j, "marker_size", g.marker_size);
  if (j.contains("marker_center_offsets")) {
    const json& m = j.at("marker_center_offsets");
    if (!m.is_array() || m.size() != 4) throw DataError("marker_center_offsets needs 4 entries");
    for (std::size_t i = 0; i < 4; ++i) {
      g.marker_center_offsets[i] = {m[i].at(0).get<double>(), m[i].at(1).get<double>()};
    }
  }
}

void to_json(json& j, const CameraIntrinsics& k) {
  j = json{{"fx", k.fx},       {"fy", k.fy},         {"cx", k.cx},
           {"cy", k.cy},       {"width", k.width},   {"height", k.height}};
}

void from_json(const json& j, CameraIntrinsics& k) {
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
}

void to_json(json& j, const CalibConfig& c) {
  json pt = json::object();
  for (const auto& [name, b] : c.passthrough) pt[name] = b;
  j = json{
      {"delta_discont_lidar", c.delta_discont_lidar},
      {"tau_sobel_stereo", c.tau_sobel_stereo},
      {"delta_plane", c.delta_plane},
      {"alpha_plane", c.alpha_plane},
      {"delta_inliers", c.delta_inliers},
      {"plane_max_iters", c.plane_max_iters},
      {"plane_min_inliers", c.plane_min_inliers},
      {"up_axis", vec_to_json(c.up_axis)},
      {"delta_circle_lidar", c.delta_circle_lidar},
      {"delta_circle_stereo", c.delta_circle_stereo},
      {"delta_radius_lidar", c.delta_radius_lidar},
      {"delta_radius_stereo", c.delta_radius_stereo},
      {"delta_consistency", c.delta_consistency},
      {"min_circle_points", c.min_circle_points},
      {"circle_max_iters", c.circle_max_iters},
      {"delta_cluster", c.delta_cluster},
      {"cluster_min_fraction", c.cluster_min_fraction},
      {"cluster_max_fraction", c.cluster_max_fraction},
      {"lm",
       {{"max_iters", c.lm.max_iters},
        {"tol", c.lm.tol},
        {"lambda0", c.lm.lambda0},
        {"lambda_max", c.lm.lambda_max}}},
      {"target", c.target},
      {"passthrough", pt},
      {"frames", c.frames},
      {"poses", c.poses},
      {"seed", c.seed},
      {"workers", c.workers},
  };
}

void from_json(const json& j, CalibConfig& c) {
  if (!j.is_object()) throw DataError("config must be a JSON object");
  read_opt(j, "delta_discont_lidar", c.delta_discont_lidar);
  read_opt(j, "tau_sobel_stereo", c.tau_sobel_stereo);
  read_opt(j, "delta_plane", c.delta_plane);
  read_opt(j, "alpha_plane", c.alpha_plane);
  read_opt(j, "delta_inliers", c.delta_inliers);
  read_opt(j, "plane_max_iters", c.plane_max_iters);
  read_opt(j, "plane_min_inliers", c.plane_min_inliers);
  if (j.contains("up_axis")) c.up_axis = vec_from_json(j.at("up_axis"));
  read_opt(j, "delta_circle_lidar", c.delta_circle_lidar);
  read_opt(j, "delta_circle_stereo", c.delta_circle_stereo);
  read_opt(j, "delta_radius_lidar", c.delta_radius_lidar);
  read_opt(j, "delta_radius_stereo", c.delta_radius_stereo);
  read_opt(j, "delta_consistency", c.delta_consistency);
  read_opt(j, "min_circle_points", c.min_circle_points);
  read_opt(j, "circle_max_iters", c.circle_max_iters);
  read_opt(j, "delta_cluster", c.delta_cluster);
  read_opt(j, "cluster_min_fraction", c.cluster_min_fraction);
  read_opt(j, "cluster_max_fraction", c.cluster_max_fraction);
  if (j.contains("lm")) {
    const json& lm = j.at("lm");
    read_opt(lm, "max_iters", c.lm.max_iters);
    read_opt(lm, "tol", c.lm.tol);
    read_opt(lm, "lambda0", c.lm.lambda0);
    read_opt(lm, "lambda_max", c.lm.lambda_max);
  }
  if (j.contains("target")) from_json(j.at("target"), c.target);
  if (j.contains("passthrough")) {
    for (const auto& [name, b] : j.at("passthrough").items()) {
      c.passthrough[name] = b.get<PassThroughBounds>();
    }
  }
  read_opt(j, "frames", c.frames);
  read_opt(j, "poses", c.poses);
  read_opt(j, "seed", c.seed);
  read_opt(j, "workers", c.workers);
}

void CalibConfig::validate() const {
  const double tolerances[] = {delta_discont_lidar, delta_plane,        alpha_plane,
                               delta_inliers,       delta_circle_lidar, delta_circle_stereo,
                               delta_radius_lidar,  delta_radius_stereo, delta_consistency,
                               delta_cluster};
  for (double t : tolerances) {
    if (!(t > 0)) throw DataError("all tolerances must be positive");
  }
  if (tau_sobel_stereo <= 0) throw DataError("tau_sobel_stereo must be positive");
  if (plane_max_iters < 1 || circle_max_iters < 1) throw DataError("RANSAC needs iterations");
  if (!(cluster_min_fraction > 0 && cluster_min_fraction <= cluster_max_fraction)) {
    throw DataError("cluster size fractions must satisfy 0 < min <= max");
  }
  if (!(up_axis.norm() > 0)) throw DataError("up_axis must be non-zero");
  if (frames < 1) throw DataError("N must be at least 1");
  if (poses < 0) throw DataError("M must be non-negative");
  if (workers < 1) throw DataError("workers must be at least 1");
  for (const auto& [name, b] : passthrough) {
    if (!b.valid()) throw DataError("pass-through bounds for '" + name + "' have min > max");
  }
  target.validate();
}

CalibConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path);
  CalibConfig c;
  try {
    from_json(json::parse(in), c);
  } catch (const json::exception& e) {
    throw DataError("config " + path + ": " + e.what());
  }
  c.validate();
  return c;
}

}  // namespace holecalib
