#include "holecalib/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "holecalib/errors.hpp"
#include "holecalib/rng.hpp"

namespace holecalib {

namespace {

constexpr double kDeg = M_PI / 180.0;

// Stream tags keeping the noise of different quantities independent.
enum : std::uint64_t { kLidarRange = 1, kMarkerPixel = 2, kStereoDepth = 3, kStereoGray = 4 };

constexpr std::uint8_t kGrayBoard = 200;
constexpr std::uint8_t kGrayHole = 40;
constexpr std::uint8_t kGrayWall = 120;

std::uint64_t noise_key(const Scene& scene, std::uint64_t stream, int sensor, int pose,
                        int frame) {
  return derive_seed(scene.seed, {stream, static_cast<std::uint64_t>(sensor),
                                  static_cast<std::uint64_t>(pose),
                                  static_cast<std::uint64_t>(frame)});
}

void check_indices(const Scene& scene, int sensor, int pose, SensorKind kind) {
  if (sensor < 0 || sensor >= static_cast<int>(scene.sensors.size())) {
    throw DataError("sensor index out of range");
  }
  if (pose < 0 || pose >= static_cast<int>(scene.target_poses.size())) {
    throw DataError("pose index out of range");
  }
  if (scene.sensors[sensor].kind != kind) {
    throw DataError("sensor '" + scene.sensors[sensor].name + "' has the wrong kind");
  }
}

bool inside_hole(const TargetGeometry& g, double x, double y) {
  for (HoleLabel label : kHoleLabels) {
    const Point3d c = g.hole_center(label);
    const double dx = x - c.x();
    const double dy = y - c.y();
    if (dx * dx + dy * dy < g.hole_radius * g.hole_radius) return true;
  }
  return false;
}

}  // namespace

std::vector<double> LidarSpec::elevations() const {
  std::vector<double> out(static_cast<std::size_t>(layers));
  const double step = (vfov_max_deg - vfov_min_deg) / (layers - 1);
  for (int i = 0; i < layers; ++i) out[i] = (vfov_min_deg + step * i) * kDeg;
  return out;
}

int LidarSpec::azimuth_count() const {
  return static_cast<int>(std::lround(360.0 / azimuth_resolution_deg));
}

void LidarSpec::validate() const {
  if (layers < 2) throw DataError("a LiDAR needs at least two layers");
  if (!(azimuth_resolution_deg > 0)) throw DataError("azimuth resolution must be positive");
  if (!(vfov_max_deg > vfov_min_deg)) throw DataError("vertical field of view is empty");
  if (!(max_range > 0)) throw DataError("max range must be positive");
}

void Scene::validate() const {
  target.validate();
  if (target_poses.empty()) throw DataError("scene has no target poses");
  if (sensors.empty()) throw DataError("scene has no sensors");
  if (!(noise.k >= 0)) throw DataError("noise factor K must be non-negative");
  if (!(wall.standoff > 0 && wall.width > 0 && wall.height > 0)) {
    throw DataError("wall dimensions must be positive");
  }
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (sensors[i].name == sensors[j].name) throw DataError("duplicate sensor name " + sensors[i].name);
    }
    if (sensors[i].kind == SensorKind::Lidar) {
      sensors[i].lidar.validate();
    } else {
      sensors[i].camera.validate();
    }
  }
}

int Scene::sensor_index(const std::string& name) const {
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (sensors[i].name == name) return static_cast<int>(i);
  }
  throw DataError("unknown sensor '" + name + "'");
}

const SensorModel& Scene::sensor(const std::string& name) const {
  return sensors[static_cast<std::size_t>(sensor_index(name))];
}

SurfaceHit cast_ray(const Scene& scene, int pose, const Vec3d& origin, const Vec3d& dir,
                    double& distance) {
  const RigidTransformd board_from_world =
      (scene.target_poses[static_cast<std::size_t>(pose)] * board_in_target_frame()).inverse();
  const Vec3d o = board_from_world * origin;
  const Vec3d d = board_from_world.rotation() * dir;
  const TargetGeometry& g = scene.target;

  SurfaceHit hit = SurfaceHit::None;
  bool through_hole = false;
  if (d.z() != 0.0) {
    const double t = -o.z() / d.z();
    if (t > 0) {
      const Vec3d p = o + t * d;
      if (std::abs(p.x()) <= g.board_width / 2 && std::abs(p.y()) <= g.board_height / 2) {
        if (inside_hole(g, p.x(), p.y())) {
          through_hole = true;
        } else {
          hit = SurfaceHit::Board;
          distance = t;
        }
      }
    }
    const double tw = (-scene.wall.standoff - o.z()) / d.z();
    if (tw > 0 && (hit == SurfaceHit::None || tw < distance)) {
      const Vec3d p = o + tw * d;
      if (std::abs(p.x()) <= scene.wall.width / 2 && std::abs(p.y()) <= scene.wall.height / 2) {
        hit = through_hole ? SurfaceHit::Hole : SurfaceHit::Wall;
        distance = tw;
      }
    }
  }
  return hit;
}

PointCloud simulate_lidar_frame(const Scene& scene, int sensor, int pose, int frame,
                                std::vector<SurfaceHit>* surfaces) {
  check_indices(scene, sensor, pose, SensorKind::Lidar);
  const SensorModel& s = scene.sensors[static_cast<std::size_t>(sensor)];
  const std::vector<double> elevations = s.lidar.elevations();
  const int count = s.lidar.azimuth_count();
  const double az_step = 2.0 * M_PI / count;
  const CounterNormal noise(noise_key(scene, kLidarRange, sensor, pose, frame));
  const double sigma = scene.noise.k * scene.noise.sigma0_range;

  PointCloud cloud;
  cloud.azimuth_count = count;
  cloud.circular_rings = true;
  if (surfaces) surfaces->clear();
  for (int ring = 0; ring < s.lidar.layers; ++ring) {
    const double ce = std::cos(elevations[ring]);
    const double se = std::sin(elevations[ring]);
    for (int a = 0; a < count; ++a) {
      const double az = -M_PI + a * az_step;
      const Vec3d dir_body(ce * std::cos(az), ce * std::sin(az), se);
      double t = 0.0;
      const SurfaceHit hit =
          cast_ray(scene, pose, s.mount.translation(), s.mount.rotation() * dir_body, t);
      if (hit == SurfaceHit::None || t > s.lidar.max_range) continue;
      const std::uint64_t counter = static_cast<std::uint64_t>(ring) * count + a;
      const double range = sigma > 0 ? t + sigma * noise(counter) : t;
      cloud.points.push_back(dir_body * range);
      cloud.ring.push_back(ring);
      cloud.range.push_back(range);
      cloud.azimuth_index.push_back(a);
      if (surfaces) surfaces->push_back(hit);
    }
  }
  return cloud;
}

MarkerDetections simulate_marker_detections(const Scene& scene, int sensor, int pose,
                                            int frame) {
  check_indices(scene, sensor, pose, SensorKind::Monocular);
  const SensorModel& s = scene.sensors[static_cast<std::size_t>(sensor)];
  const RigidTransformd optical_from_board =
      (s.mount * optical_in_body()).inverse() * scene.target_poses[static_cast<std::size_t>(pose)] *
      board_in_target_frame();
  const CounterNormal noise(noise_key(scene, kMarkerPixel, sensor, pose, frame));
  const double sigma = scene.noise.k * scene.noise.sigma0_pixel;

  MarkerDetections out;
  out.frame = frame;
  for (int id = 0; id < 4; ++id) {
    const auto corners = scene.target.marker_corners(id);
    MarkerDetection det;
    det.id = id;
    bool visible = true;
    for (int c = 0; c < 4 && visible; ++c) {
      const Point3d p = optical_from_board * corners[c];
      if (p.z() <= 0) {
        visible = false;
        break;
      }
      Eigen::Vector2d uv = project_pinhole(s.camera, p);
      if (sigma > 0) {
        const std::uint64_t counter = static_cast<std::uint64_t>(id * 8 + c * 2);
        uv += sigma * Eigen::Vector2d(noise(counter), noise(counter + 1));
      }
      visible = s.camera.in_image(uv);
      det.corners[c] = uv;
    }
    if (visible) out.markers.push_back(det);
  }
  return out;
}

StereoFrame simulate_range_cloud(const Scene& scene, int sensor, int pose, int frame) {
  check_indices(scene, sensor, pose, SensorKind::StereoRange);
  const SensorModel& s = scene.sensors[static_cast<std::size_t>(sensor)];
  const CameraIntrinsics& k = s.camera;
  const RigidTransformd world_from_optical = s.mount * optical_in_body();
  const RigidTransformd body_from_optical = optical_in_body();
  const CounterNormal depth_noise(noise_key(scene, kStereoDepth, sensor, pose, frame));
  const CounterNormal gray_noise(noise_key(scene, kStereoGray, sensor, pose, frame));
  const double depth_sigma = scene.noise.k * scene.noise.sigma0_disparity / (k.fx * s.baseline);
  const double gray_sigma = scene.noise.k * scene.noise.sigma0_intensity;

  StereoFrame out;
  out.image = IntensityImage(k.width, k.height, 0);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3d dir_opt((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      double z = 0.0;
      const SurfaceHit hit = cast_ray(scene, pose, world_from_optical.translation(),
                                      world_from_optical.rotation() * dir_opt, z);
      const std::uint64_t counter = static_cast<std::uint64_t>(v) * k.width + u;
      double gray = 0.0;
      switch (hit) {
        case SurfaceHit::Board:
          gray = kGrayBoard;
          break;
        case SurfaceHit::Hole:
          gray = kGrayHole;
          break;
        case SurfaceHit::Wall:
          gray = kGrayWall;
          break;
        case SurfaceHit::None:
          break;
      }
      if (gray_sigma > 0) gray += gray_sigma * gray_noise(counter);
      out.image.at(u, v) = static_cast<std::uint8_t>(std::clamp(std::lround(gray), 0L, 255L));
      if (hit == SurfaceHit::None) continue;
      if (depth_sigma > 0) z += depth_sigma * z * z * depth_noise(counter);
      out.cloud.points.push_back(body_from_optical * (dir_opt * z));
      out.cloud.pixel.emplace_back(u, v);
    }
  }
  return out;
}

RigidTransformd ground_truth(const Scene& scene, int sensor_a, int sensor_b) {
  return scene.sensors.at(static_cast<std::size_t>(sensor_a)).mount.inverse() *
         scene.sensors.at(static_cast<std::size_t>(sensor_b)).mount;
}

std::array<Point3d, 4> true_hole_centers(const Scene& scene, int sensor, int pose) {
  const RigidTransformd sensor_from_target =
      scene.sensors.at(static_cast<std::size_t>(sensor)).mount.inverse() *
      scene.target_poses.at(static_cast<std::size_t>(pose));
  return target_hole_centers(sensor_from_target, scene.target);
}

PassThroughBounds target_passthrough(const Scene& scene, int sensor, int pose, double margin) {
  const TargetGeometry& g = scene.target;
  const RigidTransformd sensor_from_board =
      scene.sensors.at(static_cast<std::size_t>(sensor)).mount.inverse() *
      scene.target_poses.at(static_cast<std::size_t>(pose)) * board_in_target_frame();
  const double hx = g.centers_width / 2 + g.hole_radius + margin;
  const double hy = g.centers_height / 2 + g.hole_radius + margin;
  PassThroughBounds b;
  b.min = Vec3d::Constant(std::numeric_limits<double>::infinity());
  b.max = -b.min;
  for (int i = 0; i < 8; ++i) {
    const Point3d corner((i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? margin : -margin);
    const Point3d p = sensor_from_board * corner;
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

}  // namespace holecalib
