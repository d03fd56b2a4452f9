#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holecalib/cloud_filter.hpp"
#include "holecalib/mono_pose.hpp"
#include "holecalib/point_cloud.hpp"
#include "holecalib/target.hpp"

namespace holecalib {

enum class SensorKind { Lidar, Monocular, StereoRange };

struct LidarSpec {
  int layers = 16;
  double vfov_min_deg = -15.0;
  double vfov_max_deg = 15.0;
  double azimuth_resolution_deg = 0.2;
  double max_range = 100.0;

  /// Layer elevations in radians, evenly spaced from min to max.
  std::vector<double> elevations() const;
  int azimuth_count() const;
  void validate() const;
};

struct SensorModel {
  std::string name;
  SensorKind kind = SensorKind::Lidar;
  LidarSpec lidar;
  CameraIntrinsics camera;
  /// Stereo baseline, used only to scale depth noise.
  double baseline = 0.24;
  /// Sensor body frame (x forward, y left, z up) in the world frame.
  RigidTransformd mount;
};

struct NoiseModel {
  double k = 0.0;
  double sigma0_range = 0.008;
  double sigma0_pixel = 0.5;
  /// Disparity error in pixels; depth noise is k sigma z^2 / (f b).
  double sigma0_disparity = 0.2;
  /// Gray-level noise of the rendered intensity image.
  double sigma0_intensity = 0.007 * 255.0;
};

/// Finite wall parallel to the board, centered behind it.
struct WallModel {
  double standoff = 1.0;
  double width = 10.0;
  double height = 6.0;
};

struct Scene {
  TargetGeometry target;
  /// Target frames (x into the board, z up) in the world frame, one per pose.
  std::vector<RigidTransformd> target_poses;
  WallModel wall;
  std::vector<SensorModel> sensors;
  NoiseModel noise;
  std::uint64_t seed = 0;

  /// Throws DataError for invalid geometry, unknown indices or K < 0.
  void validate() const;
  const SensorModel& sensor(const std::string& name) const;
  int sensor_index(const std::string& name) const;
};

/// Hole: the wall, seen through one of the board's holes.
enum class SurfaceHit { None, Board, Hole, Wall };

/// Ray in world coordinates against the board (minus hole disks) and the wall
/// of one target pose. Returns the nearest positive hit distance along `dir`.
SurfaceHit cast_ray(const Scene& scene, int pose, const Vec3d& origin, const Vec3d& dir,
                    double& distance);

/// One revolution of a spinning LiDAR. Points carry ring, range and
/// azimuth_index; rays without a hit are omitted. `surfaces`, when given,
/// receives the surface of each returned point.
PointCloud simulate_lidar_frame(const Scene& scene, int sensor, int pose, int frame,
                                std::vector<SurfaceHit>* surfaces = nullptr);

/// Marker corners projected through the pinhole model with pixel jitter;
/// markers with a corner outside the image or behind the camera are dropped.
MarkerDetections simulate_marker_detections(const Scene& scene, int sensor, int pose, int frame);

/// Per-pixel ray cast giving an organized cloud in the camera body frame with
/// z^2-scaled depth noise, and an intensity image with distinct gray levels
/// for board, wall seen through a hole, and wall.
StereoFrame simulate_range_cloud(const Scene& scene, int sensor, int pose, int frame);

/// mount_a^-1 * mount_b: maps sensor-b points into sensor a.
RigidTransformd ground_truth(const Scene& scene, int sensor_a, int sensor_b);

/// Hole centers of one pose in a sensor's body frame.
std::array<Point3d, 4> true_hole_centers(const Scene& scene, int sensor, int pose);

/// Axis-aligned box around the hole region of the board (holes plus
/// `margin`, in-plane and in depth) in the sensor frame.
PassThroughBounds target_passthrough(const Scene& scene, int sensor, int pose,
                                     double margin = 0.12);

}  // namespace holecalib
