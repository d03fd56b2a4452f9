#include "holecalib/presets.hpp"

#include <cmath>

#include "holecalib/errors.hpp"

namespace holecalib {

namespace {

LidarSpec lidar(int layers, double vmin, double vmax) {
  LidarSpec s;
  s.layers = layers;
  s.vfov_min_deg = vmin;
  s.vfov_max_deg = vmax;
  s.azimuth_resolution_deg = 0.2;
  s.max_range = 100.0;
  return s;
}

// Square pixels, principal point at the image center.
CameraIntrinsics camera(int width, int height, double hfov_deg) {
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.fx = k.fy = (width / 2.0) / std::tan(hfov_deg * M_PI / 360.0);
  k.cx = (width - 1) / 2.0;
  k.cy = (height - 1) / 2.0;
  return k;
}

PoseParamsd params(double x, double y, double z, double roll, double pitch, double yaw) {
  PoseParamsd p;
  p << x, y, z, roll, pitch, yaw;
  return p;
}

}  // namespace

std::vector<std::string> sensor_preset_names() {
  return {"vlp16", "hdl32", "hdl64", "blackfly", "bumblebee"};
}

std::optional<SensorModel> sensor_preset(std::string_view preset, const std::string& name) {
  SensorModel s;
  s.name = name;
  if (preset == "vlp16") {
    s.lidar = lidar(16, -15.0, 15.0);
  } else if (preset == "hdl32") {
    s.lidar = lidar(32, -30.67, 10.67);
  } else if (preset == "hdl64") {
    s.lidar = lidar(64, -24.9, 2.0);
  } else if (preset == "blackfly") {
    s.kind = SensorKind::Monocular;
    s.camera = camera(2048, 1536, 85.0);
  } else if (preset == "bumblebee") {
    s.kind = SensorKind::StereoRange;
    s.camera = camera(1280, 960, 43.0);
    s.baseline = 0.24;
  } else {
    return std::nullopt;
  }
  return s;
}

std::optional<std::vector<PoseParamsd>> target_pose_preset(std::string_view preset) {
  const std::vector<PoseParamsd> single = {
      params(2.0, 0.0, -0.5, 0.0, 0.0, 0.0),
      params(3.63, -0.5, -0.28, 0.8, 0.0, 0.0),
      params(5.38, -0.1, -0.5, 0.0, -0.2, 0.0),
      params(6.5, -1.39, -1.43, 0.0, 0.0, -0.4),
  };
  if (preset == "single") return single;
  if (preset.size() == 2 && preset[0] == 'p' && preset[1] >= '1' && preset[1] <= '4') {
    return std::vector<PoseParamsd>{single[static_cast<std::size_t>(preset[1] - '1')]};
  }
  if (preset == "multi5") {
    return std::vector<PoseParamsd>{
        params(2.0, 0.0, -0.4, 0.0, 0.0, 0.0),
        params(3.0, 1.0, -0.5, 0.0, 0.0, 0.25),
        params(3.5, -1.2, -0.8, 0.1, 0.0, -0.25),
        params(4.5, 0.6, -1.0, 0.0, 0.15, 0.1),
        params(2.5, -0.4, -0.3, -0.15, 0.0, -0.15),
    };
  }
  return std::nullopt;
}

std::optional<PoseParamsd> mount_preset(std::string_view preset) {
  if (preset == "p1") return params(-0.3, 0.2, -0.2, 0.3, -0.1, 0.2);
  if (preset == "p2") return params(-0.128, 0.418, -0.314, -0.103, -0.299, 0.110);
  if (preset == "p3") return params(-0.433, 0.845, 1.108, -0.672, 0.258, 0.075);
  return std::nullopt;
}

Scene make_pair_scene(const std::string& lidar_preset, const std::string& camera_preset,
                      const PoseParamsd& mount, const std::vector<PoseParamsd>& poses,
                      double k, std::uint64_t seed) {
  Scene scene;
  auto a = sensor_preset(lidar_preset, "lidar");
  auto b = sensor_preset(camera_preset, "camera");
  if (!a || !b) throw DataError("unknown sensor preset");
  b->mount = RigidTransformd::from_params(mount);
  scene.sensors = {*a, *b};
  for (const auto& p : poses) scene.target_poses.push_back(RigidTransformd::from_params(p));
  scene.noise.k = k;
  scene.seed = seed;
  scene.validate();
  return scene;
}

}  // namespace holecalib
