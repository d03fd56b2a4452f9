#include <gtest/gtest.h>

#include <map>
#include <set>

#include "holecalib/cloud_filter.hpp"
#include "holecalib/config.hpp"
#include "holecalib/extraction.hpp"
#include "holecalib/presets.hpp"
#include "holecalib/simulator.hpp"

namespace holecalib {
namespace {

PoseParamsd zeros() { return PoseParamsd::Zero(); }

Scene lidar_scene(const std::string& preset, const std::string& poses, double k = 0.0,
                  std::uint64_t seed = 1) {
  return make_pair_scene(preset, "blackfly", *mount_preset("p1"), *target_pose_preset(poses), k,
                         seed);
}

// Board plane and wall plane of one pose, in the sensor body frame.
std::pair<PlaneModeld, PlaneModeld> planes(const Scene& scene, int sensor, int pose) {
  const RigidTransformd t = scene.sensors[sensor].mount.inverse() * scene.target_poses[pose];
  const Vec3d n = t.rotation().col(0);
  return {PlaneModeld::through(t.translation(), n),
          PlaneModeld::through(t.translation() + scene.wall.standoff * n, n)};
}

TEST(CastRay, HoleBoardAndStandoff) {
  Scene scene = make_pair_scene("hdl64", "blackfly", zeros(), {(PoseParamsd() << 3, 0, 0, 0, 0, 0).finished()}, 0, 1);
  const auto holes = true_hole_centers(scene, 0, 0);
  double through = 0, beside = 0;
  const Vec3d dir_hole = holes[0].normalized();
  EXPECT_EQ(cast_ray(scene, 0, Vec3d::Zero(), dir_hole, through), SurfaceHit::Hole);
  const Vec3d dir_board = (holes[0] + Vec3d(0, 0, 0.1)).normalized();
  EXPECT_EQ(cast_ray(scene, 0, Vec3d::Zero(), dir_board, beside), SurfaceHit::Board);
  EXPECT_NEAR(through * dir_hole.x() - beside * dir_board.x(), scene.wall.standoff, 1e-12);
  double far = 0;
  EXPECT_EQ(cast_ray(scene, 0, Vec3d::Zero(), Vec3d(0.95, 0.3, 0).normalized(), far),
            SurfaceHit::Wall);
  EXPECT_EQ(cast_ray(scene, 0, Vec3d::Zero(), -Vec3d::UnitX(), far), SurfaceHit::None);
}

TEST(SimulateLidar, ZeroNoiseOnExactlyOnePlane) {
  const Scene scene = lidar_scene("hdl64", "single");
  for (int pose = 0; pose < 4; ++pose) {
    std::vector<SurfaceHit> surfaces;
    const PointCloud cloud = simulate_lidar_frame(scene, 0, pose, 0, &surfaces);
    ASSERT_EQ(surfaces.size(), cloud.size());
    ASSERT_GT(cloud.size(), 1000u);
    cloud.validate();
    const auto [board, wall] = planes(scene, 0, pose);
    std::map<SurfaceHit, int> counts;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const bool on_board = std::abs(board.signed_distance(cloud.points[i])) < 1e-9;
      const bool on_wall = std::abs(wall.signed_distance(cloud.points[i])) < 1e-9;
      EXPECT_NE(on_board, on_wall);
      EXPECT_EQ(on_board, surfaces[i] == SurfaceHit::Board);
      EXPECT_NEAR(cloud.range[i], cloud.points[i].norm(), 1e-9);
      ++counts[surfaces[i]];
    }
    EXPECT_GT(counts[SurfaceHit::Hole], 0) << "pose " << pose;
  }
}

TEST(SimulateLidar, AttributesAndDeterminism) {
  const Scene scene = lidar_scene("vlp16", "p1", 1.0, 7);
  const PointCloud a = simulate_lidar_frame(scene, 0, 0, 3);
  const PointCloud b = simulate_lidar_frame(scene, 0, 0, 3);
  const PointCloud c = simulate_lidar_frame(scene, 0, 0, 4);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.range, c.range);
  EXPECT_TRUE(a.circular_rings);
  EXPECT_EQ(a.azimuth_count, 1800);
  std::set<int> rings(a.ring.begin(), a.ring.end());
  EXPECT_LE(rings.size(), 16u);
  for (int idx : a.azimuth_index) {
    EXPECT_GE(idx, 0);
    EXPECT_LT(idx, 1800);
  }
}

TEST(SimulateLidar, RangeNoiseScale) {
  const Scene clean = lidar_scene("hdl64", "p1", 0.0, 9);
  const Scene noisy = lidar_scene("hdl64", "p1", 2.0, 9);
  const PointCloud a = simulate_lidar_frame(clean, 0, 0, 0);
  const PointCloud b = simulate_lidar_frame(noisy, 0, 0, 0);
  ASSERT_EQ(a.size(), b.size());
  double sum_sq = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum_sq += std::pow(b.range[i] - a.range[i], 2);
  const double sigma = std::sqrt(sum_sq / a.size());
  EXPECT_NEAR(sigma, 2.0 * 0.008, 0.05 * 0.016);
}

// Board points whose in-ring neighbor (azimuth +-1) lies beyond the board.
std::vector<bool> border_oracle(const PointCloud& cloud, const std::vector<SurfaceHit>& s) {
  std::map<std::pair<int, int>, std::size_t> index;
  for (std::size_t i = 0; i < cloud.size(); ++i) index[{cloud.ring[i], cloud.azimuth_index[i]}] = i;
  std::vector<bool> out(cloud.size(), false);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (s[i] != SurfaceHit::Board) continue;
    for (int step : {-1, 1}) {
      const int a = (cloud.azimuth_index[i] + step + cloud.azimuth_count) % cloud.azimuth_count;
      const auto it = index.find({cloud.ring[i], a});
      if (it != index.end() && s[it->second] != SurfaceHit::Board) out[i] = true;
    }
  }
  return out;
}

TEST(SimulateLidar, DiscontinuitiesOnlyAtBorders) {
  const Scene scene = lidar_scene("hdl64", "single");
  for (int pose = 0; pose < 4; ++pose) {
    std::vector<SurfaceHit> surfaces;
    const PointCloud cloud = simulate_lidar_frame(scene, 0, pose, 0, &surfaces);
    const PointCloud edges = lidar_edge_filter(assign_discontinuity(cloud), CalibConfig{}.delta_discont_lidar);
    const auto oracle = border_oracle(cloud, surfaces);
    std::set<std::pair<int, int>> kept;
    for (std::size_t i = 0; i < edges.size(); ++i) kept.insert({edges.ring[i], edges.azimuth_index[i]});
    int expected = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const bool in = kept.count({cloud.ring[i], cloud.azimuth_index[i]}) > 0;
      EXPECT_EQ(in, oracle[i]) << "pose " << pose << " ring " << cloud.ring[i] << " az "
                               << cloud.azimuth_index[i];
      expected += oracle[i];
    }
    EXPECT_GT(expected, 0);
  }
}

int rings_crossing_hole(const Scene& scene, int pose, int hole) {
  std::vector<SurfaceHit> surfaces;
  const PointCloud cloud = simulate_lidar_frame(scene, 0, pose, 0, &surfaces);
  const auto centers = true_hole_centers(scene, 0, pose);
  std::set<int> rings;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (surfaces[i] != SurfaceHit::Hole) continue;
    // Attribute a see-through return to the hole nearest in bearing.
    int nearest = 0;
    double best = 1e9;
    for (int k = 0; k < 4; ++k) {
      const double a = std::acos(std::min(1.0, cloud.points[i].normalized().dot(centers[k].normalized())));
      if (a < best) {
        best = a;
        nearest = k;
      }
    }
    if (nearest == hole) rings.insert(cloud.ring[i]);
  }
  return static_cast<int>(rings.size());
}

TEST(SimulateLidar, SixteenLayersMissHolesAtFarPlacements) {
  const Scene sparse = lidar_scene("vlp16", "single");
  const Scene dense = lidar_scene("hdl64", "single");
  for (int pose : {2, 3}) {
    for (int hole = 0; hole < 4; ++hole) {
      EXPECT_LT(rings_crossing_hole(sparse, pose, hole), 2) << "pose " << pose << " hole " << hole;
      EXPECT_GE(rings_crossing_hole(dense, pose, hole), 2) << "pose " << pose << " hole " << hole;
    }
  }

  const CalibConfig config;
  for (int pose : {2, 3}) {
    ExtractionContext ctx;
    ctx.bounds = target_passthrough(sparse, 0, pose);
    for (int frame = 0; frame < 5; ++frame) {
      const FrameOutcome out = extract_frame(
          SensorFrame(simulate_lidar_frame(sparse, 0, pose, frame)), frame, config, ctx);
      EXPECT_FALSE(out.success());
    }
  }
}

TEST(SimulateMarkers, ZeroNoiseReprojectsExactly) {
  const Scene scene =
      make_pair_scene("hdl64", "blackfly", zeros(), {(PoseParamsd() << 3, 0, 0, 0, 0, 0).finished()}, 0, 1);
  const MarkerDetections d = simulate_marker_detections(scene, 1, 0, 0);
  ASSERT_EQ(d.markers.size(), 4u);
  const RigidTransformd truth =
      optical_in_body().inverse() * scene.target_poses[0] * board_in_target_frame();
  Eigen::VectorXd r;
  reprojection_residuals(truth, d, scene.sensors[1].camera, scene.target, r);
  EXPECT_LT(r.norm(), 1e-9);
}

TEST(SimulateMarkers, BehindCameraIsEmpty) {
  const Scene scene = make_pair_scene("hdl64", "blackfly", zeros(),
                                      {(PoseParamsd() << -3, 0, 0, 0, 0, 0).finished()}, 1, 1);
  EXPECT_TRUE(simulate_marker_detections(scene, 1, 0, 0).markers.empty());
}

TEST(SimulateMarkers, JitterStatistics) {
  const auto pose = (PoseParamsd() << 3, 0, 0, 0, 0, 0).finished();
  const Scene clean = make_pair_scene("hdl64", "blackfly", zeros(), {pose}, 0, 5);
  const Scene noisy = make_pair_scene("hdl64", "blackfly", zeros(), {pose}, 2, 5);
  const MarkerDetections ref = simulate_marker_detections(clean, 1, 0, 0);
  double chi2 = 0;
  int n = 0;
  const double sigma = 2 * noisy.noise.sigma0_pixel;
  for (int frame = 0; frame < 1000; ++frame) {
    const MarkerDetections d = simulate_marker_detections(noisy, 1, 0, frame);
    ASSERT_EQ(d.markers.size(), 4u);
    for (int m = 0; m < 4; ++m) {
      for (int c = 0; c < 4; ++c) {
        const Eigen::Vector2d e = d.markers[m].corners[c] - ref.markers[m].corners[c];
        chi2 += e.squaredNorm() / (sigma * sigma);
        n += 2;
      }
    }
  }
  // chi-squared with n degrees of freedom: mean n, std sqrt(2n).
  EXPECT_LT(std::abs(chi2 - n), 4 * std::sqrt(2.0 * n));
}

Scene stereo_scene(double distance, double k) {
  return make_pair_scene("hdl64", "bumblebee", zeros(),
                         {(PoseParamsd() << distance, 0, 0, 0, 0, 0).finished()}, k, 3);
}

TEST(SimulateRange, ZeroNoiseBoardOnPlaneAndHolesAtWall) {
  const Scene scene = stereo_scene(2.5, 0);
  const StereoFrame f = simulate_range_cloud(scene, 1, 0, 0);
  ASSERT_EQ(f.cloud.size(), f.cloud.pixel.size());
  const auto [board, wall] = planes(scene, 1, 0);
  int board_n = 0, hole_n = 0;
  for (std::size_t i = 0; i < f.cloud.size(); ++i) {
    const int u = static_cast<int>(f.cloud.pixel[i].x());
    const int v = static_cast<int>(f.cloud.pixel[i].y());
    const std::uint8_t gray = f.image.at(u, v);
    if (gray == 200) {
      EXPECT_LT(std::abs(board.signed_distance(f.cloud.points[i])), 1e-9);
      ++board_n;
    } else if (gray == 40) {
      EXPECT_LT(std::abs(wall.signed_distance(f.cloud.points[i])), 1e-9);
      ++hole_n;
    }
  }
  EXPECT_GT(board_n, 1000);
  EXPECT_GT(hole_n, 100);
}

double depth_noise_variance(double distance) {
  const StereoFrame clean = simulate_range_cloud(stereo_scene(distance, 0), 1, 0, 0);
  const StereoFrame noisy = simulate_range_cloud(stereo_scene(distance, 1), 1, 0, 0);
  double sum_sq = 0;
  int n = 0;
  for (std::size_t i = 0; i < clean.cloud.size(); ++i) {
    const auto& px = clean.cloud.pixel[i];
    if (clean.image.at(static_cast<int>(px.x()), static_cast<int>(px.y())) != 200) continue;
    sum_sq += std::pow(noisy.cloud.points[i].x() - clean.cloud.points[i].x(), 2);
    ++n;
  }
  return sum_sq / n;
}

TEST(SimulateRange, DepthNoiseGrowsWithDistanceSquared) {
  const double near = depth_noise_variance(2.0);
  const double far = depth_noise_variance(4.0);
  EXPECT_GE(far, 4 * near);
  EXPECT_NEAR(far / near, 16.0, 1.6);
}

TEST(GroundTruth, Examples) {
  Scene same = make_pair_scene("hdl64", "blackfly", zeros(), *target_pose_preset("p1"), 0, 1);
  const RigidTransformd id = ground_truth(same, 0, 1);
  EXPECT_LT(linear_error(id, RigidTransformd::identity()), 1e-15);
  EXPECT_LT(angular_error(id, RigidTransformd::identity()), 1e-15);

  const PoseParamsd p1 = *mount_preset("p1");
  const Scene scene = make_pair_scene("hdl64", "blackfly", p1, *target_pose_preset("p1"), 0, 1);
  EXPECT_LT((ground_truth(scene, 0, 1).params() - p1).norm(), 1e-12);
  EXPECT_NEAR(p1.head<3>().norm(), 0.41231, 5e-6);
  const RigidTransformd ab = ground_truth(scene, 0, 1);
  const RigidTransformd ba = ground_truth(scene, 1, 0);
  EXPECT_LT((ab.matrix() - ba.inverse().matrix()).norm(), 1e-12);
}

TEST(Presets, SensorModels) {
  for (const auto& name : sensor_preset_names()) ASSERT_TRUE(sensor_preset(name, name));
  EXPECT_FALSE(sensor_preset("nope", "x"));
  const SensorModel v16 = *sensor_preset("vlp16", "a");
  EXPECT_EQ(v16.lidar.layers, 16);
  EXPECT_DOUBLE_EQ(v16.lidar.vfov_min_deg, -15.0);
  EXPECT_DOUBLE_EQ(v16.lidar.vfov_max_deg, 15.0);
  EXPECT_EQ(sensor_preset("hdl32", "a")->lidar.layers, 32);
  EXPECT_EQ(sensor_preset("hdl64", "a")->lidar.layers, 64);
  for (const char* n : {"vlp16", "hdl32", "hdl64"}) {
    EXPECT_DOUBLE_EQ(sensor_preset(n, "a")->lidar.azimuth_resolution_deg, 0.2);
  }
  const SensorModel bf = *sensor_preset("blackfly", "a");
  EXPECT_EQ(bf.kind, SensorKind::Monocular);
  EXPECT_EQ(bf.camera.width, 2048);
  EXPECT_EQ(bf.camera.height, 1536);
  EXPECT_NEAR(2 * std::atan(1023.5 / bf.camera.fx + 0.5 / bf.camera.fx), 85.0 * M_PI / 180, 1e-12);
  EXPECT_EQ(sensor_preset("bumblebee", "a")->kind, SensorKind::StereoRange);

  LidarSpec bad;
  bad.layers = 1;
  EXPECT_THROW(bad.validate(), DataError);
  bad = {};
  bad.azimuth_resolution_deg = 0;
  EXPECT_THROW(bad.validate(), DataError);
  const auto e = LidarSpec{}.elevations();
  ASSERT_EQ(e.size(), 16u);
  EXPECT_NEAR(e.front(), -15.0 * M_PI / 180, 1e-15);
  EXPECT_NEAR(e.back(), 15.0 * M_PI / 180, 1e-15);
}

TEST(Presets, PosesAndMounts) {
  EXPECT_EQ(target_pose_preset("single")->size(), 4u);
  EXPECT_EQ(target_pose_preset("multi5")->size(), 5u);
  EXPECT_EQ(target_pose_preset("p3")->front(), target_pose_preset("single")->at(2));
  EXPECT_FALSE(target_pose_preset("p5"));
  EXPECT_FALSE(mount_preset("p4"));
}

TEST(Scene, Validation) {
  Scene scene = lidar_scene("hdl64", "p1");
  EXPECT_NO_THROW(scene.validate());
  EXPECT_EQ(scene.sensor_index("camera"), 1);
  EXPECT_THROW(scene.sensor("missing"), DataError);
  scene.noise.k = -1;
  EXPECT_THROW(scene.validate(), DataError);
  scene = lidar_scene("hdl64", "p1");
  scene.target_poses.clear();
  EXPECT_THROW(scene.validate(), DataError);
  scene = lidar_scene("hdl64", "p1");
  EXPECT_THROW(simulate_marker_detections(scene, 0, 0, 0), DataError);
  EXPECT_THROW(simulate_lidar_frame(scene, 1, 0, 0), DataError);
  EXPECT_THROW(simulate_lidar_frame(scene, 0, 3, 0), DataError);
}

}  // namespace
}  // namespace holecalib
