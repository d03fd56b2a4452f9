// Acceptance checks: one PASS/FAIL line per criterion with the measured values.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "holecalib/calibration.hpp"
#include "holecalib/cloud_filter.hpp"
#include "holecalib/io.hpp"
#include "holecalib/presets.hpp"
#include "holecalib/registration.hpp"
#include "holecalib/report.hpp"
#include "holecalib/rng.hpp"

using namespace holecalib;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RigidTransformd random_transform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> t(-5, 5), a(-M_PI, M_PI), p(-1.5, 1.5);
  return RigidTransformd::from_params(t(rng), t(rng), t(rng), a(rng), p(rng), a(rng));
}

Eigen::Matrix3Xd apply_all(const RigidTransformd& t, const Eigen::Matrix3Xd& pts) {
  Eigen::Matrix3Xd out(3, pts.cols());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) out.col(i) = t * Vec3d(pts.col(i));
  return out;
}

Outcome umeyama_oracle() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst_t = 0, worst_r = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const RigidTransformd truth = random_transform(rng);
    Eigen::Matrix3Xd y(3, 8);
    for (int i = 0; i < 8; ++i) y.col(i) = Vec3d(u(rng), u(rng), u(rng));
    const RigidTransformd est = umeyama_rigid(apply_all(truth, y), y);
    worst_t = std::max(worst_t, linear_error(est, truth));
    worst_r = std::max(worst_r, angular_error(est, truth));
  }
  double worst_det = 0, worst_rmse = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const RigidTransformd truth = random_transform(rng);
    const auto rect = target_hole_centers(random_transform(rng), TargetGeometry{});
    Eigen::Matrix3Xd y(3, 4);
    for (int k = 0; k < 4; ++k) y.col(k) = rect[k];
    const Eigen::Matrix3Xd x = apply_all(truth, y);
    const RigidTransformd est = umeyama_rigid(x, y);
    worst_det = std::max(worst_det, std::abs(est.rotation().determinant() - 1));
    double sq = 0;
    for (int k = 0; k < 4; ++k) sq += (Vec3d(x.col(k)) - est * Vec3d(y.col(k))).squaredNorm();
    worst_rmse = std::max(worst_rmse, std::sqrt(sq / 4));
  }
  return {worst_t < 1e-9 && worst_r < 1e-9 && worst_det < 1e-12 && worst_rmse < 1e-9,
          "max e_t " + fmt("%.2e", worst_t) + " m, max e_r " + fmt("%.2e", worst_r) +
              " rad; coplanar max |det-1| " + fmt("%.1e", worst_det) + ", max rmse " +
              fmt("%.1e", worst_rmse) + " m"};
}

PointCloud ring_cloud(const std::vector<double>& ranges) {
  PointCloud c;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    c.points.emplace_back(ranges[i], 0.0, 0.0);
    c.ring.push_back(0);
    c.range.push_back(ranges[i]);
    c.azimuth_index.push_back(static_cast<int>(i));
  }
  c.azimuth_count = 1800;
  return c;
}

// Board returns with an in-ring neighbor (azimuth +-1) that lies beyond the board.
std::set<std::pair<int, int>> border_points(const PointCloud& cloud,
                                            const std::vector<SurfaceHit>& surfaces) {
  std::map<std::pair<int, int>, SurfaceHit> by_key;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    by_key[{cloud.ring[i], cloud.azimuth_index[i]}] = surfaces[i];
  }
  std::set<std::pair<int, int>> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (surfaces[i] != SurfaceHit::Board) continue;
    for (int step : {-1, 1}) {
      const int a = (cloud.azimuth_index[i] + step + cloud.azimuth_count) % cloud.azimuth_count;
      const auto it = by_key.find({cloud.ring[i], a});
      if (it != by_key.end() && it->second != SurfaceHit::Board) {
        out.insert({cloud.ring[i], cloud.azimuth_index[i]});
      }
    }
  }
  return out;
}

Outcome discontinuity_exactness() {
  const auto g1 = depth_discontinuity(ring_cloud({5.0, 2.0, 5.0}));
  const auto g2 = depth_discontinuity(ring_cloud({2.0, 5.0, 2.0}));
  const auto g3 = depth_discontinuity(ring_cloud({3.0, 3.0, 3.0, 3.0}));
  const bool hand = g1 == std::vector<double>{0.0, 3.0, 0.0} &&
                    g2 == std::vector<double>{3.0, 0.0, 3.0} &&
                    g3 == std::vector<double>(4, 0.0);

  int frames = 0, mismatched = 0;
  std::size_t kept_total = 0;
  const CalibConfig config;
  for (const char* lidar : {"hdl64", "vlp16"}) {
    const Scene scene = make_pair_scene(lidar, "blackfly", *mount_preset("p1"),
                                        *target_pose_preset("single"), 0, 1);
    for (int pose = 0; pose < 4; ++pose) {
      std::vector<SurfaceHit> surfaces;
      const PointCloud cloud = simulate_lidar_frame(scene, 0, pose, 0, &surfaces);
      const PointCloud edges =
          lidar_edge_filter(assign_discontinuity(cloud), config.delta_discont_lidar);
      std::set<std::pair<int, int>> kept;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        kept.insert({edges.ring[i], edges.azimuth_index[i]});
      }
      mismatched += kept != border_points(cloud, surfaces);
      kept_total += kept.size();
      ++frames;
    }
  }
  return {hand && mismatched == 0 && kept_total > 0,
          std::string("hand examples ") + (hand ? "exact" : "MISMATCH") + "; " +
              std::to_string(frames - mismatched) + "/" + std::to_string(frames) +
              " zero-noise frames keep exactly the border set (" + std::to_string(kept_total) +
              " points)"};
}

MarkerDetections project_markers(const RigidTransformd& pose, const CameraIntrinsics& k,
                                 const TargetGeometry& g) {
  MarkerDetections d;
  for (int id = 0; id < 4; ++id) {
    MarkerDetection m;
    m.id = id;
    const auto corners = g.marker_corners(id);
    for (int c = 0; c < 4; ++c) m.corners[c] = project_pinhole(k, pose * corners[c]);
    d.markers.push_back(m);
  }
  return d;
}

Outcome lm_correctness() {
  const CameraIntrinsics k;
  const TargetGeometry g;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  auto random_facing = [&] {
    return RigidTransformd(euler_to_rotation(0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng)) *
                               rot_x(M_PI),
                           Vec3d(0.5 * u(rng), 0.5 * u(rng), 3 + u(rng)));
  };
  double worst_rel = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransformd truth = random_facing();
    const MarkerDetections d = project_markers(truth, k, g);
    Eigen::Matrix<double, 6, 1> offset;
    for (int i = 0; i < 6; ++i) offset(i) = 0.05 * u(rng);
    const RigidTransformd pose = apply_pose_increment(truth, offset);
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    reprojection_residuals(pose, d, k, g, r, &j);
    const double h = 1e-6;
    for (int c = 0; c < 6; ++c) {
      Eigen::Matrix<double, 6, 1> step = Eigen::Matrix<double, 6, 1>::Zero();
      step(c) = h;
      Eigen::VectorXd rp, rm;
      reprojection_residuals(apply_pose_increment(pose, step), d, k, g, rp);
      reprojection_residuals(apply_pose_increment(pose, -step), d, k, g, rm);
      const Eigen::VectorXd fd = (rp - rm) / (2 * h);
      worst_rel = std::max(worst_rel, (fd - j.col(c)).norm() / std::max(1.0, j.col(c).norm()));
    }
  }
  double worst_t = 0, worst_r = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransformd truth = random_facing();
    const RigidTransformd init =
        RigidTransformd::from_params(0.05 * u(rng), 0.05 * u(rng), 0.05 * u(rng), 0.05 * u(rng),
                                     0.05 * u(rng), 0.05 * u(rng)) *
        truth;
    const BoardPose est = refine_board_pose_lm(init, project_markers(truth, k, g), k, g);
    worst_t = std::max(worst_t, linear_error(est.camera_from_board, truth));
    worst_r = std::max(worst_r, angular_error(est.camera_from_board, truth));
  }
  return {worst_rel < 1e-5 && worst_t < 1e-4 && worst_r < 1e-4,
          "Jacobian max rel. deviation " + fmt("%.2e", worst_rel) + "; recovery max e_t " +
              fmt("%.2e", worst_t) + " m, max e_r " + fmt("%.2e", worst_r) + " rad"};
}

std::shared_ptr<const Scene> hdl64_mono(const std::vector<PoseParamsd>& poses, double k,
                                        std::uint64_t seed) {
  return std::make_shared<const Scene>(
      make_pair_scene("hdl64", "blackfly", *mount_preset("p1"), poses, k, seed));
}

Metrics run_pair(const std::shared_ptr<const Scene>& scene, std::uint64_t seed, int n = 30) {
  CalibConfig config;
  config.frames = n;
  config.seed = seed;
  const CalibrationResult r =
      calibrate(SimulatedSource(scene, 0, n), SimulatedSource(scene, 1, n), config);
  return evaluate_transform(r.transform, ground_truth(*scene, 0, 1));
}

Outcome zero_noise_end_to_end() {
  const Metrics m = run_pair(hdl64_mono(*target_pose_preset("multi5"), 0, 1), 1);
  return {m.e_t <= 0.01 && m.e_r <= 0.01,
          "HDL-64/mono, mount P1, M=5, N=30, K=0: e_t " + fmt("%.4f", m.e_t) + " m, e_r " +
              fmt("%.4f", m.e_r) + " rad"};
}

Outcome multi_pose_decay() {
  const auto poses = *target_pose_preset("multi5");
  double m1_t = 0, m1_r = 0, m5_t = 0, m5_r = 0;
  int m1_runs = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (const auto& pose : poses) {
      const Metrics m = run_pair(hdl64_mono({pose}, 1, seed), seed);
      m1_t += m.e_t * m.e_t;
      m1_r += m.e_r * m.e_r;
      ++m1_runs;
    }
    const Metrics m = run_pair(hdl64_mono(poses, 1, seed), seed);
    m5_t += m.e_t * m.e_t;
    m5_r += m.e_r * m.e_r;
  }
  const double rt1 = std::sqrt(m1_t / m1_runs), rr1 = std::sqrt(m1_r / m1_runs);
  const double rt5 = std::sqrt(m5_t / 3), rr5 = std::sqrt(m5_r / 3);
  return {rt5 <= 0.5 * rt1 && rr5 <= 0.5 * rr1,
          "K=1, 3 seeds: RMSE e_t " + fmt("%.2f", rt1 * 1e3) + " -> " + fmt("%.2f", rt5 * 1e3) +
              " mm (" + fmt("%.0f", 100 * rt5 / rt1) + "%), RMSE e_r " + fmt("%.2f", rr1 * 1e3) +
              " -> " + fmt("%.2f", rr5 * 1e3) + " mrad (" + fmt("%.0f", 100 * rr5 / rr1) +
              "%); M=1 over all 5 single poses"};
}

// Single-frame reference points of one sensor at one pose: errors against truth.
std::vector<Vec3d> frame_errors(const Scene& scene, int sensor, int pose, int frames,
                                int* rejected = nullptr) {
  const CalibConfig config;
  ExtractionContext ctx;
  ctx.bounds = target_passthrough(scene, sensor, pose);
  const auto truth = true_hole_centers(scene, sensor, pose);
  std::vector<Vec3d> out;
  if (rejected) *rejected = 0;
  for (int f = 0; f < frames; ++f) {
    ctx.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(pose),
                                         static_cast<std::uint64_t>(f)});
    const FrameOutcome o =
        extract_frame(SensorFrame(simulate_lidar_frame(scene, sensor, pose, f)), f, config, ctx);
    if (!o.success()) {
      if (rejected) ++*rejected;
      continue;
    }
    for (int k = 0; k < 4; ++k) out.push_back(o.points->centers[k] - truth[k]);
  }
  return out;
}

Outcome clustering_benefit() {
  // Per-axis single-frame spread of the HDL-64 at P1 with K=1 sets the blob noise.
  const Scene scene = make_pair_scene("hdl64", "blackfly", *mount_preset("p1"),
                                      *target_pose_preset("p1"), 1, 5);
  const auto errors = frame_errors(scene, 0, 0, 30);
  Vec3d mean = Vec3d::Zero();
  for (const auto& e : errors) mean += e;
  mean /= static_cast<double>(errors.size());
  Vec3d var = Vec3d::Zero();
  for (const auto& e : errors) var += (e - mean).cwiseAbs2();
  const Vec3d sigma = (var / static_cast<double>(errors.size() - 1)).cwiseSqrt();

  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01(0, 1);
  const auto truth = true_hole_centers(scene, 0, 0);
  const int n = 30;
  int better = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point3d> cloud;
    double single_sq = 0;
    for (int f = 0; f < n; ++f) {
      for (int k = 0; k < 4; ++k) {
        const Vec3d e(sigma.x() * n01(rng), sigma.y() * n01(rng), sigma.z() * n01(rng));
        cloud.push_back(truth[k] + e);
        single_sq += e.squaredNorm();
      }
    }
    const auto clusters = euclidean_cluster(cloud, ClusterParams::for_successes(n));
    double centroid_sq = 0;
    try {
      const auto centers = consolidate_centers(clusters);
      for (const auto& c : centers) {
        double best = 1e9;
        for (const auto& t : truth) best = std::min(best, (c - t).squaredNorm());
        centroid_sq += best;
      }
    } catch (const PoseRejected&) {
      continue;
    }
    if (std::sqrt(centroid_sq / 4) <= std::sqrt(single_sq / (4.0 * n))) ++better;
  }
  return {better >= 95, "blob sigma (" + fmt("%.1f", sigma.x() * 1e3) + ", " +
                            fmt("%.1f", sigma.y() * 1e3) + ", " + fmt("%.1f", sigma.z() * 1e3) +
                            ") mm: centroid RMSE <= single-frame RMSE in " +
                            std::to_string(better) + "/100 trials"};
}

Outcome sixteen_layer_failure() {
  const Scene scene = make_pair_scene("vlp16", "blackfly", *mount_preset("p1"),
                                      *target_pose_preset("single"), 1, 7);
  const CalibConfig config;
  int total = 0, rejected = 0;
  std::map<RejectReason, int> reasons;
  for (int pose : {2, 3}) {
    ExtractionContext ctx;
    ctx.bounds = target_passthrough(scene, 0, pose);
    for (int f = 0; f < config.frames; ++f) {
      ctx.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(pose),
                                           static_cast<std::uint64_t>(f)});
      const FrameOutcome o =
          extract_frame(SensorFrame(simulate_lidar_frame(scene, 0, pose, f)), f, config, ctx);
      ++total;
      if (!o.success()) {
        ++rejected;
        ++reasons[*o.rejection];
      }
    }
  }
  std::string why;
  for (const auto& [reason, count] : reasons) {
    why += std::string(why.empty() ? "" : ", ") + std::string(to_string(reason)) + " " +
           std::to_string(count);
  }
  return {rejected == total, "VLP-16 at P3/P4, K=1: " + std::to_string(rejected) + "/" +
                                 std::to_string(total) + " frames rejected (" + why + ")"};
}

Outcome noise_trend() {
  // Euclidean single-frame errors pooled over P1 and P2 for each K.
  std::vector<double> means, stds;
  for (double k : {0.0, 1.0, 2.0}) {
    const Scene scene = make_pair_scene("hdl64", "blackfly", *mount_preset("p1"),
                                        *target_pose_preset("single"), k, 11);
    std::vector<double> norms;
    for (int pose : {0, 1}) {
      for (const auto& e : frame_errors(scene, 0, pose, 30)) norms.push_back(e.norm());
    }
    const double n = static_cast<double>(norms.size());
    double sum = 0, sq = 0;
    for (double v : norms) sum += v;
    const double mean = n > 0 ? sum / n : INFINITY;
    for (double v : norms) sq += (v - mean) * (v - mean);
    means.push_back(mean);
    stds.push_back(n > 1 ? std::sqrt(sq / (n - 1)) : 0.0);
  }
  const double ratio = means[2] / means[0];
  return {ratio < 3 && stds[0] < stds[1] && stds[1] < stds[2],
          "HDL-64 P1+P2 single-frame error mean " + fmt("%.2f", means[0] * 1e3) + "/" +
              fmt("%.2f", means[1] * 1e3) + "/" + fmt("%.2f", means[2] * 1e3) + " mm, std " +
              fmt("%.2f", stds[0] * 1e3) + "/" + fmt("%.2f", stds[1] * 1e3) + "/" +
              fmt("%.2f", stds[2] * 1e3) + " mm (K=0/1/2), K2/K0 " + fmt("%.2f", ratio)};
}

std::string result_text(const std::shared_ptr<const Scene>& scene, int workers) {
  CalibConfig config;
  config.frames = 10;
  config.seed = 21;
  config.workers = workers;
  std::ostringstream out;
  write_result(out, calibrate(SimulatedSource(scene, 0, 10), SimulatedSource(scene, 1, 10), config),
               config);
  return out.str();
}

Outcome determinism() {
  const auto scene = hdl64_mono(*target_pose_preset("multi5"), 1, 9);
  const std::string a = result_text(scene, 1);
  const std::string b = result_text(scene, 1);
  const std::string c = result_text(scene, 4);
  const auto other = hdl64_mono(*target_pose_preset("multi5"), 1, 10);
  const bool seed_matters = result_text(other, 1) != a;
  return {a == b && a == c && seed_matters,
          std::string("result files: repeat ") + (a == b ? "identical" : "DIFFER") +
              ", workers 1 vs 4 " + (a == c ? "identical" : "DIFFER") + ", other seed " +
              (seed_matters ? "differs" : "IDENTICAL") + " (" + std::to_string(a.size()) +
              " bytes)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Umeyama oracle equivalence", 5, umeyama_oracle},
      {2, "Depth-discontinuity exactness", 1, discontinuity_exactness},
      {3, "LM correctness", 10, lm_correctness},
      {4, "End-to-end zero-noise calibration", 120, zero_noise_end_to_end},
      {5, "Multi-pose decay", 600, multi_pose_decay},
      {6, "Clustering benefit", 60, clustering_benefit},
      {7, "Failure-mode reproduction", 60, sixteen_layer_failure},
      {8, "Noise robustness trend", 300, noise_trend},
      {9, "Determinism", 600, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %d %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), secs, c.time_limit_s,
                in_time ? "" : " TIME EXCEEDED");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
