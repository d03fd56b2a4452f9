#include "holecalib/calibration.hpp"

#include <cmath>

#include "holecalib/parallel.hpp"
#include "holecalib/rng.hpp"

namespace holecalib {

SimulatedSource::SimulatedSource(std::shared_ptr<const Scene> scene, int sensor,
                                 int frames_per_pose)
    : scene_(std::move(scene)), sensor_(sensor), frames_(frames_per_pose) {
  if (!scene_) throw DataError("null scene");
  if (sensor_ < 0 || sensor_ >= static_cast<int>(scene_->sensors.size())) {
    throw DataError("sensor index out of range");
  }
  if (frames_ < 0) throw DataError("negative frame count");
}

std::string SimulatedSource::name() const { return scene_->sensors[sensor_].name; }

Modality SimulatedSource::modality() const {
  switch (scene_->sensors[sensor_].kind) {
    case SensorKind::Lidar:
      return Modality::Lidar;
    case SensorKind::Monocular:
      return Modality::Mono;
    case SensorKind::StereoRange:
      return Modality::StereoRange;
  }
  return Modality::Lidar;
}

int SimulatedSource::pose_count() const { return static_cast<int>(scene_->target_poses.size()); }

int SimulatedSource::frame_count(int) const { return frames_; }

SensorFrame SimulatedSource::frame(int pose, int index) const {
  switch (scene_->sensors[sensor_].kind) {
    case SensorKind::Lidar:
      return simulate_lidar_frame(*scene_, sensor_, pose, index);
    case SensorKind::Monocular:
      return simulate_marker_detections(*scene_, sensor_, pose, index);
    case SensorKind::StereoRange:
      return simulate_range_cloud(*scene_, sensor_, pose, index);
  }
  throw DataError("unknown sensor kind");
}

CameraIntrinsics SimulatedSource::intrinsics() const { return scene_->sensors[sensor_].camera; }

std::optional<PassThroughBounds> SimulatedSource::passthrough_hint(int pose) const {
  return target_passthrough(*scene_, sensor_, pose);
}

LabeledCenters extract_pose(const FrameSource& source, int pose, const CalibConfig& config,
                            std::vector<FrameLog>* log) {
  const int n = config.frames;
  if (n < 1) throw DataError("N must be at least 1");
  if (source.frame_count(pose) < n) {
    throw DataError(source.name() + " pose " + std::to_string(pose) + " has " +
                    std::to_string(source.frame_count(pose)) + " frames, need " +
                    std::to_string(n));
  }

  ExtractionContext base;
  if (const auto it = config.passthrough.find(source.name()); it != config.passthrough.end()) {
    base.bounds = it->second;
  } else {
    base.bounds = source.passthrough_hint(pose);
  }
  if (source.modality() == Modality::Mono) base.intrinsics = source.intrinsics();

  std::vector<FrameOutcome> outcomes(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), config.workers, [&](std::size_t i) {
    ExtractionContext ctx = base;
    ctx.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(pose), i});
    const int frame_id = static_cast<int>(i);
    outcomes[i] = extract_frame(source.frame(pose, frame_id), frame_id, config, ctx);
    if (outcomes[i].points) outcomes[i].points->pose = pose;
  });
  if (log) {
    for (const auto& o : outcomes) log->push_back({pose, o.frame, o.rejection});
  }

  int successes = 0;
  for (const auto& o : outcomes) successes += o.success() ? 1 : 0;
  if (successes == 0) {
    throw PoseRejected(*outcomes.front().rejection, pose,
                       source.name() + ": no frame out of " + std::to_string(n) +
                           " yielded four reference points");
  }

  const AccumulatedCloud acc = accumulate_frames(outcomes, n);
  ClusterParams params;
  params.delta_cluster = config.delta_cluster;
  params.min_size = static_cast<int>(std::ceil(config.cluster_min_fraction * acc.n_success - 1e-9));
  params.max_size = static_cast<int>(std::floor(config.cluster_max_fraction * acc.n_success + 1e-9));
  const auto clusters = euclidean_cluster(acc.points, params);
  const auto centers = consolidate_centers(clusters, pose);
  try {
    return associate_labels(centers, config.target, config.delta_consistency, pose);
  } catch (const DataError& e) {
    throw PoseRejected(RejectReason::Consistency, pose, source.name() + ": " + e.what());
  }
}

SensorCenters extract_sensor(const FrameSource& source, const CalibConfig& config) {
  config.validate();
  const int m = config.poses > 0 ? config.poses : source.pose_count();
  if (m > source.pose_count()) {
    throw DataError(source.name() + " has " + std::to_string(source.pose_count()) +
                    " poses, need " + std::to_string(m));
  }
  SensorCenters out;
  out.sensor = source.name();
  out.frames_per_pose = config.frames;
  for (int pose = 0; pose < m; ++pose) {
    out.poses.push_back(extract_pose(source, pose, config, &out.log));
  }
  return out;
}

CalibrationResult register_centers(const SensorCenters& x, const SensorCenters& y) {
  if (x.poses.size() != y.poses.size()) {
    throw DataError("sensors cover different numbers of poses (" +
                    std::to_string(x.poses.size()) + " vs " + std::to_string(y.poses.size()) +
                    ")");
  }
  const int m = static_cast<int>(x.poses.size());
  const auto px = accumulate_poses(x.poses, m);
  const auto py = accumulate_poses(y.poses, m);
  const CorrespondenceSet pairs = build_correspondences(px, py);

  CalibrationResult result;
  result.transform = umeyama_rigid(pairs);
  result.rmse = registration_rmse(pairs, result.transform);
  result.poses = m;
  result.frames = x.frames_per_pose;
  result.sensor_x = x.sensor;
  result.sensor_y = y.sensor;
  for (std::size_t i = 0; i < pairs.size(); i += 4) {
    PoseResidual r;
    r.pose = pairs[i].pose;
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& c = pairs[i + k];
      r.residuals[static_cast<int>(c.label)] = (c.x - result.transform * c.y).norm();
      sum += r.residuals[static_cast<int>(c.label)] * r.residuals[static_cast<int>(c.label)];
    }
    r.rmse = std::sqrt(sum / 4.0);
    result.per_pose.push_back(r);
  }
  return result;
}

CalibrationResult calibrate(const FrameSource& x, const FrameSource& y, const CalibConfig& config,
                            SensorCenters* x_centers, SensorCenters* y_centers) {
  if (config.poses == 0 && x.pose_count() != y.pose_count()) {
    throw DataError("sensors cover different numbers of poses (" +
                    std::to_string(x.pose_count()) + " vs " + std::to_string(y.pose_count()) +
                    ")");
  }
  // The two sensors are independent; run them side by side.
  SensorCenters cx;
  SensorCenters cy;
  parallel_for(2, config.workers > 1 ? 2 : 1, [&](std::size_t i) {
    if (i == 0) {
      cx = extract_sensor(x, config);
    } else {
      cy = extract_sensor(y, config);
    }
  });
  CalibrationResult result = register_centers(cx, cy);
  if (x_centers) *x_centers = std::move(cx);
  if (y_centers) *y_centers = std::move(cy);
  return result;
}

}  // namespace holecalib
