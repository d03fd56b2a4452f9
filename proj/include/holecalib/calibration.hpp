#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holecalib/aggregation.hpp"
#include "holecalib/config.hpp"
#include "holecalib/extraction.hpp"
#include "holecalib/registration.hpp"
#include "holecalib/simulator.hpp"

namespace holecalib {

/// Frames of one sensor, grouped by target pose.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::string name() const = 0;
  virtual Modality modality() const = 0;
  virtual int pose_count() const = 0;
  virtual int frame_count(int pose) const = 0;
  virtual SensorFrame frame(int pose, int index) const = 0;
  /// Required for the monocular modality.
  virtual CameraIntrinsics intrinsics() const { return {}; }
  /// Crop box suggested by the data for one pose, if any.
  virtual std::optional<PassThroughBounds> passthrough_hint(int /*pose*/) const {
    return std::nullopt;
  }
};

/// Frames rendered on demand from a scene; pose p of the source is scene
/// pose p. Crop hints come from target_passthrough().
class SimulatedSource : public FrameSource {
 public:
  SimulatedSource(std::shared_ptr<const Scene> scene, int sensor, int frames_per_pose);

  std::string name() const override;
  Modality modality() const override;
  int pose_count() const override;
  int frame_count(int pose) const override;
  SensorFrame frame(int pose, int index) const override;
  CameraIntrinsics intrinsics() const override;
  std::optional<PassThroughBounds> passthrough_hint(int pose) const override;

 private:
  std::shared_ptr<const Scene> scene_;
  int sensor_;
  int frames_;
};

/// Accept/reject record of one frame.
struct FrameLog {
  int pose = 0;
  int frame = 0;
  std::optional<RejectReason> rejection;
};

/// Reference centers of one sensor over M poses, with the per-frame log.
struct SensorCenters {
  std::string sensor;
  std::vector<LabeledCenters> poses;
  std::vector<FrameLog> log;
  int frames_per_pose = 0;
};

/// Runs extraction on the first N frames of one pose, then accumulation,
/// clustering, consolidation and labeling. Frames run on config.workers
/// threads; each frame's RANSAC seed depends only on (seed, pose, frame).
/// Throws PoseRejected with the pose tag on failure; `log` receives one
/// entry per processed frame either way.
LabeledCenters extract_pose(const FrameSource& source, int pose, const CalibConfig& config,
                            std::vector<FrameLog>* log = nullptr);

/// extract_pose over poses 0..M-1 (M = config.poses, or all poses if 0).
SensorCenters extract_sensor(const FrameSource& source, const CalibConfig& config);

struct PoseResidual {
  int pose = 0;
  /// |x - T y| per label.
  std::array<double, 4> residuals{};
  double rmse = 0.0;
};

struct CalibrationResult {
  /// Maps sensor-Y points into sensor X.
  RigidTransformd transform;
  double rmse = 0.0;
  int poses = 0;
  int frames = 0;
  std::string sensor_x;
  std::string sensor_y;
  std::vector<PoseResidual> per_pose;
};

/// Registration of already extracted centers.
CalibrationResult register_centers(const SensorCenters& x, const SensorCenters& y);

/// Full pipeline for a sensor pair. Both sources must cover the same poses.
CalibrationResult calibrate(const FrameSource& x, const FrameSource& y, const CalibConfig& config,
                            SensorCenters* x_centers = nullptr,
                            SensorCenters* y_centers = nullptr);

}  // namespace holecalib
