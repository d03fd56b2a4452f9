#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "holecalib/calibration.hpp"
#include "holecalib/config.hpp"
#include "holecalib/simulator.hpp"

namespace holecalib {

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

/// Plain-text cloud: a header naming the columns present
/// (`x y z [ring] [range] [u] [v] [azimuth_index]`), optional `#key value`
/// metadata lines, then one point per line.
void write_cloud(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud(std::istream& in);
void save_cloud(const std::string& path, const PointCloud& cloud);
PointCloud load_cloud(const std::string& path);

/// PGM images; reads P2 and P5, writes P5 (or P2 when `ascii`).
void save_pgm(const std::string& path, const IntensityImage& image, bool ascii = false);
IntensityImage load_pgm(const std::string& path);

/// Detections as JSON `{frame, markers: [{id, corners: [[u, v] x 4]}]}`.
nlohmann::json detections_to_json(const MarkerDetections& d);
MarkerDetections detections_from_json(const nlohmann::json& j);

/// Labeled centers as CSV `pose,label,x,y,z`, pose-major then tl, tr, bl, br.
void write_labeled_centers(std::ostream& out, const std::vector<LabeledCenters>& poses);
std::vector<LabeledCenters> read_labeled_centers(std::istream& in);

/// Per-frame log as CSV `pose,frame,status` with status "ok" or a reason.
void write_frame_log(std::ostream& out, const std::vector<FrameLog>& log);

/// Result block: sensor names, theta (x y z roll pitch yaw), the row-major
/// 4x4 matrix, rmse, M, N, per-pose residuals and the echoed config.
void write_result(std::ostream& out, const CalibrationResult& result, const CalibConfig& config);

struct ParsedResult {
  std::string sensor_x;
  std::string sensor_y;
  RigidTransformd transform;
  double rmse = 0.0;
  int poses = 0;
  int frames = 0;
};
ParsedResult read_result(std::istream& in);
ParsedResult load_result(const std::string& path);

/// Scene description. Target poses are given as `target_poses` (list of
/// [x, y, z, roll, pitch, yaw]) or a `target_pose_preset`; sensors by
/// `preset` with an optional `mount` (6 params or a mount preset name).
Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& scene);
Scene load_scene(const std::string& path);

/// Ground truth file: sensor mounts of a scene. relative_truth() returns
/// mount_x^-1 mount_y, or the file's `transform` entry when present.
nlohmann::json ground_truth_json(const Scene& scene);
RigidTransformd relative_truth(const nlohmann::json& truth, const std::string& sensor_x,
                               const std::string& sensor_y);

nlohmann::json load_json(const std::string& path);

/// Writes frames 0..frames-1 of every pose of one sensor below `dir`:
/// manifest.json and pose_<m>/frame_<n>.{cloud.txt,pgm,json}.
void write_dataset(const Scene& scene, int sensor, int frames, const std::string& dir,
                   int workers = 1);

/// FrameSource reading a directory written by write_dataset().
class DatasetSource : public FrameSource {
 public:
  explicit DatasetSource(const std::string& dir);

  std::string name() const override { return name_; }
  Modality modality() const override { return modality_; }
  int pose_count() const override { return poses_; }
  int frame_count(int pose) const override;
  SensorFrame frame(int pose, int index) const override;
  CameraIntrinsics intrinsics() const override { return intrinsics_; }
  std::optional<PassThroughBounds> passthrough_hint(int pose) const override;

 private:
  std::string frame_stem(int pose, int index) const;

  std::string dir_;
  std::string name_;
  Modality modality_ = Modality::Lidar;
  int poses_ = 0;
  int frames_ = 0;
  CameraIntrinsics intrinsics_;
  std::vector<std::optional<PassThroughBounds>> hints_;
};

}  // namespace holecalib
