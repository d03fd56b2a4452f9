#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holecalib {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or violated precondition.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Markers: a monocular frame without usable marker detections.
enum class RejectReason { NoPlane, Circles, Consistency, Clusters, Markers };

constexpr std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::NoPlane:
      return "no_plane";
    case RejectReason::Circles:
      return "circles";
    case RejectReason::Consistency:
      return "consistency";
    case RejectReason::Clusters:
      return "clusters";
    case RejectReason::Markers:
      return "markers";
  }
  return "unknown";
}

/// A single data frame did not yield four reference points.
class FrameRejected : public Error {
 public:
  explicit FrameRejected(RejectReason reason, const std::string& detail = {})
      : Error(std::string(to_string(reason)) +
              (detail.empty() ? "" : ": " + detail)),
        reason_(reason) {}

  RejectReason reason() const noexcept { return reason_; }

 private:
  RejectReason reason_;
};

/// The accumulated frames of one target pose could not be consolidated.
class PoseRejected : public Error {
 public:
  PoseRejected(RejectReason reason, int pose, const std::string& detail = {})
      : Error("pose " + std::to_string(pose) + " rejected (" +
              std::string(to_string(reason)) + ")" +
              (detail.empty() ? "" : ": " + detail)),
        reason_(reason),
        pose_(pose) {}

  RejectReason reason() const noexcept { return reason_; }
  int pose() const noexcept { return pose_; }

 private:
  RejectReason reason_;
  int pose_;
};

}  // namespace holecalib
