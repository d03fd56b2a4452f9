#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string_view>

#include "holecalib/geometry.hpp"

namespace holecalib {

enum class HoleLabel { TopLeft = 0, TopRight = 1, BottomLeft = 2, BottomRight = 3 };

inline constexpr std::array<HoleLabel, 4> kHoleLabels = {
    HoleLabel::TopLeft, HoleLabel::TopRight, HoleLabel::BottomLeft, HoleLabel::BottomRight};

constexpr std::string_view to_string(HoleLabel label) {
  switch (label) {
    case HoleLabel::TopLeft:
      return "tl";
    case HoleLabel::TopRight:
      return "tr";
    case HoleLabel::BottomLeft:
      return "bl";
    case HoleLabel::BottomRight:
      return "br";
  }
  return "?";
}

std::optional<HoleLabel> parse_hole_label(std::string_view text);

/// Perforated board with four holes on a w x h rectangle and four square
/// markers near the corners.
///
/// Board frame: origin at the board center, x to the right and y up as seen
/// from the front face, z out of the front face.
struct TargetGeometry {
  double hole_radius = 0.06;
  double centers_width = 0.30;
  double centers_height = 0.40;
  double board_width = 1.0;
  double board_height = 1.4;
  double marker_size = 0.20;
  /// Marker centers by id: 0 top-left, 1 top-right, 2 bottom-right, 3 bottom-left.
  std::array<Eigen::Vector2d, 4> marker_center_offsets = {
      Eigen::Vector2d(-0.35, 0.55), Eigen::Vector2d(0.35, 0.55), Eigen::Vector2d(0.35, -0.55),
      Eigen::Vector2d(-0.35, -0.55)};

  double diagonal() const { return std::hypot(centers_width, centers_height); }
  double perimeter() const { return 2.0 * (centers_width + centers_height); }

  /// Throws DataError when a length is non-positive or a hole/marker leaves the board.
  void validate() const;

  /// Hole center in the board frame, (+-w/2, +-h/2, 0).
  Point3d hole_center(HoleLabel label) const;

  /// Marker corners in the board frame, counter-clockwise from top-left.
  std::array<Point3d, 4> marker_corners(int marker_id) const;
};

/// The board frame expressed in a target frame whose x axis points away from
/// the front face (into the board) and z up: the frame used for target poses,
/// so that a zero-rotation pose faces a sensor looking along +x.
RigidTransformd board_in_target_frame();

/// Hole centers (indexed by HoleLabel) of a target at `sensor_from_target`.
std::array<Point3d, 4> target_hole_centers(const RigidTransformd& sensor_from_target,
                                           const TargetGeometry& geometry);

/// Four hole centers from one frame of one sensor, indexed by HoleLabel.
struct ReferencePointSet {
  std::array<Point3d, 4> centers;
  int pose = 0;
  int frame = 0;

  const Point3d& at(HoleLabel label) const { return centers[static_cast<int>(label)]; }
  Point3d& at(HoleLabel label) { return centers[static_cast<int>(label)]; }
};

}  // namespace holecalib
