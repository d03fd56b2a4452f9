#include "holecalib/target.hpp"

#include <cmath>

namespace holecalib {

std::optional<HoleLabel> parse_hole_label(std::string_view text) {
  for (HoleLabel label : kHoleLabels) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

void TargetGeometry::validate() const {
  if (!(hole_radius > 0 && centers_width > 0 && centers_height > 0 && board_width > 0 &&
        board_height > 0 && marker_size > 0)) {
    throw DataError("target geometry lengths must be positive");
  }
  if (centers_width / 2 + hole_radius >= board_width / 2 ||
      centers_height / 2 + hole_radius >= board_height / 2) {
    throw DataError("target holes do not fit inside the board");
  }
  for (const auto& c : marker_center_offsets) {
    if (std::abs(c.x()) + marker_size / 2 > board_width / 2 ||
        std::abs(c.y()) + marker_size / 2 > board_height / 2) {
      throw DataError("target marker does not fit inside the board");
    }
  }
}

Point3d TargetGeometry::hole_center(HoleLabel label) const {
  const double x = centers_width / 2;
  const double y = centers_height / 2;
  switch (label) {
    case HoleLabel::TopLeft:
      return {-x, y, 0};
    case HoleLabel::TopRight:
      return {x, y, 0};
    case HoleLabel::BottomLeft:
      return {-x, -y, 0};
    case HoleLabel::BottomRight:
      return {x, -y, 0};
  }
  return Point3d::Zero();
}

std::array<Point3d, 4> TargetGeometry::marker_corners(int marker_id) const {
  if (marker_id < 0 || marker_id > 3) throw DataError("marker id out of range");
  const Eigen::Vector2d c = marker_center_offsets[static_cast<std::size_t>(marker_id)];
  const double s = marker_size / 2;
  return {Point3d(c.x() - s, c.y() + s, 0), Point3d(c.x() - s, c.y() - s, 0),
          Point3d(c.x() + s, c.y() - s, 0), Point3d(c.x() + s, c.y() + s, 0)};
}

RigidTransformd board_in_target_frame() {
  // Columns: board x (right) = -y, board y (up) = +z, board z (front) = -x.
  Mat3d r;
  r << 0, 0, -1,
      -1, 0, 0,
       0, 1, 0;
  return {r, Vec3d::Zero()};
}

std::array<Point3d, 4> target_hole_centers(const RigidTransformd& sensor_from_target,
                                           const TargetGeometry& geometry) {
  const RigidTransformd sensor_from_board = sensor_from_target * board_in_target_frame();
  std::array<Point3d, 4> out;
  for (HoleLabel label : kHoleLabels) {
    out[static_cast<int>(label)] = sensor_from_board * geometry.hole_center(label);
  }
  return out;
}

}  // namespace holecalib
