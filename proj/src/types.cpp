#include "curblabel/types.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "curblabel/error.hpp"

namespace curblabel {

namespace {

constexpr double kRotationTolerance = 1e-6;

void check_points(std::span<const Vec3> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!is_finite(points[i])) {
      throw InputError("non-finite point at index " + std::to_string(i));
    }
  }
}

}  // namespace

Pose::Pose(const Mat3& rotation, const Vec3& translation, std::size_t frame_index)
    : rotation_(rotation), translation_(translation), frame_index_(frame_index) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InputError("pose contains non-finite values");
  }
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTolerance || std::abs(rotation.determinant() - 1.0) > kRotationTolerance) {
    throw InputError("pose rotation is not a proper rotation matrix");
  }
}

Pose Pose::from_yaw(double yaw, const Vec3& translation, std::size_t frame_index) {
  return Pose(Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(), translation, frame_index);
}

Pose Pose::from_matrix(const Mat4& m, std::size_t frame_index) {
  return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>(), frame_index);
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  inv.frame_index_ = frame_index_;
  return inv;
}

Pose Pose::operator*(const Pose& other) const {
  Pose out;
  out.rotation_ = rotation_ * other.rotation_;
  out.translation_ = rotation_ * other.translation_ + translation_;
  out.frame_index_ = frame_index_;
  return out;
}

bool is_finite(const Vec3& p) { return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z()); }

std::vector<Vec3> transform_points(std::span<const Vec3> points, const Pose& pose) {
  check_points(points);
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pose.apply(p));
  return out;
}

std::vector<Vec3> inverse_transform_points(std::span<const Vec3> points, const Pose& pose) {
  check_points(points);
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pose.apply_inverse(p));
  return out;
}

std::vector<double> arc_length_2d(std::span<const Vec3> points) {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    s[i] = s[i - 1] + (xy(points[i]) - xy(points[i - 1])).norm();
  }
  return s;
}

bool is_valid_polyline(const CurbPolyline& curb) {
  if (curb.points.size() < 2) return false;
  for (std::size_t i = 0; i < curb.points.size(); ++i) {
    if (!is_finite(curb.points[i])) return false;
    if (i > 0 && curb.points[i] == curb.points[i - 1]) return false;
  }
  return true;
}

}  // namespace curblabel
