#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace curblabel {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

using ClassId = std::uint16_t;
using InstanceId = std::uint32_t;

struct PointXYZI {
  Vec3 xyz = Vec3::Zero();
  float intensity = 0.0f;
};

struct SemanticPoint {
  PointXYZI point;
  ClassId class_id = 0;
  std::uint16_t instance_id = 0;
};

/// Raw per-point label record: lower 16 bits class, upper 16 bits instance.
struct PointLabel {
  ClassId class_id = 0;
  std::uint16_t instance_id = 0;

  std::uint32_t packed() const { return static_cast<std::uint32_t>(class_id) | (static_cast<std::uint32_t>(instance_id) << 16); }
  static PointLabel unpack(std::uint32_t raw) {
    return {static_cast<ClassId>(raw & 0xFFFFu), static_cast<std::uint16_t>(raw >> 16)};
  }
  friend bool operator==(const PointLabel&, const PointLabel&) = default;
};

/// Rigid transform mapping sensor coordinates into the global frame: p_global = R p + t.
class Pose {
 public:
  Pose() = default;
  /// Throws InputError unless `rotation` is orthonormal with det +1 (tolerance 1e-6).
  Pose(const Mat3& rotation, const Vec3& translation, std::size_t frame_index = 0);

  static Pose identity(std::size_t frame_index = 0) { return Pose(Mat3::Identity(), Vec3::Zero(), frame_index); }
  static Pose from_yaw(double yaw, const Vec3& translation, std::size_t frame_index = 0);
  /// Builds from a homogeneous matrix; the bottom row is ignored.
  static Pose from_matrix(const Mat4& m, std::size_t frame_index = 0);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  std::size_t frame_index() const { return frame_index_; }

  Mat4 matrix() const;
  Pose inverse() const;
  /// Composition: (a * b).apply(p) == a.apply(b.apply(p)). Keeps this pose's frame index.
  Pose operator*(const Pose& other) const;

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation_.transpose() * (p - translation_); }

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 translation_ = Vec3::Zero();
  std::size_t frame_index_ = 0;
};

/// Integer grid coordinate of a map tile.
struct TileIndex {
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  friend auto operator<=>(const TileIndex&, const TileIndex&) = default;
};

struct CurbPolyline {
  InstanceId instance_id = 0;
  std::vector<Vec3> points;
  std::optional<TileIndex> source_tile;
};

struct CIMap {
  std::vector<CurbPolyline> curbs;
  std::string sequence_id;
  std::map<std::string, std::string> parameters;
};

/// Forward transform of every point: R p + T. Throws InputError on non-finite input.
std::vector<Vec3> transform_points(std::span<const Vec3> points, const Pose& pose);
/// R^T (p - T), the inverse of transform_points.
std::vector<Vec3> inverse_transform_points(std::span<const Vec3> points, const Pose& pose);

bool is_finite(const Vec3& p);
inline Vec2 xy(const Vec3& p) { return p.head<2>(); }

/// Cumulative 2D arc length of a polyline (size == points.size(), first entry 0).
std::vector<double> arc_length_2d(std::span<const Vec3> points);

/// Checks the CurbPolyline invariants (>= 2 points, consecutive points distinct, finite).
bool is_valid_polyline(const CurbPolyline& curb);

}  // namespace curblabel
