#include "curblabel/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curblabel/class_policy.hpp"
#include "curblabel/error.hpp"

namespace curblabel::synthetic {

namespace {

struct WorldPoint {
  Vec3 xyz;
  ClassId cls;
  float intensity;
};

double centerline(const SceneParams& s, double x) {
  if (x <= s.corner_x) return s.center_y;
  return s.center_y + (x - s.corner_x) * std::tan(s.corner_angle * M_PI / 180.0);
}

double heading_at(const SceneParams& s, double x) {
  return x <= s.corner_x ? 0.0 : s.corner_angle * M_PI / 180.0;
}

std::vector<WorldPoint> sample_world(const SceneParams& s) {
  std::vector<WorldPoint> pts;
  const double half = 0.5 * s.road_width;
  const double outer = half + s.sidewalk_width;
  const auto nx = static_cast<long>(std::floor(s.length / s.spacing));
  for (long i = 0; i < nx; ++i) {
    const double x = s.x_start + (static_cast<double>(i) + 0.25) * s.spacing;
    const double yc = centerline(s, x);
    const long j0 = static_cast<long>(std::floor((yc - outer) / s.spacing));
    const long j1 = static_cast<long>(std::ceil((yc + outer) / s.spacing));
    for (long j = j0; j <= j1; ++j) {
      const double y = (static_cast<double>(j) + 0.25) * s.spacing;
      const double v = y - yc;
      if (std::abs(v) >= outer) continue;
      if (s.gap_length > 0.0 && x >= s.gap_start && x < s.gap_start + s.gap_length) {
        const double curb_v = s.gap_curb == 0 ? -half : half;
        if (std::abs(v - curb_v) < 1.0) continue;
      }
      if (std::abs(v) < half) {
        pts.push_back({Vec3(x, y, 0.0), kitti_class::kRoad, 0.3f});
      } else {
        pts.push_back({Vec3(x, y, s.curb_height), kitti_class::kSidewalk, 0.5f});
      }
    }
  }
  if (s.parked_car) {
    // Box-shaped car body in the middle of the road, 4 m x 1.8 m x 1.5 m.
    const double cx = s.x_start + 0.6 * s.length;
    const double cy = centerline(s, cx);
    for (double x = cx - 2.0; x <= cx + 2.0; x += s.spacing) {
      for (double y = cy - 0.9; y <= cy + 0.9; y += s.spacing) {
        pts.push_back({Vec3(x, y, 1.5), kitti_class::kCar, 0.8f});
      }
      for (double z = 0.3; z < 1.5; z += s.spacing) {
        pts.push_back({Vec3(x, cy - 0.9, z), kitti_class::kCar, 0.8f});
        pts.push_back({Vec3(x, cy + 0.9, z), kitti_class::kCar, 0.8f});
      }
    }
  }
  return pts;
}

CurbPolyline truth_line(const SceneParams& s, double offset, InstanceId id) {
  CurbPolyline c;
  c.instance_id = id;
  const auto n = static_cast<long>(std::floor(s.length / s.spacing));
  for (long i = 0; i <= n; ++i) {
    const double x = s.x_start + static_cast<double>(i) * s.length / static_cast<double>(n);
    c.points.emplace_back(x, centerline(s, x) + offset, s.curb_height);
  }
  return c;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

SceneKind parse_scene_kind(const std::string& name) {
  if (name == "straight") return SceneKind::Straight;
  if (name == "occluded") return SceneKind::Occluded;
  if (name == "corner") return SceneKind::Corner;
  if (name == "split-tile") return SceneKind::SplitTile;
  throw InputError("unknown scene '" + name + "' (expected straight, occluded, corner or split-tile)");
}

std::string scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::Straight: return "straight";
    case SceneKind::Occluded: return "occluded";
    case SceneKind::Corner: return "corner";
    case SceneKind::SplitTile: return "split-tile";
  }
  return "unknown";
}

SceneParams default_params(SceneKind kind) {
  SceneParams p;
  switch (kind) {
    case SceneKind::Straight:
      break;
    case SceneKind::Occluded:
      p.gap_length = 5.0;
      break;
    case SceneKind::Corner:
      p.corner_x = 50.0;
      p.corner_angle = 45.0;
      break;
    case SceneKind::SplitTile:
      p.x_start = 25.0;
      break;
  }
  return p;
}

Scene generate(const SceneParams& s) {
  if (!(s.spacing > 0.0) || !(s.length > 0.0) || !(s.road_width > 0.0) || s.sidewalk_width < 0.0) {
    throw InputError("invalid synthetic scene geometry");
  }
  if (!(s.scan_radius > 0.0)) throw InputError("scan radius must be positive");
  Scene scene;
  scene.params = s;
  scene.tr << 0, -1, 0, 0.01,
              0, 0, -1, -0.08,
              1, 0, 0, -0.27,
              0, 0, 0, 1;
  scene.truth.push_back(truth_line(s, -0.5 * s.road_width, 1));
  scene.truth.push_back(truth_line(s, 0.5 * s.road_width, 2));

  const auto world = sample_world(s);
  const double r2 = s.scan_radius * s.scan_radius;
  for (std::size_t j = 0; j < s.frames; ++j) {
    const double fx = s.x_start + 0.5 * s.frame_step + static_cast<double>(j) * s.frame_step;
    const Vec3 origin(fx, centerline(s, fx), s.sensor_height);
    Frame f;
    f.index = j;
    f.pose = Pose::from_yaw(heading_at(s, fx), origin, j);
    for (const auto& w : world) {
      if ((xy(w.xyz) - xy(origin)).squaredNorm() > r2) continue;
      f.cloud.push_back({f.pose.apply_inverse(w.xyz), w.intensity});
      f.labels.push_back({w.cls, 0});
    }
    scene.frames.push_back(std::move(f));
  }
  return scene;
}

void write_sequence(const Scene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "velodyne");
  std::filesystem::create_directories(dir / "labels");
  std::vector<Pose> poses;
  for (const auto& f : scene.frames) {
    write_point_cloud(dir / "velodyne" / (frame_stem(f.index) + ".bin"), f.cloud);
    write_labels(dir / "labels" / (frame_stem(f.index) + ".label"), f.labels);
    poses.push_back(f.pose);
  }
  write_calibration(dir / "calib.txt", scene.tr);
  write_poses(dir / "poses.txt", poses, scene.tr);
}

double distance_to_truth(const Scene& scene, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : scene.truth) {
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      best = std::min(best, segment_distance(xy(p), xy(c.points[i - 1]), xy(c.points[i])));
    }
  }
  return best;
}

}  // namespace curblabel::synthetic
