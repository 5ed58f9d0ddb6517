#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curblabel/kitti_io.hpp"
#include "curblabel/types.hpp"

namespace curblabel::synthetic {

enum class SceneKind { Straight, Occluded, Corner, SplitTile };

SceneKind parse_scene_kind(const std::string& name);
std::string scene_kind_name(SceneKind kind);

/// A road running along +x between two curbs, bordered by raised sidewalks.
///
/// The road centerline is y = center_y for x < corner_x and turns by corner_angle
/// (degrees, counterclockwise) after it. Curbs sit at centerline -/+ road_width / 2
/// measured along y; sidewalks extend sidewalk_width beyond them at curb_height.
/// Surfaces are sampled on a world grid with `spacing`, offset by a quarter step so
/// samples stay clear of voxel boundaries.
struct SceneParams {
  double x_start = 0.0;
  double length = 100.0;
  double center_y = 25.0;
  double road_width = 7.0;
  double sidewalk_width = 3.0;
  double curb_height = 0.15;
  double spacing = 0.1;
  double corner_x = 1e9;
  double corner_angle = 0.0;
  // Removes every point within 1 m (along y) of one curb for x in [gap_start, gap_start + gap_length).
  double gap_start = 20.0;
  double gap_length = 0.0;
  int gap_curb = 0;  // 0: right curb (smaller y), 1: left curb
  bool parked_car = true;
  std::size_t frames = 20;
  double frame_step = 5.0;
  double sensor_height = 1.73;
  double scan_radius = 30.0;
};

/// Defaults for each scene kind: Straight as above; Occluded adds a 5 m gap; Corner turns
/// 45 degrees at x = 50; SplitTile shifts the road to x in [25, 125).
SceneParams default_params(SceneKind kind);

struct Scene {
  SceneParams params;
  std::vector<Frame> frames;       // clouds in the sensor frame
  Mat4 tr = Mat4::Identity();      // LiDAR-to-camera calibration used on disk
  std::vector<CurbPolyline> truth; // true curb lines in the global frame, densely sampled
};

Scene generate(const SceneParams& params);

/// Writes velodyne/, labels/, poses.txt and calib.txt under `dir`.
void write_sequence(const Scene& scene, const std::filesystem::path& dir);

/// Distance in the xy plane from a point to the nearest truth polyline.
double distance_to_truth(const Scene& scene, const Vec3& p);

}  // namespace curblabel::synthetic
