#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "curblabel/types.hpp"

namespace curblabel {

namespace fs = std::filesystem;

/// Layout of one base-dataset sequence directory:
///   velodyne/NNNNNN.bin, labels/NNNNNN.label, poses.txt, calib.txt
struct SequencePaths {
  fs::path root;
  fs::path velodyne_dir;
  fs::path labels_dir;
  fs::path poses_file;
  fs::path calib_file;
  std::size_t frame_count = 0;

  /// Scans `sequence_dir`, requiring consecutively numbered cloud/label pairs
  /// and a pose file with at least frame_count lines.
  static SequencePaths discover(const fs::path& sequence_dir);

  fs::path cloud_path(std::size_t frame) const;
  fs::path label_path(std::size_t frame) const;
};

/// Per-frame curb annotations in the sensor frame.
struct FrameAnnotation {
  std::size_t frame_index = 0;
  std::vector<CurbPolyline> curbs;
};

struct Frame {
  std::size_t index = 0;
  std::vector<PointXYZI> cloud;
  std::vector<PointLabel> labels;
  Pose pose;
};

std::string frame_stem(std::size_t frame);

std::vector<PointXYZI> read_point_cloud(const fs::path& path);
void write_point_cloud(const fs::path& path, std::span<const PointXYZI> cloud);

std::vector<PointLabel> read_labels(const fs::path& path);
/// Also checks that the record count matches the paired cloud.
std::vector<PointLabel> read_labels(const fs::path& path, std::size_t expected_count, const fs::path& cloud_path);
void write_labels(const fs::path& path, std::span<const PointLabel> labels);

/// The 3x4 `Tr:` entry of calib.txt as a homogeneous matrix.
Mat4 read_calibration(const fs::path& calib_file);
void write_calibration(const fs::path& calib_file, const Mat4& tr);

/// Camera-frame poses converted to LiDAR-frame poses: Tr^-1 * P_cam * Tr.
std::vector<Pose> read_poses(const fs::path& poses_file, const fs::path& calib_file);
std::vector<Pose> lidar_poses_from_camera(std::span<const Mat4> camera_poses, const Mat4& tr);
/// Writes LiDAR-frame poses back in the camera convention (Tr * P * Tr^-1).
void write_poses(const fs::path& poses_file, std::span<const Pose> lidar_poses, const Mat4& tr);

/// Streaming access to one frame at a time.
class SequenceReader {
 public:
  explicit SequenceReader(SequencePaths paths);
  std::size_t size() const { return paths_.frame_count; }
  const std::vector<Pose>& poses() const { return poses_; }
  const SequencePaths& paths() const { return paths_; }
  Frame load(std::size_t frame) const;

 private:
  SequencePaths paths_;
  std::vector<Pose> poses_;
};

// Polyline annotation file (little-endian), one per frame, NNNNNN.curb:
//   char[4] magic "CRBA" | u32 version (1) | u32 curb_count
//   per curb: u32 instance_id | u32 point_count | point_count x (f32 x, f32 y, f32 z)
inline constexpr std::uint32_t kAnnotationVersion = 1;
inline constexpr std::size_t kAnnotationHeaderBytes = 12;

void write_polyline_annotation(const FrameAnnotation& annotation, const fs::path& path);
void write_polyline_annotations(std::span<const FrameAnnotation> annotations, const fs::path& out_dir);
FrameAnnotation read_polyline_annotation(const fs::path& path, std::size_t frame_index);
/// Reads every NNNNNN.curb file of a directory, sorted by frame index.
std::vector<FrameAnnotation> read_polyline_annotations(const fs::path& dir);

/// Copies `labels` to `out_path`, substituting `curb_class` wherever `curb_mask` is set.
void write_pointwise_labels(std::span<const PointLabel> labels, std::span<const std::uint8_t> curb_mask,
                            ClassId curb_class, const fs::path& out_path);

/// `key: value` sidecar files.
void write_metadata(const fs::path& path, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_metadata(const fs::path& path);

}  // namespace curblabel
