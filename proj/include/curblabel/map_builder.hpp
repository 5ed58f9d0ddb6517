#pragma once

#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Geometry>

#include "curblabel/class_policy.hpp"
#include "curblabel/kitti_io.hpp"
#include "curblabel/types.hpp"

namespace curblabel {

/// A square tile of the road map in global coordinates.
struct SubMap {
  TileIndex tile_index;
  Eigen::AlignedBox2d bounds;  // [min, max) in x and y
  std::vector<SemanticPoint> points;
};

/// Produces frames one at a time; an empty optional ends the stream.
using FrameStream = std::function<std::optional<Frame>()>;

/// Global semantic map with dynamic classes removed, deduplicated on a voxel grid.
///
/// Each voxel keeps one point per class: the one with the smallest (frame, point)
/// insertion key. That makes merge() associative and commutative, so partial maps
/// built over disjoint frame chunks combine into the same result in any order.
class RhdAccumulator {
 public:
  RhdAccumulator(ClassPolicy policy, double voxel_size);

  /// Throws ConsistencyError if the label count differs from the cloud size and
  /// InputError for classes outside the policy's class table.
  void add_frame(std::size_t frame_index, std::span<const PointXYZI> cloud, std::span<const PointLabel> labels,
                 const Pose& pose);
  void merge(RhdAccumulator&& other);

  std::size_t size() const { return voxels_.size(); }
  std::size_t dynamic_dropped() const { return dynamic_dropped_; }
  /// Surviving points ordered by insertion key.
  std::vector<SemanticPoint> points() const;

 private:
  struct VoxelKey {
    std::int32_t ix, iy, iz;
    ClassId cls;
    friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
  };
  struct VoxelHash {
    std::size_t operator()(const VoxelKey& k) const noexcept;
  };
  struct Entry {
    std::uint64_t order;
    SemanticPoint point;
  };

  ClassPolicy policy_;
  double voxel_size_;
  std::unordered_map<VoxelKey, Entry, VoxelHash> voxels_;
  std::size_t dynamic_dropped_ = 0;
};

/// Splits points into disjoint tiles with tile_index = floor((x, y) / tile_size).
/// Tiles come back sorted by index; point order inside a tile is preserved.
std::vector<SubMap> tile_partition(std::span<const SemanticPoint> points, double tile_size);

/// Folds a frame stream into the road map and tiles it.
std::vector<SubMap> accumulate_rhd(const FrameStream& frames, const ClassPolicy& policy, double voxel_size,
                                   double tile_size);

}  // namespace curblabel
