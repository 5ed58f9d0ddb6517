#include "curblabel/map_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "curblabel/error.hpp"

namespace curblabel {

std::size_t RhdAccumulator::VoxelHash::operator()(const VoxelKey& k) const noexcept {
  std::uint64_t h = static_cast<std::uint32_t>(k.ix) * 0x9E3779B97F4A7C15ull;
  h ^= (static_cast<std::uint32_t>(k.iy) + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2)) * 0xBF58476D1CE4E5B9ull;
  h ^= (static_cast<std::uint32_t>(k.iz) + 0x94D049BB133111EBull + (h << 6) + (h >> 2)) * 0x94D049BB133111EBull;
  h ^= k.cls + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h ^ (h >> 31));
}

RhdAccumulator::RhdAccumulator(ClassPolicy policy, double voxel_size)
    : policy_(std::move(policy)), voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0)) throw InputError("voxel size must be positive");
  policy_.validate();
}

void RhdAccumulator::add_frame(std::size_t frame_index, std::span<const PointXYZI> cloud,
                               std::span<const PointLabel> labels, const Pose& pose) {
  if (cloud.size() != labels.size()) {
    throw ConsistencyError("frame " + std::to_string(frame_index) + ": " + std::to_string(cloud.size()) +
                           " points but " + std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const ClassId cls = labels[i].class_id;
    if (!policy_.is_known(cls)) {
      throw InputError("frame " + std::to_string(frame_index) + ": class " + std::to_string(cls) +
                       " is not in the class table");
    }
    if (policy_.is_dynamic(cls)) {
      ++dynamic_dropped_;
      continue;
    }
    if (!is_finite(cloud[i].xyz)) throw InputError("frame " + std::to_string(frame_index) + ": non-finite point");
    const Vec3 g = pose.apply(cloud[i].xyz);
    const VoxelKey key{static_cast<std::int32_t>(std::floor(g.x() / voxel_size_)),
                       static_cast<std::int32_t>(std::floor(g.y() / voxel_size_)),
                       static_cast<std::int32_t>(std::floor(g.z() / voxel_size_)), cls};
    const std::uint64_t order = (static_cast<std::uint64_t>(frame_index) << 32) | i;
    Entry entry{order, SemanticPoint{PointXYZI{g, cloud[i].intensity}, cls, labels[i].instance_id}};
    auto [it, inserted] = voxels_.try_emplace(key, entry);
    if (!inserted && order < it->second.order) it->second = entry;
  }
}

void RhdAccumulator::merge(RhdAccumulator&& other) {
  dynamic_dropped_ += other.dynamic_dropped_;
  if (other.voxels_.size() > voxels_.size()) std::swap(voxels_, other.voxels_);
  for (auto& [key, entry] : other.voxels_) {
    auto [it, inserted] = voxels_.try_emplace(key, entry);
    if (!inserted && entry.order < it->second.order) it->second = entry;
  }
  other.voxels_.clear();
}

std::vector<SemanticPoint> RhdAccumulator::points() const {
  std::vector<const Entry*> entries;
  entries.reserve(voxels_.size());
  for (const auto& [key, entry] : voxels_) entries.push_back(&entry);
  std::sort(entries.begin(), entries.end(), [](const Entry* a, const Entry* b) { return a->order < b->order; });
  std::vector<SemanticPoint> out;
  out.reserve(entries.size());
  for (const Entry* e : entries) out.push_back(e->point);
  return out;
}

std::vector<SubMap> tile_partition(std::span<const SemanticPoint> points, double tile_size) {
  if (!(tile_size > 0.0)) throw InputError("tile size must be positive");
  std::map<TileIndex, SubMap> tiles;
  for (const auto& p : points) {
    if (!is_finite(p.point.xyz)) throw InputError("non-finite point in tile partition");
    const TileIndex t{static_cast<std::int32_t>(std::floor(p.point.xyz.x() / tile_size)),
                      static_cast<std::int32_t>(std::floor(p.point.xyz.y() / tile_size))};
    auto [it, inserted] = tiles.try_emplace(t);
    if (inserted) {
      it->second.tile_index = t;
      it->second.bounds = Eigen::AlignedBox2d(Vec2(t.ix * tile_size, t.iy * tile_size),
                                              Vec2((t.ix + 1) * tile_size, (t.iy + 1) * tile_size));
    }
    it->second.points.push_back(p);
  }
  std::vector<SubMap> out;
  out.reserve(tiles.size());
  for (auto& [t, sub] : tiles) out.push_back(std::move(sub));
  return out;
}

std::vector<SubMap> accumulate_rhd(const FrameStream& frames, const ClassPolicy& policy, double voxel_size,
                                   double tile_size) {
  RhdAccumulator acc(policy, voxel_size);
  while (auto frame = frames()) acc.add_frame(frame->index, frame->cloud, frame->labels, frame->pose);
  const auto points = acc.points();
  return tile_partition(points, tile_size);
}

}  // namespace curblabel
