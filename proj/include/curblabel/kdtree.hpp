#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "curblabel/types.hpp"

namespace curblabel {

/// Static 2D k-d tree for radius queries. Built once, never mutated; callers that
/// need deletions keep their own membership flags and filter query results.
class KdTree2 {
 public:
  KdTree2() = default;
  explicit KdTree2(std::vector<Vec2> points);

  /// Indices of all points with ||p - center|| <= radius, ascending.
  std::vector<std::uint32_t> radius_search(const Vec2& center, double radius) const;
  void radius_search(const Vec2& center, double radius, std::vector<std::uint32_t>& out) const;
  /// Same predicate as radius_search, counting only.
  std::size_t radius_count(const Vec2& center, double radius) const;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec2& point(std::uint32_t i) const { return points_[i]; }

 private:
  struct Node {
    Eigen::AlignedBox2d box;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec2& c, double r2, std::vector<std::uint32_t>& out) const;
  std::size_t count(std::int32_t node, const Vec2& c, double r2) const;

  std::vector<Vec2> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace curblabel
