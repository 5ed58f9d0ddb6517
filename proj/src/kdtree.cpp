#include "curblabel/kdtree.hpp"

#include <algorithm>

#include <Eigen/Geometry>

namespace curblabel {

namespace {

constexpr std::uint32_t kLeafSize = 16;

double min_dist2(const Eigen::AlignedBox2d& box, const Vec2& c) { return box.squaredExteriorDistance(c); }

double max_dist2(const Eigen::AlignedBox2d& box, const Vec2& c) {
  const double dx = std::max(std::abs(c.x() - box.min().x()), std::abs(c.x() - box.max().x()));
  const double dy = std::max(std::abs(c.y() - box.min().y()), std::abs(c.y() - box.max().y()));
  return dx * dx + dy * dy;
}

}  // namespace

KdTree2::KdTree2(std::vector<Vec2> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t KdTree2::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  for (std::uint32_t i = begin; i < end; ++i) node.box.extend(points_[order_[i]]);
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  const Vec2 extent = node.box.sizes();
  const int dim = extent.x() >= extent.y() ? 0 : 1;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = points_[a][dim];
                     const double vb = points_[b][dim];
                     return va < vb || (va == vb && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<std::uint32_t> KdTree2::radius_search(const Vec2& center, double radius) const {
  std::vector<std::uint32_t> out;
  radius_search(center, radius, out);
  return out;
}

void KdTree2::radius_search(const Vec2& center, double radius, std::vector<std::uint32_t>& out) const {
  out.clear();
  if (nodes_.empty() || radius < 0.0) return;
  search(0, center, radius * radius, out);
  std::sort(out.begin(), out.end());
}

void KdTree2::search(std::int32_t id, const Vec2& c, double r2, std::vector<std::uint32_t>& out) const {
  const Node& node = nodes_[id];
  if (min_dist2(node.box, c) > r2) return;
  if (max_dist2(node.box, c) <= r2) {
    out.insert(out.end(), order_.begin() + node.begin, order_.begin() + node.end);
    return;
  }
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      if ((points_[idx] - c).squaredNorm() <= r2) out.push_back(idx);
    }
    return;
  }
  search(node.left, c, r2, out);
  search(node.right, c, r2, out);
}

std::size_t KdTree2::radius_count(const Vec2& center, double radius) const {
  if (nodes_.empty() || radius < 0.0) return 0;
  return count(0, center, radius * radius);
}

std::size_t KdTree2::count(std::int32_t id, const Vec2& c, double r2) const {
  const Node& node = nodes_[id];
  if (min_dist2(node.box, c) > r2) return 0;
  if (max_dist2(node.box, c) <= r2) return node.end - node.begin;
  if (node.left < 0) {
    std::size_t n = 0;
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      if ((points_[order_[i]] - c).squaredNorm() <= r2) ++n;
    }
    return n;
  }
  return count(node.left, c, r2) + count(node.right, c, r2);
}

}  // namespace curblabel
