#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "curblabel/kdtree.hpp"
#include "curblabel/types.hpp"

namespace curblabel {

struct GrowParams {
  double r1 = 2.6;                       // first growing range / seed radius, meters
  double alpha1 = 30.0 * M_PI / 180.0;   // first valid half-angle
  double range2_factor = 3.0;            // second range = range2_factor * r1
  double alpha2 = 10.0 * M_PI / 180.0;   // second valid half-angle
  std::size_t psi = 6;                   // minimum seed neighborhood size
  double reaim_fraction = 0.5;           // steps shorter than this fraction of r1 keep the old direction

  double r2() const { return range2_factor * r1; }
  /// Throws InputError unless r1 > 0, 0 < alpha2 <= alpha1 < pi, range2_factor >= 1, psi >= 1,
  /// 0 <= reaim_fraction <= 1.
  void validate() const;
};

/// Candidate points, their static 2D index and the not-yet-consumed ("todo") set.
class GrowState {
 public:
  explicit GrowState(std::span<const Vec3> candidates);

  const Vec3& point(std::uint32_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  const KdTree2& tree() const { return tree_; }

  bool is_todo(std::uint32_t i) const { return position_[i] != kConsumed; }
  std::size_t todo_count() const { return todo_.size(); }
  /// k-th member of the todo set (0 <= k < todo_count()); order is arbitrary but deterministic.
  std::uint32_t todo_at(std::size_t k) const { return todo_[k]; }
  void consume(std::uint32_t i);

  /// Todo members within `radius` (2D, inclusive) of `center`, ascending index.
  std::vector<std::uint32_t> todo_within(const Vec3& center, double radius) const;

 private:
  static constexpr std::uint32_t kConsumed = UINT32_MAX;
  std::vector<Vec3> points_;
  KdTree2 tree_;
  std::vector<std::uint32_t> todo_;
  std::vector<std::uint32_t> position_;
};

/// Result of one growth step.
struct GrowStep {
  std::vector<std::uint32_t> points;  // consumed this step, ascending 2D distance from p
  Vec3 next_p = Vec3::Zero();
  Vec2 next_d = Vec2::UnitX();
  bool grew = false;
};

/// One dual-range growth step from iteration point `p` along unit direction `d`.
///
/// Stage one keeps todo points within r1 whose bearing from p is strictly inside
/// (-alpha1, +alpha1) of d. If none exist, stage two repeats the query with range
/// range2_factor * r1 and half-angle alpha2. Kept points are consumed and sorted by
/// 2D distance from p; the farthest becomes the next iteration point. The direction is
/// re-aimed at it when the step advanced at least reaim_fraction * r1; a shorter step
/// (a few stragglers at the end of a strip) keeps d, since its bearing is mostly lateral
/// noise. When both stages are empty nothing is consumed.
GrowStep curbgrow(const Vec3& p, const Vec2& d, GrowState& state, const GrowParams& params);

/// Two-arm split of a seed neighborhood: arm1 holds the neighbors whose azimuth is within
/// +-90 degrees of the farthest neighbor's azimuth, arm2 the rest. Indices refer to `neighbors`.
struct AzimuthSplit {
  std::vector<std::size_t> arm1;
  std::vector<std::size_t> arm2;
};
AzimuthSplit split_by_azimuth(std::span<const Vec3> neighbors, const Vec3& p_init);

/// Clusters and orders curb candidates into polylines. Seeds are drawn uniformly from the
/// todo set with a generator seeded by `seed`; seed neighborhoods smaller than psi are
/// consumed without producing a polyline. Each polyline is ordered end to end as
/// reverse(arm1 growth) + seed + arm2 growth; instance ids are 1..N in creation order.
std::vector<CurbPolyline> cluster(std::span<const Vec3> candidates, const GrowParams& params,
                                  std::uint64_t seed = 0);

}  // namespace curblabel
