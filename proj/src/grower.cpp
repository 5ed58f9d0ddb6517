#include "curblabel/grower.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "curblabel/error.hpp"

namespace curblabel {

namespace {

std::vector<Vec2> planar(std::span<const Vec3> points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(xy(p));
  return out;
}

void sort_by_distance(std::vector<std::uint32_t>& ids, const Vec3& from, const GrowState& state) {
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double da = (xy(state.point(a)) - xy(from)).squaredNorm();
    const double db = (xy(state.point(b)) - xy(from)).squaredNorm();
    return da < db || (da == db && a < b);
  });
}

// Todo points within `radius` of p whose bearing lies strictly inside (-half_angle, +half_angle) of d.
std::vector<std::uint32_t> fan_query(const Vec3& p, const Vec2& d, double radius, double half_angle,
                                     const GrowState& state) {
  const double cos_limit = std::cos(half_angle);
  std::vector<std::uint32_t> kept;
  for (std::uint32_t i : state.todo_within(p, radius)) {
    const Vec2 v = xy(state.point(i)) - xy(p);
    const double len = v.norm();
    if (len == 0.0 || v.dot(d) > len * cos_limit) kept.push_back(i);
  }
  return kept;
}

// Grows one arm outward from its iteration point until curbgrow stops.
void grow_arm(std::vector<std::uint32_t>& arm, const Vec3& p_init, GrowState& state, const GrowParams& params) {
  if (arm.empty()) return;
  Vec3 p = state.point(arm.back());
  const Vec2 offset = xy(p) - xy(p_init);
  if (offset.norm() == 0.0) return;
  Vec2 d = offset.normalized();
  while (true) {
    GrowStep step = curbgrow(p, d, state, params);
    if (!step.grew) break;
    arm.insert(arm.end(), step.points.begin(), step.points.end());
    p = step.next_p;
    d = step.next_d;
  }
}

}  // namespace

void GrowParams::validate() const {
  if (!(r1 > 0.0)) throw InputError("r1 must be positive");
  if (!(alpha2 > 0.0 && alpha2 <= alpha1 && alpha1 < M_PI)) throw InputError("need 0 < alpha2 <= alpha1 < pi");
  if (!(range2_factor >= 1.0)) throw InputError("range2_factor must be >= 1");
  if (psi < 1) throw InputError("psi must be >= 1");
  if (!(reaim_fraction >= 0.0 && reaim_fraction <= 1.0)) throw InputError("reaim_fraction must be in [0, 1]");
}

GrowState::GrowState(std::span<const Vec3> candidates)
    : points_(candidates.begin(), candidates.end()), tree_(planar(candidates)) {
  todo_.resize(points_.size());
  position_.resize(points_.size());
  for (std::uint32_t i = 0; i < points_.size(); ++i) {
    if (!is_finite(points_[i])) throw InputError("non-finite curb candidate at index " + std::to_string(i));
    todo_[i] = i;
    position_[i] = i;
  }
}

void GrowState::consume(std::uint32_t i) {
  const std::uint32_t pos = position_[i];
  if (pos == kConsumed) return;
  const std::uint32_t last = todo_.back();
  todo_[pos] = last;
  position_[last] = pos;
  todo_.pop_back();
  position_[i] = kConsumed;
}

std::vector<std::uint32_t> GrowState::todo_within(const Vec3& center, double radius) const {
  auto ids = tree_.radius_search(xy(center), radius);
  std::erase_if(ids, [&](std::uint32_t i) { return !is_todo(i); });
  return ids;
}

GrowStep curbgrow(const Vec3& p, const Vec2& d, GrowState& state, const GrowParams& params) {
  GrowStep step;
  step.next_p = p;
  step.next_d = d;
  step.points = fan_query(p, d, params.r1, params.alpha1, state);
  if (step.points.empty()) step.points = fan_query(p, d, params.r2(), params.alpha2, state);
  if (step.points.empty()) return step;

  sort_by_distance(step.points, p, state);
  for (std::uint32_t i : step.points) state.consume(i);
  step.grew = true;
  step.next_p = state.point(step.points.back());
  const Vec2 advance = xy(step.next_p) - xy(p);
  if (advance.norm() >= params.reaim_fraction * params.r1) step.next_d = advance.normalized();
  return step;
}

AzimuthSplit split_by_azimuth(std::span<const Vec3> neighbors, const Vec3& p_init) {
  AzimuthSplit split;
  if (neighbors.empty()) return split;
  std::size_t farthest = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    const double dist = (xy(neighbors[i]) - xy(p_init)).squaredNorm();
    if (dist > best) {
      best = dist;
      farthest = i;
    }
  }
  const Vec2 axis = xy(neighbors[farthest]) - xy(p_init);
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    const Vec2 v = xy(neighbors[i]) - xy(p_init);
    (v.dot(axis) >= 0.0 ? split.arm1 : split.arm2).push_back(i);
  }
  return split;
}

std::vector<CurbPolyline> cluster(std::span<const Vec3> candidates, const GrowParams& params, std::uint64_t seed) {
  params.validate();
  std::vector<CurbPolyline> results;
  if (candidates.empty()) return results;

  GrowState state(candidates);
  std::mt19937_64 rng(seed);
  while (state.todo_count() > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, state.todo_count() - 1);
    const std::uint32_t init = state.todo_at(pick(rng));
    const Vec3 p_init = state.point(init);

    auto neighbors = state.todo_within(p_init, params.r1);
    std::erase(neighbors, init);
    state.consume(init);
    for (std::uint32_t i : neighbors) state.consume(i);
    if (neighbors.size() < params.psi) continue;

    std::vector<Vec3> neighbor_points;
    neighbor_points.reserve(neighbors.size());
    for (std::uint32_t i : neighbors) neighbor_points.push_back(state.point(i));
    const AzimuthSplit split = split_by_azimuth(neighbor_points, p_init);

    std::vector<std::uint32_t> arm1;
    std::vector<std::uint32_t> arm2;
    for (std::size_t k : split.arm1) arm1.push_back(neighbors[k]);
    for (std::size_t k : split.arm2) arm2.push_back(neighbors[k]);
    sort_by_distance(arm1, p_init, state);
    sort_by_distance(arm2, p_init, state);
    grow_arm(arm1, p_init, state, params);
    grow_arm(arm2, p_init, state, params);

    CurbPolyline curb;
    curb.points.reserve(arm1.size() + arm2.size() + 1);
    for (auto it = arm1.rbegin(); it != arm1.rend(); ++it) curb.points.push_back(state.point(*it));
    curb.points.push_back(p_init);
    for (std::uint32_t i : arm2) curb.points.push_back(state.point(i));
    curb.points.erase(std::unique(curb.points.begin(), curb.points.end()), curb.points.end());
    if (curb.points.size() < 2) continue;
    curb.instance_id = static_cast<InstanceId>(results.size() + 1);
    results.push_back(std::move(curb));
  }
  return results;
}

}  // namespace curblabel
