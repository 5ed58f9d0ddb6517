#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "curblabel/grower.hpp"
#include "curblabel/kdtree.hpp"
#include "support/dbscan.hpp"

using namespace curblabel;

namespace {

constexpr double kDeg = M_PI / 180.0;

Vec3 polar(double r, double bearing_deg) {
  return {r * std::cos(bearing_deg * kDeg), r * std::sin(bearing_deg * kDeg), 0.0};
}

std::vector<Vec3> line(Vec3 start, Vec3 step, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.push_back(start + step * i);
  return pts;
}

std::size_t total_points(const std::vector<CurbPolyline>& curbs) {
  std::size_t n = 0;
  for (const auto& c : curbs) n += c.points.size();
  return n;
}

}  // namespace

TEST_CASE("k-d tree radius queries match brute force") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<Vec2> pts(5000);
  for (auto& p : pts) p = Vec2(u(rng), u(rng));
  pts.push_back(pts[0]);  // exact duplicate
  const KdTree2 tree(pts);
  for (int q = 0; q < 200; ++q) {
    const Vec2 c(u(rng), u(rng));
    const double r = std::abs(u(rng)) / 5.0;
    std::vector<std::uint32_t> expected;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      if ((pts[i] - c).squaredNorm() <= r * r) expected.push_back(i);
    }
    CHECK(tree.radius_search(c, r) == expected);
    CHECK(tree.radius_count(c, r) == expected.size());
  }
  CHECK(KdTree2(std::vector<Vec2>{}).radius_search(Vec2::Zero(), 10.0).empty());
}

TEST_CASE("curbgrow with nothing in range stops") {
  const std::vector<Vec3> pts{{10, 0, 0}};
  GrowState state(pts);
  const GrowStep s = curbgrow(Vec3::Zero(), Vec2::UnitX(), state, GrowParams{});
  CHECK_FALSE(s.grew);
  CHECK(s.points.empty());
  CHECK(s.next_p == Vec3::Zero());
  CHECK(s.next_d == Vec2::UnitX());
  CHECK(state.todo_count() == 1);
}

TEST_CASE("first growth takes a point inside the wide fan") {
  const std::vector<Vec3> pts{polar(2.0, 10.0)};
  GrowState state(pts);
  const GrowStep s = curbgrow(Vec3::Zero(), Vec2::UnitX(), state, GrowParams{});
  REQUIRE(s.grew);
  CHECK(s.points == std::vector<std::uint32_t>{0});
  CHECK((s.next_p - pts[0]).norm() < 1e-12);
  CHECK(std::atan2(s.next_d.y(), s.next_d.x()) == doctest::Approx(10.0 * kDeg));
  CHECK(state.todo_count() == 0);
}

TEST_CASE("second growth bridges an occlusion inside the narrow fan") {
  const std::vector<Vec3> pts{polar(5.0, 5.0)};
  GrowState state(pts);
  const GrowStep s = curbgrow(Vec3::Zero(), Vec2::UnitX(), state, GrowParams{});
  REQUIRE(s.grew);
  CHECK(s.points.size() == 1);

  const std::vector<Vec3> off{polar(5.0, 12.0), polar(2.0, 35.0), polar(8.0, 0.0)};
  GrowState state2(off);
  CHECK_FALSE(curbgrow(Vec3::Zero(), Vec2::UnitX(), state2, GrowParams{}).grew);
  CHECK(state2.todo_count() == 3);
}

TEST_CASE("fan bounds are strict") {
  GrowParams params;
  const std::vector<Vec3> pts{polar(1.0, 30.0 + 1e-9), polar(1.0, -(30.0 + 1e-9))};
  GrowState state(pts);
  CHECK_FALSE(curbgrow(Vec3::Zero(), Vec2::UnitX(), state, params).grew);
  const std::vector<Vec3> inside{polar(1.0, 30.0 - 1e-6)};
  GrowState state2(inside);
  CHECK(curbgrow(Vec3::Zero(), Vec2::UnitX(), state2, params).grew);
}

TEST_CASE("growth points come back sorted by distance") {
  const std::vector<Vec3> pts{polar(2.0, 0), polar(0.5, 3), polar(1.5, -4), polar(1.0, 1)};
  GrowState state(pts);
  const GrowStep s = curbgrow(Vec3::Zero(), Vec2::UnitX(), state, GrowParams{});
  CHECK(s.points == std::vector<std::uint32_t>{1, 3, 2, 0});
  CHECK((s.next_p - pts[0]).norm() < 1e-12);
}

TEST_CASE("short straggler steps keep the previous direction") {
  const std::vector<Vec3> pts{{0.1, 0.05, 0.0}};
  GrowState state(pts);
  GrowStep s = curbgrow(Vec3::Zero(), Vec2::UnitX(), state, GrowParams{});
  REQUIRE(s.grew);
  CHECK(s.next_d == Vec2::UnitX());

  GrowParams literal;
  literal.reaim_fraction = 0.0;
  GrowState state2(pts);
  s = curbgrow(Vec3::Zero(), Vec2::UnitX(), state2, literal);
  CHECK(std::abs(s.next_d.y()) > 0.4);
}

TEST_CASE("azimuth split") {
  const Vec3 o = Vec3::Zero();
  std::vector<Vec3> east{{1, 0.2, 0}, {2, -0.3, 0}, {0.5, 0.1, 0}};
  AzimuthSplit s = split_by_azimuth(east, o);
  CHECK(s.arm1.size() == 3);
  CHECK(s.arm2.empty());

  const std::vector<Vec3> four{polar(2.0, 0), polar(1.0, 5), polar(1.0, 180), polar(1.5, 175)};
  s = split_by_azimuth(four, o);
  CHECK(s.arm1 == std::vector<std::size_t>{0, 1});
  CHECK(s.arm2 == std::vector<std::size_t>{2, 3});

  std::vector<Vec3> through;
  for (int i = -10; i <= 10; ++i) {
    if (i != 0) through.push_back({0.1 * i, 0.1 * i, 0});
  }
  s = split_by_azimuth(through, o);
  CHECK(s.arm1.size() == 10);
  CHECK(s.arm2.size() == 10);
  for (std::size_t k : s.arm1) CHECK(through[k].x() * through[s.arm1.front()].x() > 0);
}

TEST_CASE("small seed neighborhoods produce nothing") {
  const auto pts = line(Vec3::Zero(), Vec3(0.1, 0, 0), 5);
  CHECK(cluster(pts, GrowParams{}, 0).empty());
}

TEST_CASE("straight line becomes one ordered polyline") {
  const auto pts = line(Vec3::Zero(), Vec3(0.1, 0, 0), 200);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto curbs = cluster(pts, GrowParams{}, seed);
    REQUIRE(curbs.size() == 1);
    CHECK(curbs[0].instance_id == 1);
    CHECK(curbs[0].points.size() == 200);
    const double dir = curbs[0].points.back().x() > curbs[0].points.front().x() ? 1.0 : -1.0;
    for (std::size_t i = 1; i < curbs[0].points.size(); ++i) {
      CHECK(dir * (curbs[0].points[i].x() - curbs[0].points[i - 1].x()) > 0.0);
    }
  }
}

TEST_CASE("parallel lines stay separate and agree with DBSCAN") {
  auto pts = line(Vec3(0, 0, 0), Vec3(0.1, 0, 0), 300);
  const auto second = line(Vec3(0, 7, 0), Vec3(0.1, 0, 0), 300);
  pts.insert(pts.end(), second.begin(), second.end());
  const GrowParams params;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto curbs = cluster(pts, params, seed);
    REQUIRE(curbs.size() == 2);
    for (const auto& c : curbs) {
      const double y0 = c.points.front().y();
      for (const auto& p : c.points) CHECK(p.y() == y0);
    }
    CHECK(curbs.size() == testing::dbscan_cluster_count(pts, params.r1, params.psi + 1));
  }
}

TEST_CASE("gap bridging switches at three times r1") {
  const GrowParams params;
  const double limit = params.r2();
  for (double gap : {limit - 1e-6, limit + 1e-6, 5.0, 9.0}) {
    auto pts = line(Vec3::Zero(), Vec3(0.1, 0, 0), 200);
    const Vec3 far_start = pts.back() + Vec3(gap, 0, 0);
    const auto tail = line(far_start, Vec3(0.1, 0, 0), 200);
    pts.insert(pts.end(), tail.begin(), tail.end());
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto curbs = cluster(pts, params, seed);
      CHECK(curbs.size() == (gap <= limit ? 1u : 2u));
      CHECK(total_points(curbs) == 400);
    }
  }
}

TEST_CASE("random candidates partition cleanly") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  std::vector<Vec3> pts(3000);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), 0.0);
  const GrowParams params;
  const auto curbs = cluster(pts, params, 4);
  std::set<std::tuple<double, double>> seen;
  for (std::size_t k = 0; k < curbs.size(); ++k) {
    CHECK(curbs[k].instance_id == k + 1);
    for (std::size_t i = 0; i < curbs[k].points.size(); ++i) {
      const auto& p = curbs[k].points[i];
      CHECK(seen.emplace(p.x(), p.y()).second);
      if (i > 0) CHECK((xy(p) - xy(curbs[k].points[i - 1])).norm() <= params.r2() + 1e-12);
    }
  }
  CHECK(seen.size() <= pts.size());
}

TEST_CASE("parameter validation") {
  GrowParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha2 = p.alpha1 * 2;
  CHECK_THROWS(p.validate());
  p = GrowParams{};
  p.psi = 0;
  CHECK_THROWS(p.validate());
  CHECK(cluster(std::vector<Vec3>{}, GrowParams{}, 0).empty());
}
