#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "curblabel/error.hpp"
#include "curblabel/types.hpp"
#include "support/helpers.hpp"

using namespace curblabel;

TEST_CASE("identity pose leaves points unchanged") {
  const std::vector<Vec3> pts{{1, 2, 3}};
  const auto out = transform_points(pts, Pose::identity());
  CHECK((out[0] - Vec3(1, 2, 3)).norm() == 0.0);
  CHECK((inverse_transform_points(pts, Pose::identity())[0] - Vec3(1, 2, 3)).norm() == 0.0);
}

TEST_CASE("quarter-turn yaw maps x onto y") {
  const std::vector<Vec3> pts{{1, 0, 0}};
  const auto out = transform_points(pts, Pose::from_yaw(M_PI / 2, Vec3::Zero()));
  CHECK((out[0] - Vec3(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("pure translation inverse") {
  const std::vector<Vec3> pts{{5, 0, 0}};
  const auto out = inverse_transform_points(pts, Pose(Mat3::Identity(), Vec3(5, 0, 0)));
  CHECK(out[0].norm() == 0.0);
}

TEST_CASE("transform agrees with a homogeneous matrix product and round-trips") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Pose pose = testing::random_pose(rng);
    const Vec3 p = testing::random_point(rng);
    const std::vector<Vec3> in{p};
    const Vec3 fwd = transform_points(in, pose)[0];
    CHECK((fwd - testing::homogeneous_apply(testing::to_matrix(pose), p)).norm() < 1e-9);
    const std::vector<Vec3> mid{fwd};
    CHECK((inverse_transform_points(mid, pose)[0] - p).norm() < 1e-9);
  }
}

TEST_CASE("pose composition matches sequential application") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Pose a = testing::random_pose(rng);
    const Pose b = testing::random_pose(rng);
    const Vec3 p = testing::random_point(rng);
    CHECK(((a * b).apply(p) - a.apply(b.apply(p))).norm() < 1e-9);
    CHECK(((a * a.inverse()).apply(p) - p).norm() < 1e-9);
    CHECK((Pose::from_matrix(a.matrix()).apply(p) - a.apply(p)).norm() < 1e-12);
  }
}

TEST_CASE("pose rejects non-rotations") {
  Mat3 scaled = Mat3::Identity() * 1.01;
  CHECK_THROWS_AS(Pose(scaled, Vec3::Zero()), InputError);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1;
  CHECK_THROWS_AS(Pose(reflection, Vec3::Zero()), InputError);
}

TEST_CASE("non-finite points are rejected") {
  const std::vector<Vec3> pts{{std::numeric_limits<double>::quiet_NaN(), 0, 0}};
  CHECK_THROWS_AS(transform_points(pts, Pose::identity()), InputError);
  const std::vector<Vec3> inf{{0, std::numeric_limits<double>::infinity(), 0}};
  CHECK_THROWS_AS(inverse_transform_points(inf, Pose::identity()), InputError);
}

TEST_CASE("label packing splits class and instance halves") {
  CHECK(PointLabel::unpack(0x00000028u) == PointLabel{40, 0});
  CHECK(PointLabel::unpack(0x00010030u) == PointLabel{48, 1});
  CHECK(PointLabel{48, 1}.packed() == 0x00010030u);
}

TEST_CASE("arc length and polyline validity") {
  CurbPolyline c;
  c.points = {{0, 0, 5}, {3, 4, -1}, {3, 5, 0}};
  const auto s = arc_length_2d(c.points);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == 0.0);
  CHECK(s[1] == doctest::Approx(5.0));
  CHECK(s[2] == doctest::Approx(6.0));
  CHECK(is_valid_polyline(c));
  c.points.push_back(c.points.back());
  CHECK_FALSE(is_valid_polyline(c));
  c.points = {{0, 0, 0}};
  CHECK_FALSE(is_valid_polyline(c));
}
