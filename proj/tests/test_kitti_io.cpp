#include <Eigen/LU>

#include <cstring>
#include <fstream>
#include <random>

#include "doctest.h"

#include "curblabel/error.hpp"
#include "curblabel/kitti_io.hpp"
#include "support/helpers.hpp"

using namespace curblabel;

namespace {

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void append_f32(std::vector<unsigned char>& b, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  for (int k = 0; k < 4; ++k) b.push_back(static_cast<unsigned char>(u >> (8 * k)));
}

void append_u32(std::vector<unsigned char>& b, std::uint32_t u) {
  for (int k = 0; k < 4; ++k) b.push_back(static_cast<unsigned char>(u >> (8 * k)));
}

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("point cloud records") {
  testing::TempDir tmp;
  write_bytes(tmp / "empty.bin", {});
  CHECK(read_point_cloud(tmp / "empty.bin").empty());

  std::vector<unsigned char> one;
  for (float v : {1.0f, 2.0f, 3.0f, 0.5f}) append_f32(one, v);
  write_bytes(tmp / "one.bin", one);
  const auto cloud = read_point_cloud(tmp / "one.bin");
  REQUIRE(cloud.size() == 1);
  CHECK(cloud[0].xyz == Vec3(1, 2, 3));
  CHECK(cloud[0].intensity == 0.5f);

  one.push_back(0);
  write_bytes(tmp / "bad.bin", one);
  try {
    read_point_cloud(tmp / "bad.bin");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 16);
    CHECK(e.path() == (tmp / "bad.bin").string());
  }
}

TEST_CASE("point cloud write/read is bit exact") {
  testing::TempDir tmp;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(-80.0f, 80.0f);
  std::vector<PointXYZI> cloud(257);
  for (auto& p : cloud) p = {Vec3(u(rng), u(rng), u(rng)), std::abs(u(rng)) / 80.0f};
  write_point_cloud(tmp / "c.bin", cloud);
  const auto back = read_point_cloud(tmp / "c.bin");
  REQUIRE(back.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(back[i].xyz == cloud[i].xyz);
    CHECK(back[i].intensity == cloud[i].intensity);
  }
}

TEST_CASE("label records split into class and instance") {
  testing::TempDir tmp;
  std::vector<unsigned char> b;
  append_u32(b, 0x00000028u);
  append_u32(b, 0x00010030u);
  write_bytes(tmp / "a.label", b);
  const auto labels = read_labels(tmp / "a.label");
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == PointLabel{40, 0});
  CHECK(labels[1] == PointLabel{48, 1});

  b.push_back(1);
  write_bytes(tmp / "bad.label", b);
  CHECK_THROWS_AS(read_labels(tmp / "bad.label"), FormatError);
}

TEST_CASE("label count mismatch names both files") {
  testing::TempDir tmp;
  write_labels(tmp / "x.label", std::vector<PointLabel>(3, PointLabel{40, 0}));
  try {
    read_labels(tmp / "x.label", 4, tmp / "x.bin");
    FAIL("expected a consistency error");
  } catch (const ConsistencyError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("x.label") != std::string::npos);
    CHECK(msg.find("x.bin") != std::string::npos);
  }
}

TEST_CASE("pose conversion into the LiDAR frame") {
  testing::TempDir tmp;
  const std::string identity_line = "1 0 0 0 0 1 0 0 0 0 1 0\n";
  write_text(tmp / "poses.txt", identity_line);

  write_text(tmp / "calib.txt", "P0: 1 0 0 0 0 1 0 0 0 0 1 0\nTr: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  auto poses = read_poses(tmp / "poses.txt", tmp / "calib.txt");
  REQUIRE(poses.size() == 1);
  CHECK(poses[0].rotation().isIdentity(1e-15));
  CHECK(poses[0].translation().norm() == 0.0);

  write_text(tmp / "calib.txt", "Tr: 1 0 0 4 0 1 0 -2 0 0 1 7\n");
  poses = read_poses(tmp / "poses.txt", tmp / "calib.txt");
  CHECK(poses[0].rotation().isIdentity(1e-15));
  CHECK(poses[0].translation().norm() < 1e-15);
}

TEST_CASE("camera poses conjugated by Tr match an explicit product") {
  std::mt19937_64 rng(5);
  const Mat4 tr = testing::to_matrix(testing::random_pose(rng, 1.0));
  std::vector<Mat4> cams;
  for (int i = 0; i < 20; ++i) cams.push_back(testing::to_matrix(testing::random_pose(rng)));
  const auto lidar = lidar_poses_from_camera(cams, tr);
  for (std::size_t i = 0; i < cams.size(); ++i) {
    const Mat4 expected = tr.inverse() * cams[i] * tr;
    CHECK((testing::to_matrix(lidar[i]) - expected).cwiseAbs().maxCoeff() < 1e-9);
  }

  testing::TempDir tmp;
  write_calibration(tmp / "calib.txt", tr);
  write_poses(tmp / "poses.txt", lidar, tr);
  const auto back = read_poses(tmp / "poses.txt", tmp / "calib.txt");
  REQUIRE(back.size() == lidar.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK((testing::to_matrix(back[i]) - testing::to_matrix(lidar[i])).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("calibration and pose errors") {
  testing::TempDir tmp;
  write_text(tmp / "calib.txt", "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  write_text(tmp / "poses.txt", "1 0 0 0 0 1 0 0 0 0 1 0\n");
  CHECK_THROWS_AS(read_poses(tmp / "poses.txt", tmp / "calib.txt"), CalibrationError);

  write_text(tmp / "calib.txt", "Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  write_text(tmp / "poses.txt", "2 0 0 0 0 1 0 0 0 0 1 0\n");
  CHECK_THROWS_AS(read_poses(tmp / "poses.txt", tmp / "calib.txt"), DataError);
}

TEST_CASE("polyline annotation layout") {
  testing::TempDir tmp;
  FrameAnnotation empty;
  write_polyline_annotation(empty, tmp / "000000.curb");
  CHECK(fs::file_size(tmp / "000000.curb") == kAnnotationHeaderBytes);
  CHECK(read_polyline_annotation(tmp / "000000.curb", 0).curbs.empty());

  FrameAnnotation one;
  one.curbs.push_back({7, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, std::nullopt});
  write_polyline_annotation(one, tmp / "000001.curb");
  CHECK(fs::file_size(tmp / "000001.curb") == kAnnotationHeaderBytes + 8 + 36);
}

TEST_CASE("polyline annotations round-trip") {
  testing::TempDir tmp;
  std::vector<FrameAnnotation> frames(3);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    frames[f].frame_index = f;
    frames[f].curbs.push_back({1, {{0.5, -1.25, 0.0}, {1.5, -1.0, 0.125}}, std::nullopt});
    frames[f].curbs.push_back({4, {{10, 3, -1.5}, {11, 3, -1.5}, {12, 3.5, -1.25}}, std::nullopt});
  }
  write_polyline_annotations(frames, tmp.path());
  const auto back = read_polyline_annotations(tmp.path());
  REQUIRE(back.size() == 3);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(back[f].frame_index == f);
    REQUIRE(back[f].curbs.size() == 2);
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(back[f].curbs[c].instance_id == frames[f].curbs[c].instance_id);
      CHECK(back[f].curbs[c].points == frames[f].curbs[c].points);
    }
  }
}

TEST_CASE("truncated annotation reports its offset") {
  testing::TempDir tmp;
  FrameAnnotation one;
  one.curbs.push_back({7, {{0, 0, 0}, {1, 0, 0}}, std::nullopt});
  write_polyline_annotation(one, tmp / "a.curb");
  fs::resize_file(tmp / "a.curb", fs::file_size(tmp / "a.curb") - 2);
  CHECK_THROWS_AS(read_polyline_annotation(tmp / "a.curb", 0), FormatError);
}

TEST_CASE("point-wise label output") {
  testing::TempDir tmp;
  const std::vector<PointLabel> labels{{40, 0}, {48, 3}, {10, 2}};
  write_pointwise_labels(labels, std::vector<std::uint8_t>{0, 0, 0}, 45, tmp / "a.label");
  CHECK(read_labels(tmp / "a.label") == labels);

  write_pointwise_labels(labels, std::vector<std::uint8_t>{1, 0, 0}, 45, tmp / "b.label");
  const auto b = read_labels(tmp / "b.label");
  CHECK(b[0] == PointLabel{45, 0});
  CHECK(b[1] == labels[1]);
  CHECK(b[2] == labels[2]);

  CHECK_THROWS_AS(write_pointwise_labels(labels, std::vector<std::uint8_t>{1}, 45, tmp / "c.label"),
                  ConsistencyError);
}

TEST_CASE("sequence discovery") {
  testing::TempDir tmp;
  fs::create_directories(tmp / "velodyne");
  fs::create_directories(tmp / "labels");
  for (int i = 0; i < 3; ++i) {
    write_point_cloud(tmp.path() / "velodyne" / (frame_stem(i) + ".bin"), std::vector<PointXYZI>(2));
    write_labels(tmp.path() / "labels" / (frame_stem(i) + ".label"), std::vector<PointLabel>(2));
  }
  write_text(tmp / "calib.txt", "Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n");
  std::string poses;
  for (int i = 0; i < 3; ++i) poses += "1 0 0 " + std::to_string(i) + " 0 1 0 0 0 0 1 0\n";
  write_text(tmp / "poses.txt", poses);

  const auto paths = SequencePaths::discover(tmp.path());
  CHECK(paths.frame_count == 3);
  SequenceReader reader(paths);
  const Frame f = reader.load(2);
  CHECK(f.cloud.size() == 2);
  CHECK(f.pose.translation().x() == doctest::Approx(2.0));

  fs::remove(tmp.path() / "labels" / (frame_stem(1) + ".label"));
  CHECK_THROWS_AS(SequencePaths::discover(tmp.path()), ConsistencyError);
}

TEST_CASE("metadata sidecar round-trip") {
  testing::TempDir tmp;
  const std::map<std::string, std::string> kv{{"sequence", "00"}, {"r2", "80"}, {"note", "a: b"}};
  write_metadata(tmp / "m.txt", kv);
  CHECK(read_metadata(tmp / "m.txt") == kv);
}
