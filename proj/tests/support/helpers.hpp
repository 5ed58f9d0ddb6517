#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "curblabel/types.hpp"

namespace testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "curblabel-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Uniformly random rotation (via a random unit quaternion) and translation in a +-range box.
inline curblabel::Pose random_pose(std::mt19937_64& rng, double range = 500.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-range, range);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return curblabel::Pose(q.toRotationMatrix(), curblabel::Vec3(u(rng), u(rng), u(rng)));
}

inline curblabel::Vec3 random_point(std::mt19937_64& rng, double range = 100.0) {
  std::uniform_real_distribution<double> u(-range, range);
  return {u(rng), u(rng), u(rng)};
}

/// Homogeneous 4x4 product written out by hand, independent of Pose.
inline curblabel::Vec3 homogeneous_apply(const curblabel::Mat4& m, const curblabel::Vec3& p) {
  double out[4] = {0, 0, 0, 0};
  const double in[4] = {p.x(), p.y(), p.z(), 1.0};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out[r] += m(r, c) * in[c];
  }
  return {out[0] / out[3], out[1] / out[3], out[2] / out[3]};
}

inline curblabel::Mat4 to_matrix(const curblabel::Pose& pose) {
  curblabel::Mat4 m = curblabel::Mat4::Identity();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = pose.rotation()(r, c);
    m(r, 3) = pose.translation()(r);
  }
  return m;
}

}  // namespace testing
