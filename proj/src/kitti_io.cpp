#include "curblabel/kitti_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "curblabel/binary.hpp"
#include "curblabel/error.hpp"

namespace curblabel {

namespace {

constexpr std::size_t kPointRecord = 16;
constexpr std::size_t kLabelRecord = 4;
constexpr double kPoseResidualLimit = 1e-3;

Mat4 parse_3x4(const std::vector<double>& v) {
  Mat4 m = Mat4::Identity();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
  return m;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') return {};
    values.push_back(v);
  }
  return values;
}

void write_3x4(std::ostream& out, const Mat4& m) {
  char buf[64];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << buf << ((r == 2 && c == 3) ? "" : " ");
    }
  }
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

std::vector<std::size_t> numbered_files(const fs::path& dir, const std::string& ext) {
  std::vector<std::size_t> ids;
  if (!fs::is_directory(dir)) return ids;
  const std::regex pattern("^([0-9]+)$");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ext) continue;
    const std::string stem = entry.path().stem().string();
    if (std::regex_match(stem, pattern)) ids.push_back(std::stoul(stem));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::string frame_stem(std::size_t frame) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", frame);
  return buf;
}

SequencePaths SequencePaths::discover(const fs::path& sequence_dir) {
  SequencePaths p;
  p.root = sequence_dir;
  p.velodyne_dir = sequence_dir / "velodyne";
  p.labels_dir = sequence_dir / "labels";
  p.poses_file = sequence_dir / "poses.txt";
  p.calib_file = sequence_dir / "calib.txt";
  if (!fs::is_directory(p.velodyne_dir)) throw IoError("missing directory " + p.velodyne_dir.string());
  if (!fs::is_directory(p.labels_dir)) throw IoError("missing directory " + p.labels_dir.string());
  if (!fs::exists(p.poses_file)) throw IoError("missing " + p.poses_file.string());
  if (!fs::exists(p.calib_file)) throw IoError("missing " + p.calib_file.string());

  const auto clouds = numbered_files(p.velodyne_dir, ".bin");
  const auto labels = numbered_files(p.labels_dir, ".label");
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i] != i) throw ConsistencyError("velodyne frames are not consecutive at " + frame_stem(i));
  }
  if (labels.size() != clouds.size() || !std::equal(labels.begin(), labels.end(), clouds.begin())) {
    throw ConsistencyError("velodyne and label files are not paired in " + sequence_dir.string());
  }
  p.frame_count = clouds.size();

  std::ifstream poses(p.poses_file);
  std::size_t lines = 0;
  for (std::string line; std::getline(poses, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) ++lines;
  }
  if (lines < p.frame_count) {
    throw ConsistencyError(p.poses_file.string() + " has " + std::to_string(lines) + " poses for " +
                           std::to_string(p.frame_count) + " frames");
  }
  return p;
}

fs::path SequencePaths::cloud_path(std::size_t frame) const { return velodyne_dir / (frame_stem(frame) + ".bin"); }
fs::path SequencePaths::label_path(std::size_t frame) const { return labels_dir / (frame_stem(frame) + ".label"); }

std::vector<PointXYZI> read_point_cloud(const fs::path& path) {
  auto reader = binary::Reader::open(path);
  const std::size_t whole = reader.size() - reader.size() % kPointRecord;
  if (whole != reader.size()) {
    throw FormatError(path.string(), whole, "truncated point record (file size not a multiple of 16)");
  }
  std::vector<PointXYZI> cloud(reader.size() / kPointRecord);
  for (auto& p : cloud) {
    const float x = reader.get<float>();
    const float y = reader.get<float>();
    const float z = reader.get<float>();
    p.intensity = reader.get<float>();
    p.xyz = Vec3(x, y, z);
  }
  return cloud;
}

void write_point_cloud(const fs::path& path, std::span<const PointXYZI> cloud) {
  binary::Writer w;
  for (const auto& p : cloud) {
    w.put(static_cast<float>(p.xyz.x()));
    w.put(static_cast<float>(p.xyz.y()));
    w.put(static_cast<float>(p.xyz.z()));
    w.put(p.intensity);
  }
  w.save(path);
}

std::vector<PointLabel> read_labels(const fs::path& path) {
  auto reader = binary::Reader::open(path);
  const std::size_t whole = reader.size() - reader.size() % kLabelRecord;
  if (whole != reader.size()) {
    throw FormatError(path.string(), whole, "truncated label record (file size not a multiple of 4)");
  }
  std::vector<PointLabel> labels(reader.size() / kLabelRecord);
  for (auto& l : labels) l = PointLabel::unpack(reader.get<std::uint32_t>());
  return labels;
}

std::vector<PointLabel> read_labels(const fs::path& path, std::size_t expected_count, const fs::path& cloud_path) {
  auto labels = read_labels(path);
  if (labels.size() != expected_count) {
    throw ConsistencyError(path.string() + " has " + std::to_string(labels.size()) + " labels but " +
                           cloud_path.string() + " has " + std::to_string(expected_count) + " points");
  }
  return labels;
}

void write_labels(const fs::path& path, std::span<const PointLabel> labels) {
  binary::Writer w;
  for (const auto& l : labels) w.put(l.packed());
  w.save(path);
}

Mat4 read_calibration(const fs::path& calib_file) {
  std::ifstream in(calib_file);
  if (!in) throw IoError("cannot open " + calib_file.string());
  std::size_t offset = 0;
  for (std::string line; std::getline(in, line); offset += line.size() + 1) {
    if (line.rfind("Tr:", 0) != 0) continue;
    const auto values = parse_numbers(line.substr(3));
    if (values.size() != 12) throw FormatError(calib_file.string(), offset, "Tr entry needs 12 numbers");
    return parse_3x4(values);
  }
  throw CalibrationError("no Tr entry in " + calib_file.string());
}

void write_calibration(const fs::path& calib_file, const Mat4& tr) {
  std::ofstream out(calib_file);
  if (!out) throw IoError("cannot write " + calib_file.string());
  out << "Tr: ";
  write_3x4(out, tr);
  out << "\n";
}

std::vector<Pose> lidar_poses_from_camera(std::span<const Mat4> camera_poses, const Mat4& tr) {
  const Mat4 tr_inv = tr.inverse();
  std::vector<Pose> poses;
  poses.reserve(camera_poses.size());
  for (std::size_t i = 0; i < camera_poses.size(); ++i) {
    const Mat4 m = tr_inv * camera_poses[i] * tr;
    const Mat3 r = m.topLeftCorner<3, 3>();
    const double residual = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!m.allFinite() || residual > kPoseResidualLimit) {
      throw DataError("pose " + std::to_string(i) + " is not a rotation (residual " + std::to_string(residual) + ")");
    }
    Mat3 rot = nearest_rotation(r);
    if (rot.determinant() < 0) throw DataError("pose " + std::to_string(i) + " is a reflection");
    poses.emplace_back(rot, m.topRightCorner<3, 1>(), i);
  }
  return poses;
}

std::vector<Pose> read_poses(const fs::path& poses_file, const fs::path& calib_file) {
  const Mat4 tr = read_calibration(calib_file);
  std::ifstream in(poses_file);
  if (!in) throw IoError("cannot open " + poses_file.string());
  std::vector<Mat4> camera;
  std::size_t offset = 0;
  for (std::string line; std::getline(in, line); offset += line.size() + 1) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto values = parse_numbers(line);
    if (values.size() != 12) throw FormatError(poses_file.string(), offset, "pose line needs 12 numbers");
    camera.push_back(parse_3x4(values));
  }
  return lidar_poses_from_camera(camera, tr);
}

void write_poses(const fs::path& poses_file, std::span<const Pose> lidar_poses, const Mat4& tr) {
  std::ofstream out(poses_file);
  if (!out) throw IoError("cannot write " + poses_file.string());
  const Mat4 tr_inv = tr.inverse();
  for (const auto& pose : lidar_poses) {
    write_3x4(out, tr * pose.matrix() * tr_inv);
    out << "\n";
  }
}

SequenceReader::SequenceReader(SequencePaths paths)
    : paths_(std::move(paths)), poses_(read_poses(paths_.poses_file, paths_.calib_file)) {
  if (poses_.size() < paths_.frame_count) throw ConsistencyError("fewer poses than frames");
}

Frame SequenceReader::load(std::size_t frame) const {
  Frame f;
  f.index = frame;
  f.cloud = read_point_cloud(paths_.cloud_path(frame));
  f.labels = read_labels(paths_.label_path(frame), f.cloud.size(), paths_.cloud_path(frame));
  f.pose = poses_.at(frame);
  return f;
}

void write_polyline_annotation(const FrameAnnotation& annotation, const fs::path& path) {
  binary::Writer w;
  w.put_bytes("CRBA", 4);
  w.put(kAnnotationVersion);
  w.put(static_cast<std::uint32_t>(annotation.curbs.size()));
  for (const auto& curb : annotation.curbs) {
    w.put(static_cast<std::uint32_t>(curb.instance_id));
    w.put(static_cast<std::uint32_t>(curb.points.size()));
    for (const auto& p : curb.points) {
      w.put(static_cast<float>(p.x()));
      w.put(static_cast<float>(p.y()));
      w.put(static_cast<float>(p.z()));
    }
  }
  w.save(path);
}

void write_polyline_annotations(std::span<const FrameAnnotation> annotations, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create directory " + out_dir.string());
  for (const auto& a : annotations) write_polyline_annotation(a, out_dir / (frame_stem(a.frame_index) + ".curb"));
}

FrameAnnotation read_polyline_annotation(const fs::path& path, std::size_t frame_index) {
  auto r = binary::Reader::open(path);
  r.expect_magic("CRBA");
  if (r.get<std::uint32_t>() != kAnnotationVersion) r.fail("unsupported annotation version");
  FrameAnnotation a;
  a.frame_index = frame_index;
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t c = 0; c < count; ++c) {
    CurbPolyline curb;
    curb.instance_id = r.get<std::uint32_t>();
    const auto n = r.get<std::uint32_t>();
    r.require(static_cast<std::size_t>(n) * 12);
    curb.points.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const float x = r.get<float>();
      const float y = r.get<float>();
      const float z = r.get<float>();
      curb.points.emplace_back(x, y, z);
    }
    a.curbs.push_back(std::move(curb));
  }
  if (!r.at_end()) r.fail("trailing bytes after last curb");
  return a;
}

std::vector<FrameAnnotation> read_polyline_annotations(const fs::path& dir) {
  std::vector<FrameAnnotation> out;
  for (std::size_t id : numbered_files(dir, ".curb")) {
    out.push_back(read_polyline_annotation(dir / (frame_stem(id) + ".curb"), id));
  }
  return out;
}

void write_pointwise_labels(std::span<const PointLabel> labels, std::span<const std::uint8_t> curb_mask,
                            ClassId curb_class, const fs::path& out_path) {
  if (labels.size() != curb_mask.size()) {
    throw ConsistencyError("curb mask has " + std::to_string(curb_mask.size()) + " entries for " +
                           std::to_string(labels.size()) + " labels (" + out_path.string() + ")");
  }
  std::vector<PointLabel> out(labels.begin(), labels.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (curb_mask[i]) out[i].class_id = curb_class;
  }
  write_labels(out_path, out);
}

void write_metadata(const fs::path& path, const std::map<std::string, std::string>& entries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [k, v] : entries) out << k << ": " << v << "\n";
}

std::map<std::string, std::string> read_metadata(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> entries;
  std::size_t offset = 0;
  for (std::string line; std::getline(in, line); offset += line.size() + 1) {
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) throw FormatError(path.string(), offset, "expected 'key: value'");
    entries[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return entries;
}

}  // namespace curblabel
