#include "curblabel/map_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "curblabel/binary.hpp"
#include "curblabel/error.hpp"
#include "curblabel/image_io.hpp"

namespace curblabel {

namespace {

constexpr std::uint32_t kVersion = 1;

void put_string(binary::Writer& w, const std::string& s) {
  w.put(static_cast<std::uint32_t>(s.size()));
  w.put_bytes(s.data(), s.size());
}

std::string get_string(binary::Reader& r) {
  const auto n = r.get<std::uint32_t>();
  r.require(n);
  std::string s;
  s.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) s.push_back(static_cast<char>(r.get<std::uint8_t>()));
  return s;
}

void put_curbs(binary::Writer& w, std::span<const CurbPolyline> curbs) {
  w.put(static_cast<std::uint32_t>(curbs.size()));
  for (const auto& c : curbs) {
    w.put(static_cast<std::uint32_t>(c.instance_id));
    w.put(static_cast<std::uint8_t>(c.source_tile.has_value()));
    w.put(c.source_tile ? c.source_tile->ix : std::int32_t{0});
    w.put(c.source_tile ? c.source_tile->iy : std::int32_t{0});
    w.put(static_cast<std::uint32_t>(c.points.size()));
    for (const auto& p : c.points) {
      w.put(p.x());
      w.put(p.y());
      w.put(p.z());
    }
  }
}

std::vector<CurbPolyline> get_curbs(binary::Reader& r) {
  const auto count = r.get<std::uint32_t>();
  std::vector<CurbPolyline> curbs;
  for (std::uint32_t c = 0; c < count; ++c) {
    CurbPolyline curb;
    curb.instance_id = r.get<std::uint32_t>();
    const auto has_tile = r.get<std::uint8_t>();
    const auto ix = r.get<std::int32_t>();
    const auto iy = r.get<std::int32_t>();
    if (has_tile > 1) r.fail("bad tile flag");
    if (has_tile) curb.source_tile = TileIndex{ix, iy};
    const auto n = r.get<std::uint32_t>();
    r.require(static_cast<std::size_t>(n) * 24);
    curb.points.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const double x = r.get<double>();
      const double y = r.get<double>();
      const double z = r.get<double>();
      curb.points.emplace_back(x, y, z);
    }
    curbs.push_back(std::move(curb));
  }
  return curbs;
}

}  // namespace

void write_submap(const SubMap& submap, const std::filesystem::path& path) {
  binary::Writer w;
  w.put_bytes("RHDT", 4);
  w.put(kVersion);
  w.put(submap.tile_index.ix);
  w.put(submap.tile_index.iy);
  w.put(submap.bounds.min().x());
  w.put(submap.bounds.min().y());
  w.put(submap.bounds.max().x());
  w.put(submap.bounds.max().y());
  w.put(static_cast<std::uint64_t>(submap.points.size()));
  for (const auto& p : submap.points) {
    w.put(p.point.xyz.x());
    w.put(p.point.xyz.y());
    w.put(p.point.xyz.z());
    w.put(p.point.intensity);
    w.put(p.class_id);
    w.put(p.instance_id);
  }
  w.save(path);
}

SubMap read_submap(const std::filesystem::path& path) {
  auto r = binary::Reader::open(path);
  r.expect_magic("RHDT");
  if (r.get<std::uint32_t>() != kVersion) r.fail("unsupported tile version");
  SubMap s;
  s.tile_index.ix = r.get<std::int32_t>();
  s.tile_index.iy = r.get<std::int32_t>();
  Vec2 lo, hi;
  lo.x() = r.get<double>();
  lo.y() = r.get<double>();
  hi.x() = r.get<double>();
  hi.y() = r.get<double>();
  s.bounds = Eigen::AlignedBox2d(lo, hi);
  const auto n = r.get<std::uint64_t>();
  if (n > (r.size() - r.offset()) / 32) r.fail("point count exceeds file size");
  s.points.resize(n);
  for (auto& p : s.points) {
    p.point.xyz.x() = r.get<double>();
    p.point.xyz.y() = r.get<double>();
    p.point.xyz.z() = r.get<double>();
    p.point.intensity = r.get<float>();
    p.class_id = r.get<ClassId>();
    p.instance_id = r.get<std::uint16_t>();
  }
  if (!r.at_end()) r.fail("trailing bytes after last point");
  return s;
}

void write_submaps(std::span<const SubMap> submaps, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& s : submaps) {
    write_submap(s, dir / ("tile_" + std::to_string(s.tile_index.ix) + "_" + std::to_string(s.tile_index.iy) + ".rhd"));
  }
}

std::vector<SubMap> read_submaps(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".rhd") files.push_back(e.path());
  }
  std::vector<SubMap> out;
  for (const auto& f : files) out.push_back(read_submap(f));
  std::sort(out.begin(), out.end(), [](const SubMap& a, const SubMap& b) { return a.tile_index < b.tile_index; });
  return out;
}

void write_tile_curbs(std::span<const TileCurbs> tiles, const std::filesystem::path& path) {
  binary::Writer w;
  w.put_bytes("TCRB", 4);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(tiles.size()));
  for (const auto& t : tiles) {
    w.put(t.tile.ix);
    w.put(t.tile.iy);
    put_curbs(w, t.curbs);
  }
  w.save(path);
}

std::vector<TileCurbs> read_tile_curbs(const std::filesystem::path& path) {
  auto r = binary::Reader::open(path);
  r.expect_magic("TCRB");
  if (r.get<std::uint32_t>() != kVersion) r.fail("unsupported tile-curb version");
  const auto n = r.get<std::uint32_t>();
  std::vector<TileCurbs> out;
  for (std::uint32_t i = 0; i < n; ++i) {
    TileCurbs t;
    t.tile.ix = r.get<std::int32_t>();
    t.tile.iy = r.get<std::int32_t>();
    t.curbs = get_curbs(r);
    out.push_back(std::move(t));
  }
  if (!r.at_end()) r.fail("trailing bytes after last tile");
  return out;
}

void write_cimap(const CIMap& map, const std::filesystem::path& path) {
  binary::Writer w;
  w.put_bytes("CIMP", 4);
  w.put(kVersion);
  put_string(w, map.sequence_id);
  w.put(static_cast<std::uint32_t>(map.parameters.size()));
  for (const auto& [k, v] : map.parameters) {
    put_string(w, k);
    put_string(w, v);
  }
  put_curbs(w, map.curbs);
  w.save(path);
}

CIMap read_cimap(const std::filesystem::path& path) {
  auto r = binary::Reader::open(path);
  r.expect_magic("CIMP");
  if (r.get<std::uint32_t>() != kVersion) r.fail("unsupported CI map version");
  CIMap map;
  map.sequence_id = get_string(r);
  const auto n_params = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_params; ++i) {
    std::string k = get_string(r);
    map.parameters[k] = get_string(r);
  }
  map.curbs = get_curbs(r);
  if (!r.at_end()) r.fail("trailing bytes after last curb");
  return map;
}

void write_cimap_text(const CIMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char line[128];
  for (const auto& c : map.curbs) {
    for (const auto& p : c.points) {
      std::snprintf(line, sizeof line, "%u %.6f %.6f %.6f\n", c.instance_id, p.x(), p.y(), p.z());
      out << line;
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_cimap_image(const CIMap& map, const std::filesystem::path& path, double resolution) {
  if (!(resolution > 0.0)) throw InputError("image resolution must be positive");
  Eigen::AlignedBox2d box;
  for (const auto& c : map.curbs) {
    for (const auto& p : c.points) box.extend(xy(p));
  }
  if (box.isEmpty()) box = Eigen::AlignedBox2d(Vec2::Zero(), Vec2::Zero());
  const Vec2 lo = box.min() - Vec2::Constant(2.0);
  const Vec2 hi = box.max() + Vec2::Constant(2.0);
  const int w = std::min(8192, static_cast<int>(std::ceil((hi.x() - lo.x()) / resolution)));
  const int h = std::min(8192, static_cast<int>(std::ceil((hi.y() - lo.y()) / resolution)));
  RgbImage img(w, h);
  for (const auto& c : map.curbs) {
    const Rgb color = instance_color(c.instance_id);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      // Dense stepping between consecutive points so segments render as lines.
      const Vec2 a = xy(c.points[i == 0 ? 0 : i - 1]);
      const Vec2 b = xy(c.points[i]);
      const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm() / (0.5 * resolution))));
      for (int s = 0; s <= steps; ++s) {
        const Vec2 q = a + (b - a) * (static_cast<double>(s) / steps);
        const int col = static_cast<int>((q.x() - lo.x()) / resolution);
        const int row = h - 1 - static_cast<int>((q.y() - lo.y()) / resolution);
        if (col >= 0 && col < w && row >= 0 && row < h) img.set(col, row, color);
      }
    }
  }
  write_ppm(img, path);
}

}  // namespace curblabel
