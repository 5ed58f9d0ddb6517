#include "curblabel/candidates.hpp"

#include <algorithm>
#include <cmath>

#include "curblabel/error.hpp"
#include "curblabel/image_io.hpp"

namespace curblabel {

namespace {

int cells_spanning(double extent, double cell_size) {
  const double n = extent / cell_size;
  const double rounded = std::round(n);
  const double cells = std::abs(n - rounded) < 1e-9 ? rounded : std::ceil(n);
  return std::max(1, static_cast<int>(cells));
}

// Mean of values summed in sorted order, independent of insertion order.
double sorted_mean(std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

GridMap::GridMap(Vec2 origin, double cell_size, int cols, int rows)
    : origin_(std::move(origin)), cell_size_(cell_size), cols_(cols), rows_(rows),
      cells_(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows)) {
  if (!(cell_size > 0.0)) throw InputError("cell size must be positive");
}

std::optional<std::pair<int, int>> GridMap::locate(const Vec2& p) const {
  const double fx = std::floor((p.x() - origin_.x()) / cell_size_);
  const double fy = std::floor((p.y() - origin_.y()) / cell_size_);
  if (fx < 0 || fy < 0 || fx >= cols_ || fy >= rows_) return std::nullopt;
  return std::make_pair(static_cast<int>(fx), static_cast<int>(fy));
}

std::size_t GridMap::count(CellCategory category) const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [&](const GridCell& c) { return c.category == category; }));
}

GridMap rasterize(const SubMap& submap, const ClassPolicy& policy, double cell_size) {
  if (!(cell_size > 0.0)) throw InputError("cell size must be positive");
  Eigen::AlignedBox2d box = submap.bounds;
  for (const auto& p : submap.points) box.extend(xy(p.point.xyz));
  if (box.isEmpty()) box = Eigen::AlignedBox2d(Vec2::Zero(), Vec2::Zero());

  const Vec2 extent = box.sizes();
  GridMap grid(box.min(), cell_size, cells_spanning(extent.x(), cell_size), cells_spanning(extent.y(), cell_size));

  for (std::uint32_t i = 0; i < submap.points.size(); ++i) {
    const auto& sp = submap.points[i];
    const bool road = policy.is_road(sp.class_id);
    const bool nonroad = policy.is_nonroad(sp.class_id);
    if (!road && !nonroad) continue;
    const Vec2 rel = (xy(sp.point.xyz) - grid.origin()) / cell_size;
    const int ix = std::clamp(static_cast<int>(std::floor(rel.x())), 0, grid.cols() - 1);
    const int iy = std::clamp(static_cast<int>(std::floor(rel.y())), 0, grid.rows() - 1);
    GridCell& cell = grid.at(ix, iy);
    cell.point_refs.push_back(i);
    if (road) {
      ++cell.road_count;
    } else {
      ++cell.nonroad_count;
    }
  }

  std::vector<double> road_z;
  std::vector<double> nonroad_z;
  for (auto& cell : grid.cells()) {
    if (cell.point_refs.empty()) continue;
    road_z.clear();
    nonroad_z.clear();
    for (std::uint32_t ref : cell.point_refs) {
      const auto& sp = submap.points[ref];
      (policy.is_road(sp.class_id) ? road_z : nonroad_z).push_back(sp.point.xyz.z());
    }
    cell.road_height_mean = sorted_mean(road_z);
    cell.nonroad_height_mean = sorted_mean(nonroad_z);
    cell.category = cell.road_count > 0 ? CellCategory::Road : CellCategory::NonRoad;
  }
  return grid;
}

GridMap classify_cells(GridMap grid, double height_threshold) {
  for (auto& cell : grid.cells()) {
    if (cell.road_count == 0 && cell.nonroad_count == 0) {
      cell.category = CellCategory::Unknown;
    } else if (cell.road_count == 0) {
      cell.category = CellCategory::NonRoad;
    } else if (cell.nonroad_count == 0) {
      cell.category = CellCategory::Road;
    } else if (std::abs(cell.road_height_mean - cell.nonroad_height_mean) <= height_threshold) {
      cell.category = CellCategory::Curb;
    } else {
      cell.category = CellCategory::Road;
    }
  }
  return grid;
}

std::vector<Vec3> extract_candidates(const GridMap& grid, const SubMap& submap, CandidateMode mode) {
  std::vector<Vec3> out;
  for (const auto& cell : grid.cells()) {
    if (cell.category != CellCategory::Curb) continue;
    if (mode == CandidateMode::CellCentroid) {
      Vec3 sum = Vec3::Zero();
      for (std::uint32_t ref : cell.point_refs) sum += submap.points[ref].point.xyz;
      out.push_back(sum / static_cast<double>(cell.point_refs.size()));
    } else {
      for (std::uint32_t ref : cell.point_refs) out.push_back(submap.points[ref].point.xyz);
    }
  }
  return out;
}

void write_grid_image(const GridMap& grid, const std::filesystem::path& path) {
  RgbImage img(grid.cols(), grid.rows());
  for (int iy = 0; iy < grid.rows(); ++iy) {
    for (int ix = 0; ix < grid.cols(); ++ix) {
      Rgb color{0, 0, 0};
      switch (grid.at(ix, iy).category) {
        case CellCategory::Road: color = {0, 0, 255}; break;
        case CellCategory::NonRoad: color = {0, 200, 0}; break;
        case CellCategory::Curb: color = {255, 0, 0}; break;
        case CellCategory::Unknown: break;
      }
      img.set(ix, grid.rows() - 1 - iy, color);
    }
  }
  write_ppm(img, path);
}

}  // namespace curblabel
