#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "curblabel/class_policy.hpp"
#include "curblabel/map_builder.hpp"

namespace curblabel {

enum class CellCategory : std::uint8_t { Unknown = 0, Road = 1, NonRoad = 2, Curb = 3 };

struct GridCell {
  CellCategory category = CellCategory::Unknown;
  double road_height_mean = 0.0;
  double nonroad_height_mean = 0.0;
  std::uint32_t road_count = 0;
  std::uint32_t nonroad_count = 0;
  std::vector<std::uint32_t> point_refs;  // indices into SubMap::points, ascending
};

/// 2D occupancy grid over one sub-map; cell (ix, iy) covers
/// [origin + (ix, iy) * cell_size, origin + (ix + 1, iy + 1) * cell_size).
class GridMap {
 public:
  GridMap() = default;
  GridMap(Vec2 origin, double cell_size, int cols, int rows);

  const Vec2& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  std::size_t cell_count() const { return cells_.size(); }

  GridCell& at(int ix, int iy) { return cells_[static_cast<std::size_t>(iy) * cols_ + ix]; }
  const GridCell& at(int ix, int iy) const { return cells_[static_cast<std::size_t>(iy) * cols_ + ix]; }
  std::vector<GridCell>& cells() { return cells_; }
  const std::vector<GridCell>& cells() const { return cells_; }

  /// Cell containing (x, y), or nullopt outside the grid.
  std::optional<std::pair<int, int>> locate(const Vec2& p) const;
  std::size_t count(CellCategory category) const;

 private:
  Vec2 origin_ = Vec2::Zero();
  double cell_size_ = 1.0;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<GridCell> cells_;
};

/// Bins road and non-road points of the sub-map; other classes are ignored.
/// Categories are left as Road / NonRoad / Unknown by occupancy until classify_cells runs.
GridMap rasterize(const SubMap& submap, const ClassPolicy& policy, double cell_size);

/// A cell is Curb when it holds both road and non-road points whose mean heights differ
/// by at most `height_threshold`. Mixed cells failing the height test (vegetation overhanging
/// the road) are Road cells.
GridMap classify_cells(GridMap grid, double height_threshold);

enum class CandidateMode { AllPoints, CellCentroid };

/// Points referenced by Curb cells, in cell-major order. CellCentroid emits one mean point per cell.
std::vector<Vec3> extract_candidates(const GridMap& grid, const SubMap& submap,
                                     CandidateMode mode = CandidateMode::AllPoints);

/// Writes the grid as a color-coded PPM (road blue, non-road green, curb red, unknown black).
void write_grid_image(const GridMap& grid, const std::filesystem::path& path);

}  // namespace curblabel
