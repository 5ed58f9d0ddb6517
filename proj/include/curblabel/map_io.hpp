#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "curblabel/map_builder.hpp"
#include "curblabel/postprocess.hpp"
#include "curblabel/types.hpp"

namespace curblabel {

// Road-map tile file (little-endian):
//   char[4] "RHDT" | u32 version (1) | i32 ix | i32 iy | f64 min_x, min_y, max_x, max_y | u64 count
//   count x (f64 x, f64 y, f64 z, f32 intensity, u16 class, u16 instance)
void write_submap(const SubMap& submap, const std::filesystem::path& path);
SubMap read_submap(const std::filesystem::path& path);
/// One tile_<ix>_<iy>.rhd file per tile.
void write_submaps(std::span<const SubMap> submaps, const std::filesystem::path& dir);
/// Every .rhd file of a directory, sorted by tile index.
std::vector<SubMap> read_submaps(const std::filesystem::path& dir);

// Per-tile curbs file:
//   char[4] "TCRB" | u32 version (1) | u32 tile_count
//   per tile: i32 ix | i32 iy | u32 curb_count | curbs
// CI map file:
//   char[4] "CIMP" | u32 version (1) | string sequence_id | u32 param_count | param_count x (string, string)
//   u32 curb_count | curbs
// where string = u32 length + bytes and each curb is
//   u32 instance_id | u8 has_tile | i32 ix | i32 iy | u32 n | n x (f64 x, f64 y, f64 z)
void write_tile_curbs(std::span<const TileCurbs> tiles, const std::filesystem::path& path);
std::vector<TileCurbs> read_tile_curbs(const std::filesystem::path& path);

void write_cimap(const CIMap& map, const std::filesystem::path& path);
CIMap read_cimap(const std::filesystem::path& path);

/// One "instance_id x y z" line per point.
void write_cimap_text(const CIMap& map, const std::filesystem::path& path);
/// Top-view plot of the CI map, one palette color per instance, at `resolution` m/pixel.
void write_cimap_image(const CIMap& map, const std::filesystem::path& path, double resolution = 0.2);

}  // namespace curblabel
