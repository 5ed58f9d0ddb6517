#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "curblabel/config.hpp"
#include "curblabel/eval.hpp"
#include "curblabel/frame_labeler.hpp"
#include "curblabel/map_builder.hpp"
#include "curblabel/postprocess.hpp"

namespace curblabel {

inline constexpr const char* kToolVersion = "1.0.0";

// Output layout under PipelineConfig::output_dir:
//   rhd/tile_<ix>_<iy>.rhd   road map tiles (build-map)
//   tile_curbs.bin           per-tile polylines before linking (grow)
//   cimap.bin, cimap.txt, cimap.ppm
//   annotations/NNNNNN.curb  per-frame polylines in the sensor frame (label)
//   labels/NNNNNN.label      point-wise labels with the curb class (label)
//   bev/NNNNNN.bevt          BEV tensors (rasterize, or label with write_bev)
//   stats.txt, eval.txt, *_manifest.json

struct Stage1Counts {
  std::size_t frames = 0;
  std::size_t rhd_points = 0;
  std::size_t dynamic_dropped = 0;
  std::size_t tiles = 0;
  std::size_t curb_cells = 0;
  std::size_t candidates = 0;
  std::size_t tile_curbs = 0;
  std::size_t curbs = 0;
  std::size_t ci_points = 0;

  nlohmann::json to_json() const;
};

/// Accumulates frames [begin, end) into road-map tiles. Frames are split into contiguous
/// chunks processed in parallel; chunk maps merge into the same result for any worker count.
std::vector<SubMap> build_rhd(std::size_t begin, std::size_t end, const FrameLoader& load,
                              const PipelineConfig& config, Stage1Counts& counts);

/// Candidate extraction and growing per tile, in parallel. Each tile draws seeds from a
/// generator derived from the configured seed and its tile index.
std::vector<TileCurbs> grow_tiles(std::span<const SubMap> tiles, const PipelineConfig& config, Stage1Counts& counts);

/// Links curbs across tiles and resamples them.
CIMap link_tiles(std::span<const TileCurbs> per_tile, const PipelineConfig& config, Stage1Counts& counts);

struct Stage1Output {
  CIMap map;
  std::vector<TileCurbs> tile_curbs;
  Stage1Counts counts;
};

/// In-memory stage 1 over frames [begin, end).
Stage1Output build_ci_map(std::size_t begin, std::size_t end, const FrameLoader& load, const PipelineConfig& config);

/// Frame range of the configured sequence after applying frame_begin/frame_end.
std::pair<std::size_t, std::size_t> frame_range(const PipelineConfig& config, std::size_t available);

/// Stage 1 from the configured sequence directory; writes the CI map files and
/// stage1_manifest.json.
Stage1Output run_stage1(const PipelineConfig& config);

struct Stage2Output {
  LabelReport report;
  DatasetStats stats;
  std::size_t relabeled_points = 0;
};

/// Stage 2 from the configured sequence directory; writes annotations, optional point-wise
/// labels and BEV tensors, stats.txt and stage2_manifest.json. Frame failures are recorded
/// and the run continues.
Stage2Output run_stage2(const PipelineConfig& config, const CIMap& map);

/// BEV tensors for every annotation in output_dir/annotations.
std::size_t run_rasterize(const PipelineConfig& config);

struct EvalRun {
  EvalReport binary;
  EvalReport instance;
  std::vector<std::size_t> matched_frames;
  std::vector<std::size_t> unmatched_frames;
};

/// Projects both annotation sets into BEV masks and scores predictions against ground truth.
/// Frames present on only one side are listed and excluded.
EvalRun run_eval(const PipelineConfig& config, const std::filesystem::path& pred_dir,
                 const std::filesystem::path& gt_dir);

/// Writes a JSON manifest with config hash, parameters, version, counts, timings and outputs.
void write_manifest(const std::filesystem::path& path, const PipelineConfig& config, const std::string& stage,
                    const nlohmann::json& counts, const nlohmann::json& timings_ms,
                    const std::vector<std::string>& outputs);

}  // namespace curblabel
