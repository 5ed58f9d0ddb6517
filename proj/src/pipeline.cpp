#include "curblabel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>

#include "curblabel/bev.hpp"
#include "curblabel/candidates.hpp"
#include "curblabel/error.hpp"
#include "curblabel/grower.hpp"
#include "curblabel/map_io.hpp"
#include "curblabel/parallel.hpp"

namespace curblabel {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

SequencePaths discover_sequence(const PipelineConfig& config) {
  if (config.sequence_dir.empty()) throw InputError("no sequence directory configured (paths.sequence_dir)");
  return SequencePaths::discover(config.sequence_dir);
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t tile_seed(std::uint64_t seed, const TileIndex& t) {
  const std::uint64_t packed =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.ix)) << 32) | static_cast<std::uint32_t>(t.iy);
  return splitmix64(seed ^ splitmix64(packed));
}

std::string tile_name(const TileIndex& t) {
  return "tile " + std::to_string(t.ix) + "," + std::to_string(t.iy);
}

std::string frame_name(std::size_t f) { return "frame " + std::to_string(f); }

BevSpec thin_spec(const BevSpec& spec) {
  BevSpec s = spec;
  s.dilation_kernel = 1;
  return s;
}

}  // namespace

json Stage1Counts::to_json() const {
  return {{"frames", frames},         {"rhd_points", rhd_points}, {"dynamic_dropped", dynamic_dropped},
          {"tiles", tiles},           {"curb_cells", curb_cells}, {"candidates", candidates},
          {"tile_curbs", tile_curbs}, {"curbs", curbs},           {"ci_points", ci_points}};
}

std::vector<SubMap> build_rhd(std::size_t begin, std::size_t end, const FrameLoader& load,
                              const PipelineConfig& config, Stage1Counts& counts) {
  const ClassPolicy policy = ClassPolicy::kitti_default();
  const std::size_t n = end > begin ? end - begin : 0;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(config.effective_workers(), n));
  std::vector<RhdAccumulator> partial(chunks, RhdAccumulator(policy, config.voxel_size));
  parallel_for(chunks, chunks, [&](std::size_t c) {
    const std::size_t lo = begin + n * c / chunks;
    const std::size_t hi = begin + n * (c + 1) / chunks;
    for (std::size_t f = lo; f < hi; ++f) {
      try {
        const Frame frame = load(f);
        partial[c].add_frame(f, frame.cloud, frame.labels, frame.pose);
      } catch (const Error& e) {
        throw StageError("build-map", frame_name(f), e.what());
      }
    }
  });
  for (std::size_t c = 1; c < chunks; ++c) partial[0].merge(std::move(partial[c]));
  const auto points = partial[0].points();
  counts.frames = n;
  counts.rhd_points = points.size();
  counts.dynamic_dropped = 0;
  for (const auto& p : partial) counts.dynamic_dropped += p.dynamic_dropped();
  auto tiles = tile_partition(points, config.tile_size);
  counts.tiles = tiles.size();
  return tiles;
}

std::vector<TileCurbs> grow_tiles(std::span<const SubMap> tiles, const PipelineConfig& config, Stage1Counts& counts) {
  const ClassPolicy policy = ClassPolicy::kitti_default();
  std::vector<TileCurbs> out(tiles.size());
  std::vector<std::size_t> cells(tiles.size(), 0);
  std::vector<std::size_t> cands(tiles.size(), 0);
  parallel_for(tiles.size(), config.effective_workers(), [&](std::size_t i) {
    const SubMap& tile = tiles[i];
    try {
      const GridMap grid = classify_cells(rasterize(tile, policy, config.cell_size), config.height_threshold);
      const auto candidates = extract_candidates(grid, tile, config.candidate_mode);
      cells[i] = grid.count(CellCategory::Curb);
      cands[i] = candidates.size();
      out[i].tile = tile.tile_index;
      out[i].curbs = cluster(candidates, config.grow, tile_seed(config.seed, tile.tile_index));
      for (auto& c : out[i].curbs) c.source_tile = tile.tile_index;
    } catch (const Error& e) {
      throw StageError("grow", tile_name(tile.tile_index), e.what());
    }
  });
  counts.curb_cells = counts.candidates = counts.tile_curbs = 0;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    counts.curb_cells += cells[i];
    counts.candidates += cands[i];
    counts.tile_curbs += out[i].curbs.size();
  }
  return out;
}

CIMap link_tiles(std::span<const TileCurbs> per_tile, const PipelineConfig& config, Stage1Counts& counts) {
  CIMap map;
  try {
    map = merge_tiles(per_tile, config.link);
    resample_map(map, config.resample_interval, config.effective_workers());
  } catch (const Error& e) {
    throw StageError("merge", "", e.what());
  }
  map.sequence_id = config.sequence_id;
  map.parameters["config_hash"] = config.hash();
  map.parameters["tool_version"] = kToolVersion;
  counts.curbs = map.curbs.size();
  counts.ci_points = 0;
  for (const auto& c : map.curbs) counts.ci_points += c.points.size();
  return map;
}

Stage1Output build_ci_map(std::size_t begin, std::size_t end, const FrameLoader& load, const PipelineConfig& config) {
  config.validate();
  Stage1Output out;
  const auto tiles = build_rhd(begin, end, load, config, out.counts);
  out.tile_curbs = grow_tiles(tiles, config, out.counts);
  out.map = link_tiles(out.tile_curbs, config, out.counts);
  return out;
}

std::pair<std::size_t, std::size_t> frame_range(const PipelineConfig& config, std::size_t available) {
  const std::size_t end = std::min(available, config.frame_end.value_or(available));
  const std::size_t begin = std::min(config.frame_begin, end);
  return {begin, end};
}

void write_manifest(const fs::path& path, const PipelineConfig& config, const std::string& stage,
                    const json& counts, const json& timings_ms, const std::vector<std::string>& outputs) {
  json m;
  m["stage"] = stage;
  m["tool"] = "curblabel";
  m["version"] = kToolVersion;
  m["config_hash"] = config.hash();
  m["config"] = config.to_json();
  m["effective_workers"] = config.effective_workers();
  m["counts"] = counts;
  m["timings_ms"] = timings_ms;
  m["outputs"] = outputs;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << m.dump(2) << "\n";
}

Stage1Output run_stage1(const PipelineConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  SequenceReader reader(discover_sequence(config));
  const auto [begin, end] = frame_range(config, reader.size());
  const FrameLoader load = [&reader](std::size_t f) { return reader.load(f); };

  Stage1Output out;
  json timings;
  auto t = Clock::now();
  const auto tiles = build_rhd(begin, end, load, config, out.counts);
  timings["build_map"] = ms_since(t);
  t = Clock::now();
  out.tile_curbs = grow_tiles(tiles, config, out.counts);
  timings["grow"] = ms_since(t);
  t = Clock::now();
  out.map = link_tiles(out.tile_curbs, config, out.counts);
  timings["merge"] = ms_since(t);

  fs::create_directories(config.output_dir);
  write_tile_curbs(out.tile_curbs, config.output_dir / "tile_curbs.bin");
  write_cimap(out.map, config.output_dir / "cimap.bin");
  write_cimap_text(out.map, config.output_dir / "cimap.txt");
  write_cimap_image(out.map, config.output_dir / "cimap.ppm");
  timings["total"] = ms_since(t0);
  write_manifest(config.output_dir / "stage1_manifest.json", config, "stage1", out.counts.to_json(), timings,
                 {"tile_curbs.bin", "cimap.bin", "cimap.txt", "cimap.ppm"});
  return out;
}

Stage2Output run_stage2(const PipelineConfig& config, const CIMap& map) {
  config.validate();
  const auto t0 = Clock::now();
  SequenceReader reader(discover_sequence(config));
  const auto [begin, end] = frame_range(config, reader.size());
  const ClassPolicy policy = ClassPolicy::kitti_default();

  const fs::path ann_dir = config.output_dir / "annotations";
  const fs::path label_dir = config.output_dir / "labels";
  const fs::path bev_dir = config.output_dir / "bev";
  fs::create_directories(ann_dir);
  if (config.write_pointwise_labels) fs::create_directories(label_dir);
  if (config.write_bev) fs::create_directories(bev_dir);

  Stage2Output out;
  const FrameLoader load = [&reader](std::size_t f) { return reader.load(f); };
  const AnnotationSink sink = [&](FrameAnnotation&& annotation, const Frame& frame) {
    annotation.frame_index = frame.index;
    const std::string stem = frame_stem(frame.index);
    write_polyline_annotation(annotation, ann_dir / (stem + ".curb"));
    if (config.write_pointwise_labels || config.write_bev) {
      auto [label_mask, instance_mask] = project_labels(annotation, config.bev);
      if (config.write_pointwise_labels) {
        const auto flags = curb_point_mask(frame.cloud, frame.labels, label_mask, config.bev, policy);
        write_pointwise_labels(frame.labels, flags, config.curb_class, label_dir / (stem + ".label"));
        out.relabeled_points += static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
      }
      if (config.write_bev) {
        BevRaster raster = encode_frame(frame.cloud, config.bev);
        raster.label_mask = std::move(label_mask);
        raster.instance_mask = std::move(instance_mask);
        write_bev_tensor(raster, bev_dir / (stem + ".bevt"));
      }
    }
    out.stats.add(annotation);
  };
  out.report = label_sequence(begin, end, load, map, policy, config.fine, config.effective_workers(), sink);

  std::map<std::string, std::string> stats{
      {"frames", std::to_string(out.stats.frames)},
      {"instances", std::to_string(out.stats.instances)},
      {"points", std::to_string(out.stats.points)},
      {"relabeled_points", std::to_string(out.relabeled_points)},
      {"failed_frames", std::to_string(out.report.failures.size())},
  };
  write_metadata(config.output_dir / "stats.txt", stats);

  json failures = json::array();
  for (const auto& f : out.report.failures) failures.push_back({{"frame", f.frame_index}, {"error", f.message}});
  json counts = {{"frames_requested", end - begin},
                 {"frames_labeled", out.report.frames_labeled},
                 {"instances", out.stats.instances},
                 {"points", out.stats.points},
                 {"relabeled_points", out.relabeled_points},
                 {"failures", failures}};
  std::vector<std::string> outputs{"annotations/", "stats.txt"};
  if (config.write_pointwise_labels) outputs.emplace_back("labels/");
  if (config.write_bev) outputs.emplace_back("bev/");
  write_manifest(config.output_dir / "stage2_manifest.json", config, "stage2", counts, {{"total", ms_since(t0)}},
                 outputs);
  return out;
}

std::size_t run_rasterize(const PipelineConfig& config) {
  config.validate();
  SequenceReader reader(discover_sequence(config));
  const auto annotations = read_polyline_annotations(config.output_dir / "annotations");
  const fs::path bev_dir = config.output_dir / "bev";
  fs::create_directories(bev_dir);
  parallel_for(annotations.size(), config.effective_workers(), [&](std::size_t i) {
    const auto& a = annotations[i];
    try {
      const Frame frame = reader.load(a.frame_index);
      BevRaster raster = encode_frame(frame.cloud, config.bev);
      auto [label_mask, instance_mask] = project_labels(a, config.bev);
      raster.label_mask = std::move(label_mask);
      raster.instance_mask = std::move(instance_mask);
      write_bev_tensor(raster, bev_dir / (frame_stem(a.frame_index) + ".bevt"));
    } catch (const Error& e) {
      throw StageError("rasterize", frame_name(a.frame_index), e.what());
    }
  });
  return annotations.size();
}

EvalRun run_eval(const PipelineConfig& config, const fs::path& pred_dir, const fs::path& gt_dir) {
  config.validate();
  std::map<std::size_t, FrameAnnotation> pred;
  std::map<std::size_t, FrameAnnotation> gt;
  for (auto& a : read_polyline_annotations(pred_dir)) pred.emplace(a.frame_index, std::move(a));
  for (auto& a : read_polyline_annotations(gt_dir)) gt.emplace(a.frame_index, std::move(a));

  EvalRun run;
  for (const auto& [f, a] : pred) {
    if (gt.contains(f)) {
      run.matched_frames.push_back(f);
    } else {
      run.unmatched_frames.push_back(f);
    }
  }
  for (const auto& [f, a] : gt) {
    if (!pred.contains(f)) run.unmatched_frames.push_back(f);
  }
  std::sort(run.unmatched_frames.begin(), run.unmatched_frames.end());

  // Scored on thin (undilated) masks; the pixel tolerance does the matching.
  const BevSpec spec = thin_spec(config.bev);
  std::vector<EvalReport> binary(run.matched_frames.size());
  std::vector<EvalReport> instance(run.matched_frames.size());
  parallel_for(run.matched_frames.size(), config.effective_workers(), [&](std::size_t i) {
    const std::size_t f = run.matched_frames[i];
    const auto [p_mask, p_inst] = project_labels(pred.at(f), spec);
    const auto [g_mask, g_inst] = project_labels(gt.at(f), spec);
    binary[i] = binary_metrics(p_mask, g_mask, config.eval_tolerance, config.eval_neighborhood);
    instance[i] = instance_metrics(p_inst, g_inst, config.iou_thresholds, config.eval_tolerance,
                                   config.eval_neighborhood);
  });
  run.binary = combine_binary(binary);
  run.binary.tolerance_pixels = config.eval_tolerance;
  run.instance = combine_instance(instance);
  if (instance.empty()) {
    for (double t : config.iou_thresholds) run.instance.per_threshold.push_back({t, 1.0, 1.0, 1.0, 0, 0, 0});
    run.instance.precision = run.instance.recall = run.instance.f1 = 1.0;
  }
  run.instance.tolerance_pixels = config.eval_tolerance;
  return run;
}

}  // namespace curblabel
