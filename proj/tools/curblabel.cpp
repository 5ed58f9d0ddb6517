// Command-line front end for the two-stage curb labeling pipeline.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "curblabel/config.hpp"
#include "curblabel/error.hpp"
#include "curblabel/map_io.hpp"
#include "curblabel/pipeline.hpp"
#include "curblabel/synthetic.hpp"

namespace fs = std::filesystem;
using namespace curblabel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitFatal = 2;

struct CommonOptions {
  std::string config_path;
  std::string sequence_dir;
  std::string output_dir;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> frame_begin;
  std::optional<std::size_t> frame_end;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON configuration file");
  cmd->add_option("-s,--sequence", o.sequence_dir, "Sequence directory (velodyne/, labels/, poses.txt, calib.txt)");
  cmd->add_option("-o,--output", o.output_dir, "Output directory");
  cmd->add_option("-j,--workers", o.workers, "Worker threads (0: all cores)");
  cmd->add_option("--seed", o.seed, "Seed for growing");
  cmd->add_option("--frame-begin", o.frame_begin, "First frame");
  cmd->add_option("--frame-end", o.frame_end, "One past the last frame");
}

PipelineConfig make_config(const CommonOptions& o) {
  PipelineConfig c = o.config_path.empty() ? PipelineConfig{} : PipelineConfig::load(o.config_path);
  c.apply_env_overrides();
  if (!o.sequence_dir.empty()) c.sequence_dir = o.sequence_dir;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (o.workers) c.workers = *o.workers;
  if (o.seed) c.seed = *o.seed;
  if (o.frame_begin) c.frame_begin = *o.frame_begin;
  if (o.frame_end) c.frame_end = *o.frame_end;
  c.validate();
  return c;
}

void print_counts(const Stage1Counts& c) {
  std::printf("frames %zu  map points %zu  dynamic dropped %zu  tiles %zu\n", c.frames, c.rhd_points,
              c.dynamic_dropped, c.tiles);
  std::printf("curb cells %zu  candidates %zu  tile curbs %zu  curbs %zu  ci points %zu\n", c.curb_cells,
              c.candidates, c.tile_curbs, c.curbs, c.ci_points);
}

int report_stage2(const Stage2Output& out) {
  std::printf("labeled %zu frames  instances %zu  points %zu  relabeled points %zu\n", out.report.frames_labeled,
              out.stats.instances, out.stats.points, out.relabeled_points);
  for (const auto& f : out.report.failures) std::fprintf(stderr, "frame %zu failed: %s\n", f.frame_index, f.message.c_str());
  return out.report.failures.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curb instance labeling for semantic LiDAR sequences"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto* build_map = app.add_subcommand("build-map", "Accumulate frames into road-map tiles");
  auto* grow = app.add_subcommand("grow", "Extract candidates and grow curbs per tile");
  auto* merge = app.add_subcommand("merge", "Link curbs across tiles and resample");
  auto* label = app.add_subcommand("label", "Project the CI map into frames");
  auto* rasterize = app.add_subcommand("rasterize", "Write BEV tensors for labeled frames");
  auto* eval = app.add_subcommand("eval", "Score predicted annotations against ground truth");
  auto* stats = app.add_subcommand("stats", "Count frames, instances and points of an annotation set");
  auto* all = app.add_subcommand("all", "Run both stages");
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic sequence");
  for (auto* cmd : {build_map, grow, merge, label, rasterize, eval, stats, all}) add_common(cmd, opts);

  std::string pred_dir, gt_dir, ann_dir;
  eval->add_option("--pred", pred_dir, "Predicted annotation directory")->required();
  eval->add_option("--gt", gt_dir, "Ground-truth annotation directory")->required();
  stats->add_option("--annotations", ann_dir, "Annotation directory (default: <output>/annotations)");

  std::string scene_name = "straight";
  std::string gen_out;
  std::optional<double> gap_length;
  std::optional<double> gap_start;
  std::optional<std::size_t> frames;
  std::optional<double> corner_angle;
  gen->add_option("--scene", scene_name, "straight, occluded, corner or split-tile");
  gen->add_option("-o,--output", gen_out, "Sequence directory to create")->required();
  gen->add_option("--gap", gap_length, "Occlusion length in meters");
  gen->add_option("--gap-start", gap_start, "Occlusion start x in meters");
  gen->add_option("--frames", frames, "Number of frames");
  gen->add_option("--corner-angle", corner_angle, "Turn angle in degrees");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      auto params = synthetic::default_params(synthetic::parse_scene_kind(scene_name));
      if (gap_length) params.gap_length = *gap_length;
      if (gap_start) params.gap_start = *gap_start;
      if (frames) params.frames = *frames;
      if (corner_angle) params.corner_angle = *corner_angle;
      const auto scene = synthetic::generate(params);
      synthetic::write_sequence(scene, gen_out);
      std::printf("wrote %zu frames of scene '%s' to %s\n", scene.frames.size(), scene_name.c_str(), gen_out.c_str());
      return kExitOk;
    }

    const PipelineConfig config = make_config(opts);
    const fs::path out = config.output_dir;

    if (build_map->parsed()) {
      SequenceReader reader(SequencePaths::discover(config.sequence_dir));
      const auto [begin, end] = frame_range(config, reader.size());
      Stage1Counts counts;
      const auto tiles = build_rhd(begin, end, [&](std::size_t f) { return reader.load(f); }, config, counts);
      write_submaps(tiles, out / "rhd");
      write_manifest(out / "build_map_manifest.json", config, "build-map", counts.to_json(), nlohmann::json::object(),
                     {"rhd/"});
      print_counts(counts);
    } else if (grow->parsed()) {
      const auto tiles = read_submaps(out / "rhd");
      Stage1Counts counts;
      counts.tiles = tiles.size();
      const auto per_tile = grow_tiles(tiles, config, counts);
      write_tile_curbs(per_tile, out / "tile_curbs.bin");
      write_manifest(out / "grow_manifest.json", config, "grow", counts.to_json(), nlohmann::json::object(),
                     {"tile_curbs.bin"});
      print_counts(counts);
    } else if (merge->parsed()) {
      const auto per_tile = read_tile_curbs(out / "tile_curbs.bin");
      Stage1Counts counts;
      const CIMap map = link_tiles(per_tile, config, counts);
      write_cimap(map, out / "cimap.bin");
      write_cimap_text(map, out / "cimap.txt");
      write_cimap_image(map, out / "cimap.ppm");
      write_manifest(out / "merge_manifest.json", config, "merge", counts.to_json(), nlohmann::json::object(),
                     {"cimap.bin", "cimap.txt", "cimap.ppm"});
      print_counts(counts);
    } else if (label->parsed()) {
      return report_stage2(run_stage2(config, read_cimap(out / "cimap.bin")));
    } else if (rasterize->parsed()) {
      std::printf("rasterized %zu frames\n", run_rasterize(config));
    } else if (eval->parsed()) {
      const EvalRun run = run_eval(config, pred_dir, gt_dir);
      for (std::size_t f : run.unmatched_frames) std::fprintf(stderr, "warning: frame %zu has no counterpart, excluded\n", f);
      std::printf("frames %zu\nbinary\n%sinstance\n%s", run.matched_frames.size(), format_report(run.binary).c_str(),
                  format_report(run.instance).c_str());
      fs::create_directories(out);
      write_report(run.binary, out / "eval_binary.txt");
      write_report(run.instance, out / "eval_instance.txt");
    } else if (stats->parsed()) {
      const fs::path dir = ann_dir.empty() ? out / "annotations" : fs::path(ann_dir);
      const auto annotations = read_polyline_annotations(dir);
      const DatasetStats s = dataset_stats(annotations);
      std::printf("frames %zu\ninstances %zu\npoints %zu\n", s.frames, s.instances, s.points);
    } else if (all->parsed()) {
      const Stage1Output s1 = run_stage1(config);
      print_counts(s1.counts);
      return report_stage2(run_stage2(config, s1.map));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFatal;
  }
  return kExitOk;
}
