#include <fstream>
#include <iterator>

#include "doctest.h"

#include "curblabel/map_io.hpp"
#include "curblabel/pipeline.hpp"
#include "curblabel/synthetic.hpp"
#include "support/helpers.hpp"

using namespace curblabel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

FrameAnnotation horizontal(std::size_t frame, double y, double x0, double x1) {
  FrameAnnotation a;
  a.frame_index = frame;
  CurbPolyline c;
  c.instance_id = 1;
  for (double x = x0; x <= x1; x += 0.1) c.points.push_back({x, y, 0.0});
  a.curbs.push_back(c);
  return a;
}

}  // namespace

TEST_CASE("empty sequence gives an empty map") {
  testing::TempDir dir;
  synthetic::Scene scene = synthetic::generate(synthetic::default_params(synthetic::SceneKind::Straight));
  scene.frames.clear();
  synthetic::write_sequence(scene, dir.path() / "seq");
  PipelineConfig c;
  c.sequence_dir = dir.path() / "seq";
  c.output_dir = dir.path() / "out";
  const Stage1Output s1 = run_stage1(c);
  CHECK(s1.map.curbs.empty());
  CHECK(s1.counts.frames == 0);
  const CIMap back = read_cimap(c.output_dir / "cimap.bin");
  CHECK(back.curbs.empty());
  const Stage2Output s2 = run_stage2(c, s1.map);
  CHECK(s2.report.frames_labeled == 0);
  CHECK(s2.stats.frames == 0);
}

TEST_CASE("frame range clamps to the available frames") {
  PipelineConfig c;
  CHECK(frame_range(c, 10) == std::make_pair<std::size_t, std::size_t>(0, 10));
  c.frame_begin = 3;
  c.frame_end = 7;
  CHECK(frame_range(c, 10) == std::make_pair<std::size_t, std::size_t>(3, 7));
  c.frame_end = 50;
  CHECK(frame_range(c, 10) == std::make_pair<std::size_t, std::size_t>(3, 10));
}

TEST_CASE("straight road end to end") {
  testing::TempDir dir;
  auto params = synthetic::default_params(synthetic::SceneKind::Straight);
  params.frames = 8;
  params.length = 40.0;
  const auto scene = synthetic::generate(params);
  synthetic::write_sequence(scene, dir.path() / "seq");
  PipelineConfig c;
  c.sequence_dir = dir.path() / "seq";
  c.output_dir = dir.path() / "out";
  c.workers = 2;
  const Stage1Output s1 = run_stage1(c);
  REQUIRE(s1.map.curbs.size() == 2);
  for (const auto& curb : s1.map.curbs) {
    for (const auto& p : curb.points) CHECK(synthetic::distance_to_truth(scene, p) <= 0.2);
  }
  const Stage2Output s2 = run_stage2(c, s1.map);
  CHECK(s2.report.failures.empty());
  CHECK(s2.report.frames_labeled == 8);
  CHECK(s2.stats.instances >= 8);
  CHECK(s2.relabeled_points > 0);
  CHECK(fs::exists(c.output_dir / "annotations" / "000000.curb"));
  CHECK(fs::exists(c.output_dir / "labels" / "000007.label"));
  CHECK(fs::exists(c.output_dir / "stage1_manifest.json"));
  CHECK(fs::exists(c.output_dir / "stage2_manifest.json"));

  // In-memory stage 1 and the written map agree, and a second worker count gives the same bytes.
  const CIMap disk = read_cimap(c.output_dir / "cimap.bin");
  REQUIRE(disk.curbs.size() == s1.map.curbs.size());
  CHECK(disk.curbs[0].points == s1.map.curbs[0].points);
  PipelineConfig c1 = c;
  c1.workers = 1;
  c1.output_dir = dir.path() / "out1";
  run_stage2(c1, run_stage1(c1).map);
  CHECK(slurp(c.output_dir / "cimap.bin") == slurp(c1.output_dir / "cimap.bin"));
  CHECK(slurp(c.output_dir / "annotations" / "000003.curb") == slurp(c1.output_dir / "annotations" / "000003.curb"));
  CHECK(slurp(c.output_dir / "labels" / "000003.label") == slurp(c1.output_dir / "labels" / "000003.label"));

  const EvalRun self = run_eval(c, c.output_dir / "annotations", c1.output_dir / "annotations");
  CHECK(self.binary.f1 == 1.0);
  CHECK(self.matched_frames.size() == 8);
}

TEST_CASE("eval tolerance on shifted annotations") {
  testing::TempDir dir;
  std::vector<FrameAnnotation> gt;
  std::vector<FrameAnnotation> one;
  std::vector<FrameAnnotation> two;
  for (std::size_t f = 0; f < 3; ++f) {
    gt.push_back(horizontal(f, 2.05, -5.05, 5.05));
    one.push_back(horizontal(f, 2.15, -5.05, 5.05));
    two.push_back(horizontal(f, 2.25, -5.05, 5.05));
  }
  gt.push_back(horizontal(9, 0.05, 0.05, 1.05));
  write_polyline_annotations(gt, dir.path() / "gt");
  write_polyline_annotations(gt, dir.path() / "same");
  write_polyline_annotations(one, dir.path() / "one");
  write_polyline_annotations(two, dir.path() / "two");
  PipelineConfig c;
  const EvalRun same = run_eval(c, dir.path() / "same", dir.path() / "gt");
  CHECK(same.binary.f1 == 1.0);
  CHECK(same.instance.per_threshold[0].tp == 4);
  const EvalRun r1 = run_eval(c, dir.path() / "one", dir.path() / "gt");
  CHECK(r1.binary.f1 == 1.0);
  CHECK(r1.unmatched_frames == std::vector<std::size_t>{9});
  const EvalRun r2 = run_eval(c, dir.path() / "two", dir.path() / "gt");
  CHECK(r2.binary.f1 == 0.0);
}
