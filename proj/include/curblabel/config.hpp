#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "curblabel/bev.hpp"
#include "curblabel/candidates.hpp"
#include "curblabel/eval.hpp"
#include "curblabel/frame_labeler.hpp"
#include "curblabel/grower.hpp"
#include "curblabel/postprocess.hpp"

namespace curblabel {

struct PipelineConfig {
  std::filesystem::path sequence_dir;
  std::filesystem::path output_dir = "curblabel_out";
  std::string sequence_id;

  double voxel_size = 0.05;
  double tile_size = 50.0;
  double cell_size = 0.2;
  double height_threshold = 0.3;
  CandidateMode candidate_mode = CandidateMode::AllPoints;
  GrowParams grow;
  LinkParams link;
  double resample_interval = 0.1;
  FineParams fine;
  BevSpec bev;
  ClassId curb_class = 45;

  int eval_tolerance = 1;
  std::vector<double> iou_thresholds{0.5, 0.7};
  Neighborhood eval_neighborhood = Neighborhood::Chebyshev;

  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::size_t frame_begin = 0;
  std::optional<std::size_t> frame_end;  // exclusive
  bool write_pointwise_labels = true;
  bool write_bev = false;

  /// Throws InputError naming the first out-of-range parameter.
  void validate() const;
  std::size_t effective_workers() const;

  /// Parameters that influence outputs (paths and worker count excluded).
  nlohmann::json parameters_json() const;
  /// Full config, loadable by from_json.
  nlohmann::json to_json() const;
  /// Starts from defaults; unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);

  /// CURBLABEL_SEQUENCE_DIR and CURBLABEL_OUTPUT_DIR replace the path fields when set.
  void apply_env_overrides();

  /// FNV-1a over the canonical dump of parameters_json(), as 16 hex digits.
  std::string hash() const;
};

std::string fnv1a_hex(const std::string& data);

}  // namespace curblabel
