#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "curblabel/bev.hpp"
#include "curblabel/kitti_io.hpp"

namespace curblabel {

/// Pixel neighborhood used for the match tolerance.
enum class Neighborhood { Chebyshev, Euclidean };

struct ThresholdResult {
  double iou_threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tolerance_pixels = 0;
  std::vector<ThresholdResult> per_threshold;
  // Binary: tp/fp count predicted pixels, fn counts unmatched ground-truth pixels.
  // Instance: counts of instances at the first threshold.
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t gt_positives = 0;
};

/// 2PR / (P + R), or 0 when P + R = 0.
double f1_score(double precision, double recall);

/// Pixel-tolerance segmentation metrics.
///
/// A predicted positive is a TP when some ground-truth positive lies within `tolerance`
/// pixels of it; a ground-truth positive is missed (FN) when no predicted positive lies
/// within `tolerance`. P = TP / (TP + FP), R = (GT - FN) / GT. With no predictions
/// P = 0; with an empty ground truth R = 1; both empty gives P = R = 1.
EvalReport binary_metrics(const Mask& pred, const Mask& gt, int tolerance,
                          Neighborhood neighborhood = Neighborhood::Chebyshev);

/// Instance IoU for every (pred, gt) pair, with both instances dilated by `tolerance`
/// pixels first. Pairs are matched one-to-one greedily by descending IoU; a pair counts
/// as TP when its IoU is at least the threshold. One result per threshold; the top-level
/// fields mirror the first threshold.
EvalReport instance_metrics(const InstanceMask& pred, const InstanceMask& gt, std::span<const double> iou_thresholds,
                            int tolerance, Neighborhood neighborhood = Neighborhood::Chebyshev);

/// IoU matrix between the instances of two masks after tolerance dilation.
/// Rows follow ascending pred ids, columns ascending gt ids.
struct IouTable {
  std::vector<std::uint32_t> pred_ids;
  std::vector<std::uint32_t> gt_ids;
  std::vector<std::vector<double>> iou;
};
IouTable instance_iou(const InstanceMask& pred, const InstanceMask& gt, int tolerance,
                      Neighborhood neighborhood = Neighborhood::Chebyshev);

/// Binary dilation with a square (Chebyshev) or disk (Euclidean) of radius `tolerance`.
Mask dilate_radius(const Mask& mask, int tolerance, Neighborhood neighborhood);

/// Sums the pixel counts of several binary reports and recomputes the rates.
EvalReport combine_binary(std::span<const EvalReport> reports);
/// Sums instance counts per threshold.
EvalReport combine_instance(std::span<const EvalReport> reports);

struct DatasetStats {
  std::size_t frames = 0;
  std::size_t instances = 0;
  std::size_t points = 0;

  void add(const FrameAnnotation& annotation);
  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(std::span<const FrameAnnotation> annotations);

/// Human-readable table.
std::string format_report(const EvalReport& report);
/// `key: value` file.
void write_report(const EvalReport& report, const std::filesystem::path& path);

}  // namespace curblabel
