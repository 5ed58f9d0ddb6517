#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curblabel/class_policy.hpp"
#include "curblabel/kdtree.hpp"
#include "curblabel/kitti_io.hpp"
#include "curblabel/types.hpp"

namespace curblabel {

struct FineParams {
  double r2 = 80.0;                 // coarse extraction range, meters
  double r3 = 3.0;                  // road count radius
  double r4 = 5.0;                  // curbside count radius
  double kappa = 0.2;               // curbside weight
  double phi = 20.0;                // score threshold (strict)
  double resample_interval = 0.1;   // output spacing, meters

  void validate() const;
};

/// Clips the CI map to points within r2 (2D) of the pose position and maps them into the
/// sensor frame. A curb leaving and re-entering the range yields several pieces with the
/// same instance id; pieces with fewer than two points are dropped.
std::vector<CurbPolyline> coarse_extract(const CIMap& map, const Pose& pose, double r2);

/// 2D indices over one frame's road points and curbside points (sensor frame).
class FrameSemantics {
 public:
  FrameSemantics(std::span<const PointXYZI> cloud, std::span<const PointLabel> labels, const ClassPolicy& policy);
  FrameSemantics(std::vector<Vec2> road, std::vector<Vec2> side) : road_(std::move(road)), side_(std::move(side)) {}

  const KdTree2& road() const { return road_; }
  const KdTree2& side() const { return side_; }

 private:
  KdTree2 road_;
  KdTree2 side_;
};

/// Road points within r3 plus kappa times curbside points within r4 (2D, inclusive).
double fine_score(const Vec3& q, const KdTree2& road_index, const KdTree2& side_index, const FineParams& params);

/// Inclusive index range [first, last] spanning every score strictly above phi, or
/// nullopt when no score qualifies.
std::optional<std::pair<std::size_t, std::size_t>> fine_index_range(std::span<const double> scores, double phi);

/// Trims a coarse curb to the span between its first and last qualifying points.
/// Points inside the span are kept as-is even if they score below phi. Returns
/// nullopt when fewer than two points remain.
std::optional<CurbPolyline> fine_extract(const CurbPolyline& curb, const FrameSemantics& semantics,
                                         const FineParams& params);

/// Full per-frame labeling: coarse clip, fine trim, spline resample.
FrameAnnotation label_frame(const CIMap& map, const Frame& frame, const ClassPolicy& policy,
                            const FineParams& params);

struct FrameFailure {
  std::size_t frame_index;
  std::string message;
};

struct LabelReport {
  std::size_t frames_labeled = 0;
  std::vector<FrameFailure> failures;
};

using FrameLoader = std::function<Frame(std::size_t)>;
using AnnotationSink = std::function<void(FrameAnnotation&&, const Frame&)>;

/// Labels frames [frame_begin, frame_end) on `workers` threads. `sink` runs on the calling thread
/// in increasing frame order. A frame whose load or labeling throws is recorded in the
/// report and skipped; the sequence continues.
LabelReport label_sequence(std::size_t frame_begin, std::size_t frame_end, const FrameLoader& load, const CIMap& map,
                           const ClassPolicy& policy, const FineParams& params, std::size_t workers,
                           const AnnotationSink& sink);

}  // namespace curblabel
