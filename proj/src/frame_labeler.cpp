#include "curblabel/frame_labeler.hpp"

#include <algorithm>

#include "curblabel/error.hpp"
#include "curblabel/parallel.hpp"
#include "curblabel/spline.hpp"

namespace curblabel {

namespace {

KdTree2 index_classes(std::span<const PointXYZI> cloud, std::span<const PointLabel> labels,
                      const std::function<bool(ClassId)>& keep) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep(labels[i].class_id)) pts.push_back(xy(cloud[i].xyz));
  }
  return KdTree2(std::move(pts));
}

}  // namespace

void FineParams::validate() const {
  if (!(r2 > 0.0 && r3 > 0.0 && r4 > 0.0)) throw InputError("fine extraction radii must be positive");
  if (!(kappa >= 0.0)) throw InputError("kappa must be >= 0");
  if (!(phi >= 0.0)) throw InputError("phi must be >= 0");
  if (!(resample_interval > 0.0)) throw InputError("resample interval must be positive");
}

std::vector<CurbPolyline> coarse_extract(const CIMap& map, const Pose& pose, double r2) {
  std::vector<CurbPolyline> pieces;
  const Vec2 center = xy(pose.translation());
  const double r2sq = r2 * r2;
  for (const auto& curb : map.curbs) {
    CurbPolyline piece;
    piece.instance_id = curb.instance_id;
    auto flush = [&] {
      if (piece.points.size() >= 2) pieces.push_back(piece);
      piece.points.clear();
    };
    for (const auto& p : curb.points) {
      if ((xy(p) - center).squaredNorm() <= r2sq) {
        piece.points.push_back(pose.apply_inverse(p));
      } else {
        flush();
      }
    }
    flush();
  }
  return pieces;
}

FrameSemantics::FrameSemantics(std::span<const PointXYZI> cloud, std::span<const PointLabel> labels,
                               const ClassPolicy& policy)
    : road_(index_classes(cloud, labels, [&](ClassId c) { return policy.is_road(c); })),
      side_(index_classes(cloud, labels, [&](ClassId c) { return policy.is_curbside(c); })) {
  if (cloud.size() != labels.size()) throw ConsistencyError("frame cloud and labels differ in length");
}

double fine_score(const Vec3& q, const KdTree2& road_index, const KdTree2& side_index, const FineParams& params) {
  const auto road = static_cast<double>(road_index.radius_count(xy(q), params.r3));
  const auto side = static_cast<double>(side_index.radius_count(xy(q), params.r4));
  return road + params.kappa * side;
}

std::optional<std::pair<std::size_t, std::size_t>> fine_index_range(std::span<const double> scores, double phi) {
  std::optional<std::pair<std::size_t, std::size_t>> range;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] > phi)) continue;
    if (!range) range = std::make_pair(i, i);
    range->second = i;
  }
  return range;
}

std::optional<CurbPolyline> fine_extract(const CurbPolyline& curb, const FrameSemantics& semantics,
                                         const FineParams& params) {
  std::vector<double> scores;
  scores.reserve(curb.points.size());
  for (const auto& p : curb.points) scores.push_back(fine_score(p, semantics.road(), semantics.side(), params));
  const auto range = fine_index_range(scores, params.phi);
  if (!range || range->second == range->first) return std::nullopt;
  CurbPolyline out;
  out.instance_id = curb.instance_id;
  out.source_tile = curb.source_tile;
  out.points.assign(curb.points.begin() + static_cast<std::ptrdiff_t>(range->first),
                    curb.points.begin() + static_cast<std::ptrdiff_t>(range->second) + 1);
  return out;
}

FrameAnnotation label_frame(const CIMap& map, const Frame& frame, const ClassPolicy& policy,
                            const FineParams& params) {
  FrameAnnotation annotation;
  annotation.frame_index = frame.index;
  const auto coarse = coarse_extract(map, frame.pose, params.r2);
  if (coarse.empty()) return annotation;
  const FrameSemantics semantics(frame.cloud, frame.labels, policy);
  for (const auto& curb : coarse) {
    auto fine = fine_extract(curb, semantics, params);
    if (!fine) continue;
    annotation.curbs.push_back(spline_resample(*fine, params.resample_interval));
  }
  return annotation;
}

LabelReport label_sequence(std::size_t frame_begin, std::size_t frame_end, const FrameLoader& load, const CIMap& map,
                           const ClassPolicy& policy, const FineParams& params, std::size_t workers,
                           const AnnotationSink& sink) {
  params.validate();
  LabelReport report;
  workers = std::max<std::size_t>(1, workers);
  const std::size_t chunk = workers * 4;

  struct Job {
    std::optional<Frame> frame;
    FrameAnnotation annotation;
    std::string error;
  };
  for (std::size_t begin = frame_begin; begin < frame_end; begin += chunk) {
    const std::size_t end = std::min(frame_end, begin + chunk);
    std::vector<Job> jobs(end - begin);
    parallel_for(jobs.size(), workers, [&](std::size_t k) {
      Job& job = jobs[k];
      try {
        job.frame = load(begin + k);
        job.annotation = label_frame(map, *job.frame, policy, params);
        job.annotation.frame_index = begin + k;
      } catch (const std::exception& e) {
        job.frame.reset();
        job.error = e.what();
      }
    });
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      if (!jobs[k].frame) {
        report.failures.push_back({begin + k, jobs[k].error});
        continue;
      }
      try {
        sink(std::move(jobs[k].annotation), *jobs[k].frame);
        ++report.frames_labeled;
      } catch (const std::exception& e) {
        report.failures.push_back({begin + k, e.what()});
      }
    }
  }
  return report;
}

}  // namespace curblabel
