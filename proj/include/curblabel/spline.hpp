#pragma once

#include <vector>

#include "curblabel/types.hpp"

namespace curblabel {

/// Piecewise cubic Catmull-Rom curve through every input point, with knot spacing
/// |P_{i+1} - P_i|^alpha (alpha = 0.5 gives the centripetal variant). End segments use
/// reflected phantom points.
class CatmullRomSpline {
 public:
  /// Requires at least two distinct points; consecutive duplicates are dropped.
  explicit CatmullRomSpline(std::vector<Vec3> points, double alpha = 0.5);

  std::size_t segment_count() const { return points_.size() - 1; }
  /// Point on segment `seg` at local parameter u in [0, 1].
  Vec3 evaluate(std::size_t seg, double u) const;
  const std::vector<Vec3>& control_points() const { return points_; }

 private:
  std::vector<Vec3> points_;
  std::vector<Vec3> padded_;  // phantom + points + phantom
  std::vector<double> knots_;
};

/// Fits the curve through the curb points and samples it at equal 2D arc-length
/// steps of `interval`, keeping both endpoints. Inputs with fewer than four distinct
/// points fall back to linear resampling.
CurbPolyline spline_resample(const CurbPolyline& curb, double interval);

}  // namespace curblabel
