#include "curblabel/spline.hpp"

#include <algorithm>
#include <cmath>

#include "curblabel/error.hpp"
#include "curblabel/postprocess.hpp"

namespace curblabel {

namespace {

constexpr int kArcSubdivisions = 64;

std::vector<Vec3> drop_duplicates(std::vector<Vec3> pts) {
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (auto& p : pts) {
    if (out.empty() || (p - out.back()).norm() > 1e-12) out.push_back(p);
  }
  return out;
}

}  // namespace

CatmullRomSpline::CatmullRomSpline(std::vector<Vec3> points, double alpha) : points_(drop_duplicates(std::move(points))) {
  if (points_.size() < 2) throw InputError("spline needs two distinct points");
  const std::size_t n = points_.size();
  padded_.reserve(n + 2);
  padded_.push_back(2.0 * points_[0] - points_[1]);
  padded_.insert(padded_.end(), points_.begin(), points_.end());
  padded_.push_back(2.0 * points_[n - 1] - points_[n - 2]);
  knots_.resize(padded_.size(), 0.0);
  for (std::size_t i = 1; i < padded_.size(); ++i) {
    knots_[i] = knots_[i - 1] + std::pow((padded_[i] - padded_[i - 1]).norm(), alpha);
  }
}

Vec3 CatmullRomSpline::evaluate(std::size_t seg, double u) const {
  // Barry-Goldman pyramid over padded points seg .. seg+3.
  const Vec3& p0 = padded_[seg];
  const Vec3& p1 = padded_[seg + 1];
  const Vec3& p2 = padded_[seg + 2];
  const Vec3& p3 = padded_[seg + 3];
  const double t0 = knots_[seg];
  const double t1 = knots_[seg + 1];
  const double t2 = knots_[seg + 2];
  const double t3 = knots_[seg + 3];
  if (u <= 0.0) return p1;
  if (u >= 1.0) return p2;
  const double t = t1 + u * (t2 - t1);

  const Vec3 a1 = ((t1 - t) * p0 + (t - t0) * p1) / (t1 - t0);
  const Vec3 a2 = ((t2 - t) * p1 + (t - t1) * p2) / (t2 - t1);
  const Vec3 a3 = ((t3 - t) * p2 + (t - t2) * p3) / (t3 - t2);
  const Vec3 b1 = ((t2 - t) * a1 + (t - t0) * a2) / (t2 - t0);
  const Vec3 b2 = ((t3 - t) * a2 + (t - t1) * a3) / (t3 - t1);
  return ((t2 - t) * b1 + (t - t1) * b2) / (t2 - t1);
}

CurbPolyline spline_resample(const CurbPolyline& curb, double interval) {
  if (!(interval > 0.0)) throw InputError("resample interval must be positive");
  if (curb.points.size() < 2) throw InputError("spline resampling needs at least two points");
  const auto distinct = drop_duplicates(curb.points);
  if (distinct.size() < 4) {
    if (distinct.size() < 2) return curb;
    CurbPolyline linear = curb;
    linear.points = distinct;
    return resample_polyline(linear, interval);
  }

  const CatmullRomSpline spline(distinct);
  // Dense arc-length table: (segment, u) samples with cumulative 2D length.
  struct Sample {
    std::size_t seg;
    double u;
    double s;
  };
  std::vector<Sample> table;
  table.reserve(spline.segment_count() * kArcSubdivisions + 1);
  table.push_back({0, 0.0, 0.0});
  Vec3 prev = spline.evaluate(0, 0.0);
  double s = 0.0;
  for (std::size_t seg = 0; seg < spline.segment_count(); ++seg) {
    for (int k = 1; k <= kArcSubdivisions; ++k) {
      const double u = static_cast<double>(k) / kArcSubdivisions;
      const Vec3 p = spline.evaluate(seg, u);
      s += (xy(p) - xy(prev)).norm();
      table.push_back({seg, u, s});
      prev = p;
    }
  }
  const double length = s;

  CurbPolyline out;
  out.instance_id = curb.instance_id;
  out.source_tile = curb.source_tile;
  out.points.push_back(distinct.front());
  std::size_t row = 0;
  for (std::size_t k = 1;; ++k) {
    const double station = static_cast<double>(k) * interval;
    if (station >= length - 1e-9) break;
    while (row + 1 < table.size() - 1 && table[row + 1].s < station) ++row;
    const Sample& a = table[row];
    const Sample& b = table[row + 1];
    const double span = b.s - a.s;
    const double f = span > 0.0 ? (station - a.s) / span : 0.0;
    // Adjacent rows may straddle a segment boundary (a.u == 1 of the previous segment).
    const double ua = (a.seg == b.seg) ? a.u : 0.0;
    out.points.push_back(spline.evaluate(b.seg, ua + f * (b.u - ua)));
  }
  out.points.push_back(distinct.back());
  return out;
}

}  // namespace curblabel
