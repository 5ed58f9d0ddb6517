#include "curblabel/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "curblabel/error.hpp"
#include "curblabel/parallel.hpp"

namespace curblabel {

namespace {

struct Piece {
  const CurbPolyline* curb;
  TileIndex tile;
  Vec2 head_out;
  Vec2 tail_out;
};

struct Candidate {
  double gap;
  std::size_t a;  // endpoint ids: 2 * piece + (0 head, 1 tail)
  std::size_t b;
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool adjacent(const TileIndex& a, const TileIndex& b) {
  const int dx = std::abs(a.ix - b.ix);
  const int dy = std::abs(a.iy - b.iy);
  return std::max(dx, dy) == 1;
}

const Vec3& endpoint(const Piece& piece, bool tail) {
  return tail ? piece.curb->points.back() : piece.curb->points.front();
}

void append_points(std::vector<Vec3>& out, const std::vector<Vec3>& pts, bool reversed) {
  auto push = [&](const Vec3& p) {
    if (out.empty() || out.back() != p) out.push_back(p);
  };
  if (reversed) {
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) push(*it);
  } else {
    for (const auto& p : pts) push(p);
  }
}

}  // namespace

void LinkParams::validate() const {
  if (!(d_link > 0.0)) throw InputError("d_link must be positive");
  if (!(theta_link > 0.0 && theta_link < M_PI / 2)) throw InputError("theta_link must be in (0, pi/2)");
  if (tail_window < 2) throw InputError("tail_window must be >= 2");
  if (!(tail_min_span >= 0.0)) throw InputError("tail_min_span must be non-negative");
}

Vec2 endpoint_direction(const CurbPolyline& curb, bool at_tail, std::size_t window, double min_span) {
  const auto& pts = curb.points;
  if (pts.size() < 2) return Vec2::Zero();
  auto at = [&](std::size_t k) { return xy(at_tail ? pts[pts.size() - 1 - k] : pts[k]); };
  std::vector<Vec2> tail;
  double span = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (tail.size() >= std::max<std::size_t>(window, 2) && span >= min_span) break;
    tail.push_back(at(k));
    span = std::max(span, (tail.back() - tail.front()).norm());
  }
  const std::size_t n = tail.size();

  Vec2 centroid = Vec2::Zero();
  for (const auto& p : tail) centroid += p;
  centroid /= static_cast<double>(n);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : tail) cov += (p - centroid) * (p - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  Vec2 dir = eig.eigenvectors().col(1);
  if (dir.norm() == 0.0 || !dir.allFinite()) return Vec2::Zero();
  dir.normalize();

  Vec2 outward = tail.front() - centroid;
  if (outward.norm() == 0.0) outward = tail.front() - tail[1];
  if (dir.dot(outward) < 0.0) dir = -dir;
  return dir;
}

CIMap merge_tiles(std::span<const TileCurbs> per_tile, const LinkParams& params) {
  params.validate();
  std::vector<Piece> pieces;
  for (const auto& tile : per_tile) {
    for (const auto& curb : tile.curbs) {
      if (curb.points.size() < 2) continue;
      pieces.push_back(Piece{&curb, tile.tile, endpoint_direction(curb, false, params.tail_window, params.tail_min_span),
                             endpoint_direction(curb, true, params.tail_window, params.tail_min_span)});
    }
  }

  const double cos_limit = std::cos(params.theta_link);
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      if (!adjacent(pieces[i].tile, pieces[j].tile)) continue;
      for (int ei = 0; ei < 2; ++ei) {
        for (int ej = 0; ej < 2; ++ej) {
          const double gap = (xy(endpoint(pieces[i], ei)) - xy(endpoint(pieces[j], ej))).norm();
          if (!(gap < params.d_link)) continue;
          const Vec2 out_a = ei ? pieces[i].tail_out : pieces[i].head_out;
          const Vec2 out_b = ej ? pieces[j].tail_out : pieces[j].head_out;
          // A leaves through its endpoint, B is entered through its endpoint: compare out_a with -out_b.
          if (out_a.dot(-out_b) > cos_limit) candidates.push_back({gap, 2 * i + ei, 2 * j + ej});
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.gap != y.gap) return x.gap < y.gap;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  constexpr std::size_t kFree = SIZE_MAX;
  std::vector<std::size_t> link(2 * pieces.size(), kFree);
  DisjointSet chains(pieces.size());
  for (const auto& c : candidates) {
    if (link[c.a] != kFree || link[c.b] != kFree) continue;
    if (!chains.unite(c.a / 2, c.b / 2)) continue;
    link[c.a] = c.b;
    link[c.b] = c.a;
  }

  CIMap map;
  std::vector<bool> used(pieces.size(), false);
  for (std::size_t start = 0; start < pieces.size(); ++start) {
    if (used[start]) continue;
    const bool head_free = link[2 * start] == kFree;
    const bool tail_free = link[2 * start + 1] == kFree;
    if (!head_free && !tail_free) continue;  // interior of a chain, reached from one of its ends

    CurbPolyline merged;
    merged.source_tile = pieces[start].tile;
    std::size_t piece = start;
    bool enter_at_tail = !head_free;
    while (true) {
      used[piece] = true;
      append_points(merged.points, pieces[piece].curb->points, enter_at_tail);
      const std::size_t exit = 2 * piece + (enter_at_tail ? 0 : 1);
      const std::size_t next = link[exit];
      if (next == kFree) break;
      piece = next / 2;
      enter_at_tail = (next % 2) == 1;
    }
    if (merged.points.size() < 2) continue;
    merged.instance_id = static_cast<InstanceId>(map.curbs.size() + 1);
    map.curbs.push_back(std::move(merged));
  }
  return map;
}

CurbPolyline resample_polyline(const CurbPolyline& curb, double interval) {
  if (!(interval > 0.0)) throw InputError("resample interval must be positive");
  if (curb.points.size() < 2) throw InputError("resampling needs at least two points");
  const auto s = arc_length_2d(curb.points);
  const double length = s.back();
  if (length == 0.0) return curb;

  CurbPolyline out;
  out.instance_id = curb.instance_id;
  out.source_tile = curb.source_tile;
  out.points.push_back(curb.points.front());
  std::size_t seg = 0;
  for (std::size_t k = 1;; ++k) {
    const double station = static_cast<double>(k) * interval;
    if (station >= length - 1e-9) break;
    while (seg + 1 < s.size() - 1 && s[seg + 1] < station) ++seg;
    const double span = s[seg + 1] - s[seg];
    const double t = span > 0.0 ? (station - s[seg]) / span : 0.0;
    out.points.push_back(curb.points[seg] + t * (curb.points[seg + 1] - curb.points[seg]));
  }
  out.points.push_back(curb.points.back());
  return out;
}

void resample_map(CIMap& map, double interval, std::size_t workers) {
  parallel_for(map.curbs.size(), workers,
               [&](std::size_t i) { map.curbs[i] = resample_polyline(map.curbs[i], interval); });
}

}  // namespace curblabel
