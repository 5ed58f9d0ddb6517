#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "curblabel/types.hpp"

namespace curblabel {

struct LinkParams {
  double d_link = 0.5;                       // max endpoint gap, meters (exclusive)
  double theta_link = 20.0 * M_PI / 180.0;   // max orientation difference (exclusive)
  std::size_t tail_window = 5;               // endpoint points used for the orientation fit
  double tail_min_span = 0.5;                // the fit extends until its points span this far, meters

  void validate() const;
};

struct TileCurbs {
  TileIndex tile;
  std::vector<CurbPolyline> curbs;
};

/// Outgoing direction at one end of a curb: a total-least-squares line over the last
/// `window` points at that end, signed to point from the interior toward the endpoint.
/// The window grows until its points reach `min_span` from the endpoint, so dense,
/// jagged stage-one polylines still get a fit over a meaningful length.
Vec2 endpoint_direction(const CurbPolyline& curb, bool at_tail, std::size_t window, double min_span = 0.0);

/// Joins curbs split at tile borders and renumbers the result 1..N.
///
/// Candidate links pair endpoints of curbs in 8-adjacent tiles whose 2D gap is below
/// d_link and whose orientations (A outgoing vs. B incoming) differ by less than
/// theta_link. Links are accepted closest first, each endpoint at most once, never
/// closing a cycle. Chains are concatenated head to tail, flipping pieces as needed.
CIMap merge_tiles(std::span<const TileCurbs> per_tile, const LinkParams& params);

/// Linear resampling at arc-length stations 0, interval, 2*interval, ... along the 2D
/// polyline, closed by the exact last point. z is interpolated. A zero-length curb is
/// returned unchanged.
CurbPolyline resample_polyline(const CurbPolyline& curb, double interval);

/// Resamples every curb of a CI map in place.
void resample_map(CIMap& map, double interval, std::size_t workers = 1);

}  // namespace curblabel
