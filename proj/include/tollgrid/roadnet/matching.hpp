#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tollgrid/error.hpp"
#include "tollgrid/geo/polyline.hpp"
#include "tollgrid/roadnet/network.hpp"

namespace tollgrid::roadnet {

struct MatchedPoint {
  std::int64_t edge_id = 0;
  double t = 0.0;  // from -> to
  GeoPoint point;
  double deviation_m = 0.0;
};

class MatchError : public Error {
 public:
  MatchError(const std::string& what, std::size_t gap_from, std::size_t gap_to)
      : Error(what), gap_from_(gap_from), gap_to_(gap_to) {}

  // Indices of the raw points that could not be joined.
  std::size_t gap_from() const { return gap_from_; }
  std::size_t gap_to() const { return gap_to_; }

 private:
  std::size_t gap_from_;
  std::size_t gap_to_;
};

// Distance used for snapping: planar lon/lat with longitude scaled by
// cos(latitude of p), in scaled degrees. Also yields the clamped projection.
double scaled_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b, double* t_out);

// Edge minimising scaled_distance to p; ties go to the lowest edge id.
// Throws ContractError on an empty network.
MatchedPoint nearest_edge(const RoadNetwork& net, const GeoPoint& p);

// Snaps every raw point and joins consecutive snaps: directly when they
// share an edge, otherwise along the length-weighted shortest node path.
// Throws MatchError when two consecutive snaps are not connected or the trace
// collapses to a single point.
geo::Polyline match_trace(const RoadNetwork& net, std::span<const GeoPoint> raw);

}  // namespace tollgrid::roadnet
