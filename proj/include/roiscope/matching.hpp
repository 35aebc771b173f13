#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "roiscope/exec.hpp"
#include "roiscope/facets.hpp"
#include "roiscope/geo.hpp"
#include "roiscope/geometry.hpp"
#include "roiscope/quadtree.hpp"

namespace roiscope {

struct MatchedSet {
  std::size_t roi_id = 0;
  std::vector<std::uint32_t> pois;  ///< ascending POI indices
  FacetVector facets;
};

// Lat/lon box covering a pixel-space polygon under the viewport, padded by a
// tiny margin so POIs that project onto the boundary are never pruned.
GeoBox geo_bounds(const ConvexPolygon& polygon, const Viewport& viewport);

// POIs whose projected screen location lies inside or on the polygon.
// Candidates come from the quadtree cells that meet the polygon's lat/lon
// box; the containment checks run as an OpenMP kernel.
std::vector<std::uint32_t> match_points(const ConvexPolygon& roi, const Quadtree& index, std::span<const Poi> pois,
                                        const Viewport& viewport, Exec exec = Exec::parallel);

// Serial full scan over every POI; the reference path for match_points.
std::vector<std::uint32_t> match_points_scan(const ConvexPolygon& roi, std::span<const Poi> pois, const Viewport& viewport);

}  // namespace roiscope
