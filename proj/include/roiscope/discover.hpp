#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "roiscope/capture.hpp"
#include "roiscope/dbscan.hpp"
#include "roiscope/exec.hpp"
#include "roiscope/feedback.hpp"
#include "roiscope/geometry.hpp"

namespace roiscope {

struct DiscoverConfig {
  DbscanParams dbscan;
  double xi = 7.0;               ///< expected exploratory signals per interaction
  double merge_tolerance = 1.0;  ///< px; ROIs whose vertex sets agree this closely are merged
};

// Hull of one cluster, after confidence expansion.
struct ClusterPolygon {
  std::size_t id = 0;
  std::size_t segment_index = 0;
  std::size_t cluster_size = 0;
  ConvexPolygon polygon;
};

struct Roi {
  std::size_t id = 0;
  ConvexPolygon polygon;
  std::pair<std::size_t, std::size_t> source;  ///< ids of the two contributing polygons
  double area = 0.0;
};

struct DiscoverResult {
  double confidence = 0.0;
  std::vector<ClusterPolygon> polygons;
  std::vector<Roi> rois;
};

// Cluster, filter, hull and expand every segment; returns the polygons in
// segment then cluster order. Degenerate clusters are skipped.
std::vector<ClusterPolygon> segment_polygons(std::span<const Segment> segments, double confidence,
                                             const DbscanParams& params, Exec exec = Exec::parallel);

// Intersects every pair of polygons from different segments; non-empty
// overlaps become ROIs, near-duplicates are merged (first pair wins).
std::vector<Roi> cross_segment_rois(std::span<const ClusterPolygon> polygons, double merge_tolerance,
                                    Exec exec = Exec::parallel);

std::vector<Roi> discover_rois(std::span<const Segment> segments, double confidence, const DiscoverConfig& cfg,
                               Exec exec = Exec::parallel);

// Confidence is taken from the feedback vector and its interaction count.
DiscoverResult discover_rois(std::span<const Segment> segments, const FeedbackVector& feedback, const DiscoverConfig& cfg,
                             Exec exec = Exec::parallel);

}  // namespace roiscope
