#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "roiscope/capture.hpp"
#include "roiscope/exec.hpp"
#include "roiscope/geometry.hpp"

namespace roiscope {

struct DbscanParams {
  double eps = 25.0;         ///< neighborhood radius in pixels (strict: d < eps)
  std::size_t min_pts = 5;   ///< neighborhood size, the point itself included
};

struct Cluster {
  std::size_t segment_index = 0;
  std::vector<ScreenPoint> points;  ///< lexicographic (x, y, t) order
};

inline constexpr int kNoise = -1;

// Per-point cluster labels (kNoise for noise) of a density clustering.
//
// Points are visited in lexicographic order and each cluster is fully
// expanded before the next seed is considered, so a border point reachable
// from several clusters joins the one whose lowest core point comes first.
// Clusters ending up with fewer than min_pts members (possible when their
// border points were claimed earlier) are dissolved into noise. Labels are
// numbered in discovery order.
std::vector<int> dbscan_labels(std::span<const Vec2> points, const DbscanParams& params, Exec exec = Exec::parallel);

// Core-point flags: a point is core when at least min_pts points (itself
// included) lie strictly closer than eps. Grid-accelerated OpenMP kernel.
std::vector<std::uint8_t> core_flags(std::span<const Vec2> points, const DbscanParams& params, Exec exec);

// Spatial density clustering of one segment.
std::vector<Cluster> st_dbscan(const Segment& segment, const DbscanParams& params, Exec exec = Exec::parallel);

}  // namespace roiscope
