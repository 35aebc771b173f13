#include "roiscope/discover.hpp"

#include <algorithm>
#include <optional>

#include <spdlog/spdlog.h>

namespace roiscope {

std::vector<ClusterPolygon> segment_polygons(std::span<const Segment> segments, double confidence,
                                             const DbscanParams& params, Exec exec) {
  std::vector<std::vector<ClusterPolygon>> per_segment(segments.size());
  const bool parallel = exec == Exec::parallel && segments.size() > 1;
  const auto count = static_cast<std::int64_t>(segments.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::int64_t s = 0; s < count; ++s) {
    const Segment& segment = segments[static_cast<std::size_t>(s)];
    // Nested regions would oversubscribe; clustering runs serially inside.
    const Exec inner = parallel ? Exec::serial : exec;
    for (const Cluster& cluster : st_dbscan(segment, params, inner)) {
      std::vector<Vec2> xy;
      xy.reserve(cluster.points.size());
      for (const ScreenPoint& p : cluster.points) {
        if (xy.empty() || !(xy.back() == Vec2{p.x, p.y})) xy.push_back({p.x, p.y});
      }
      const std::vector<Vec2> kept = akl_toussaint_filter(xy);
      std::optional<ConvexPolygon> hull = convex_hull(kept);
      if (!hull) {
        spdlog::debug("segment {}: dropping degenerate cluster of {} points", segment.index, cluster.points.size());
        continue;
      }
      per_segment[static_cast<std::size_t>(s)].push_back(
          {0, segment.index, cluster.points.size(), expand_polygon(*hull, confidence)});
    }
  }
  std::vector<ClusterPolygon> out;
  for (auto& group : per_segment) {
    for (ClusterPolygon& p : group) {
      p.id = out.size();
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<Roi> cross_segment_rois(std::span<const ClusterPolygon> polygons, double merge_tolerance, Exec exec) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    for (std::size_t j = i + 1; j < polygons.size(); ++j) {
      if (polygons[i].segment_index != polygons[j].segment_index) pairs.emplace_back(i, j);
    }
  }

  std::vector<std::optional<ConvexPolygon>> overlaps(pairs.size());
  const bool parallel = exec == Exec::parallel && pairs.size() > 16;
  const auto count = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::int64_t k = 0; k < count; ++k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    overlaps[static_cast<std::size_t>(k)] = intersect_polygons(polygons[i].polygon, polygons[j].polygon);
  }

  std::vector<Roi> rois;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!overlaps[k]) continue;
    const bool duplicate = std::any_of(rois.begin(), rois.end(), [&](const Roi& r) {
      return near_identical(r.polygon, *overlaps[k], merge_tolerance);
    });
    if (duplicate) continue;
    Roi roi;
    roi.id = rois.size();
    roi.area = overlaps[k]->area();
    roi.polygon = std::move(*overlaps[k]);
    roi.source = {polygons[pairs[k].first].id, polygons[pairs[k].second].id};
    rois.push_back(std::move(roi));
  }
  return rois;
}

std::vector<Roi> discover_rois(std::span<const Segment> segments, double confidence, const DiscoverConfig& cfg, Exec exec) {
  const std::vector<ClusterPolygon> polygons = segment_polygons(segments, confidence, cfg.dbscan, exec);
  return cross_segment_rois(polygons, cfg.merge_tolerance, exec);
}

DiscoverResult discover_rois(std::span<const Segment> segments, const FeedbackVector& feedback, const DiscoverConfig& cfg,
                             Exec exec) {
  DiscoverResult result;
  result.confidence = confidence(feedback, cfg.xi);
  result.polygons = segment_polygons(segments, result.confidence, cfg.dbscan, exec);
  result.rois = cross_segment_rois(result.polygons, cfg.merge_tolerance, exec);
  return result;
}

}  // namespace roiscope
