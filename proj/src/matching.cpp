#include "roiscope/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace roiscope {

namespace {

bool inside(const ConvexPolygon& roi, const Poi& poi, const Viewport& viewport) {
  const ScreenPoint s = project_to_screen(poi.location, viewport);
  return roi.contains({s.x, s.y});
}

}  // namespace

GeoBox geo_bounds(const ConvexPolygon& polygon, const Viewport& viewport) {
  const Box2 b = polygon.bounds();
  // The projection is affine per axis, so the box corners bound the polygon.
  const GeoPoint lo = project_to_geo({b.min.x, b.min.y, 0}, viewport);
  const GeoPoint hi = project_to_geo({b.max.x, b.max.y, 0}, viewport);
  const double pad = 1e-6 * viewport.scale / std::cos(viewport.gamma * std::numbers::pi / 180.0) + 1e-9;
  return {std::min(lo.lat, hi.lat) - pad, std::min(lo.lon, hi.lon) - pad, std::max(lo.lat, hi.lat) + pad,
          std::max(lo.lon, hi.lon) + pad};
}

std::vector<std::uint32_t> match_points(const ConvexPolygon& roi, const Quadtree& index, std::span<const Poi> pois,
                                        const Viewport& viewport, Exec exec) {
  if (roi.empty()) return {};
  const std::vector<std::uint32_t> cand = index.candidates(geo_bounds(roi, viewport));
  std::vector<std::uint8_t> hit(cand.size(), 0);
  const bool parallel = exec == Exec::parallel && cand.size() > 2048;
  const auto n = static_cast<std::int64_t>(cand.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    hit[static_cast<std::size_t>(i)] = inside(roi, pois[cand[static_cast<std::size_t>(i)]], viewport) ? 1 : 0;
  }
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (hit[i]) out.push_back(cand[i]);
  }
  return out;
}

std::vector<std::uint32_t> match_points_scan(const ConvexPolygon& roi, std::span<const Poi> pois, const Viewport& viewport) {
  std::vector<std::uint32_t> out;
  if (roi.empty()) return out;
  for (std::uint32_t i = 0; i < pois.size(); ++i) {
    if (inside(roi, pois[i], viewport)) out.push_back(i);
  }
  return out;
}

}  // namespace roiscope
