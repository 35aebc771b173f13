#pragma once

#include <cstdint>

namespace roiscope {

// Interaction-layer point. Offsets are in pixels from the layer center, y grows
// upward (toward higher latitude); t is milliseconds since session start.
struct ScreenPoint {
  double x = 0.0;
  double y = 0.0;
  std::int64_t t = 0;

  friend bool operator==(const ScreenPoint&, const ScreenPoint&) = default;
};

// Spatial-layer point in degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Geographic position of the interaction-layer center plus the zoom level.
struct Viewport {
  double gamma = 0.0;  ///< latitude of the screen center, degrees
  double theta = 0.0;  ///< longitude of the screen center, degrees
  double scale = 1.0;  ///< degrees per pixel

  // Throws DegenerateViewport if |gamma| >= 90 or scale <= 0.
  void validate() const;
};

// Equirectangular pixel -> lat/lon. Results outside the valid coordinate
// ranges are clamped and a warning is logged.
GeoPoint project_to_geo(const ScreenPoint& m, const Viewport& v);

// Inverse of project_to_geo. The returned timestamp is zero.
ScreenPoint project_to_screen(const GeoPoint& p, const Viewport& v);

// Axis-aligned lat/lon box, inclusive on all sides.
struct GeoBox {
  double min_lat = -90.0;
  double min_lon = -180.0;
  double max_lat = 90.0;
  double max_lon = 180.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
  bool intersects(const GeoBox& o) const {
    return min_lat <= o.max_lat && o.min_lat <= max_lat && min_lon <= o.max_lon && o.min_lon <= max_lon;
  }
  static GeoBox world() { return {}; }
};

}  // namespace roiscope
