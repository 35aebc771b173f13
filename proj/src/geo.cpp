#include "roiscope/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "roiscope/errors.hpp"

namespace roiscope {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double clamp_logged(double value, double lo, double hi, const char* what) {
  if (value < lo || value > hi) {
    spdlog::warn("projected {} {} outside [{}, {}], clamping", what, value, lo, hi);
    return std::clamp(value, lo, hi);
  }
  return value;
}

}  // namespace

void Viewport::validate() const {
  if (!(std::abs(gamma) < 90.0)) {
    throw DegenerateViewport("viewport center latitude must satisfy |gamma| < 90");
  }
  if (!(scale > 0.0)) {
    throw DegenerateViewport("viewport scale must be positive");
  }
}

GeoPoint project_to_geo(const ScreenPoint& m, const Viewport& v) {
  v.validate();
  const double cos_gamma = std::cos(v.gamma * kDegToRad);
  const double lat = m.y * v.scale + v.gamma;
  const double lon = (m.x * v.scale) / cos_gamma + v.theta;
  return {clamp_logged(lat, -90.0, 90.0, "latitude"), clamp_logged(lon, -180.0, 180.0, "longitude")};
}

ScreenPoint project_to_screen(const GeoPoint& p, const Viewport& v) {
  v.validate();
  const double cos_gamma = std::cos(v.gamma * kDegToRad);
  return {((p.lon - v.theta) * cos_gamma) / v.scale, (p.lat - v.gamma) / v.scale, 0};
}

}  // namespace roiscope
