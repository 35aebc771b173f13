#include "roiscope/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace roiscope {

namespace {

// Minimum area for an intersection to count as a region.
constexpr double kMinArea = 1e-9;
// Distances below this are treated as coincident vertices.
constexpr double kMergeDistance = 1e-9;
// Signed distance tolerance for the closed containment test.
constexpr double kEdgeTolerance = 1e-9;

bool starts_before(const Vec2& a, const Vec2& b) { return a.y < b.y || (a.y == b.y && a.x < b.x); }

}  // namespace

double distance(const Vec2& a, const Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

ConvexPolygon ConvexPolygon::from_ccw(std::vector<Vec2> v) {
  std::vector<Vec2> out;
  out.reserve(v.size());
  for (const Vec2& p : v) {
    if (out.empty() || distance(out.back(), p) > kMergeDistance) out.push_back(p);
  }
  while (out.size() > 1 && distance(out.front(), out.back()) <= kMergeDistance) out.pop_back();

  // Remove collinear vertices until none is left.
  bool changed = true;
  while (changed && out.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < out.size() && out.size() >= 3; ++i) {
      const Vec2& prev = out[(i + out.size() - 1) % out.size()];
      const Vec2& next = out[(i + 1) % out.size()];
      const double len = distance(prev, next);
      if (std::abs(cross(prev, out[i], next)) <= kMergeDistance * std::max(1.0, len)) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }

  ConvexPolygon poly;
  if (out.size() < 3) return poly;
  const auto start = std::min_element(out.begin(), out.end(), starts_before);
  std::rotate(out.begin(), start, out.end());
  poly.vertices_ = std::move(out);
  return poly;
}

ConvexPolygon ConvexPolygon::adopt(std::vector<Vec2> canonical) {
  ConvexPolygon poly;
  poly.vertices_ = std::move(canonical);
  return poly;
}

double ConvexPolygon::area() const {
  if (empty()) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % vertices_.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

Vec2 ConvexPolygon::centroid() const {
  if (vertices_.empty()) return {};
  // Shift to the first vertex to keep the shoelace sums well conditioned.
  const Vec2 o = vertices_.front();
  double twice = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2 a = vertices_[i] - o;
    const Vec2 b = vertices_[(i + 1) % vertices_.size()] - o;
    const double w = a.x * b.y - b.x * a.y;
    twice += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  if (twice == 0.0) {
    Vec2 mean;
    for (const Vec2& p : vertices_) mean = mean + p;
    return (1.0 / static_cast<double>(vertices_.size())) * mean;
  }
  return Vec2{o.x + cx / (3.0 * twice), o.y + cy / (3.0 * twice)};
}

Box2 ConvexPolygon::bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Box2 box{{inf, inf}, {-inf, -inf}};
  for (const Vec2& p : vertices_) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
  }
  return box;
}

bool ConvexPolygon::contains(const Vec2& p) const {
  if (empty()) return false;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % vertices_.size()];
    if (cross(a, b, p) < -kEdgeTolerance * distance(a, b)) return false;
  }
  return true;
}

std::vector<Vec2> akl_toussaint_filter(std::span<const Vec2> points) {
  std::vector<Vec2> out(points.begin(), points.end());
  if (points.size() < 4) return out;

  Vec2 left = points[0], right = points[0], bottom = points[0], top = points[0];
  for (const Vec2& p : points) {
    if (p.x < left.x || (p.x == left.x && p.y < left.y)) left = p;
    if (p.x > right.x || (p.x == right.x && p.y > right.y)) right = p;
    if (p.y < bottom.y || (p.y == bottom.y && p.x > bottom.x)) bottom = p;
    if (p.y > top.y || (p.y == top.y && p.x < top.x)) top = p;
  }

  std::vector<Vec2> quad;
  for (const Vec2& q : {left, bottom, right, top}) {
    if (quad.empty() || !(quad.back() == q)) quad.push_back(q);
  }
  while (quad.size() > 1 && quad.front() == quad.back()) quad.pop_back();
  if (quad.size() < 3) return out;

  auto strictly_inside = [&](const Vec2& p) {
    for (std::size_t i = 0; i < quad.size(); ++i) {
      if (cross(quad[i], quad[(i + 1) % quad.size()], p) <= 0.0) return false;
    }
    return true;
  };
  std::erase_if(out, strictly_inside);
  return out;
}

std::optional<ConvexPolygon> convex_hull(std::span<const Vec2> points) {
  if (points.size() < 3) return std::nullopt;
  std::vector<Vec2> sorted(points.begin(), points.end());
  if (!std::is_sorted(sorted.begin(), sorted.end(), lex_less)) std::sort(sorted.begin(), sorted.end(), lex_less);
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 3) return std::nullopt;

  std::vector<Vec2> hull(2 * sorted.size());
  std::size_t k = 0;
  for (const Vec2& p : sorted) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = sorted.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], sorted[i]) <= 0.0) --k;
    hull[k++] = sorted[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) return std::nullopt;

  auto start = std::min_element(hull.begin(), hull.end(), starts_before);
  std::rotate(hull.begin(), start, hull.end());
  // Vertices are exact input points, already canonical.
  return ConvexPolygon::adopt(std::move(hull));
}

ConvexPolygon expand_polygon(const ConvexPolygon& polygon, double confidence) {
  confidence = std::clamp(confidence, 0.0, 1.0);
  if (confidence == 0.0 || polygon.empty()) return polygon;
  const double factor = std::sqrt(1.0 + confidence);
  const Vec2 c = polygon.centroid();
  std::vector<Vec2> scaled;
  scaled.reserve(polygon.size());
  for (const Vec2& p : polygon.vertices()) scaled.push_back(c + factor * (p - c));
  return ConvexPolygon::from_ccw(std::move(scaled));
}

std::optional<ConvexPolygon> intersect_polygons(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.empty() || b.empty()) return std::nullopt;
  const Box2 ba = a.bounds(), bb = b.bounds();
  if (ba.max.x < bb.min.x || bb.max.x < ba.min.x || ba.max.y < bb.min.y || bb.max.y < ba.min.y) return std::nullopt;

  // Sutherland-Hodgman: clip `a` against each edge of `b`.
  std::vector<Vec2> subject = a.vertices();
  std::vector<Vec2> next;
  const auto& clip = b.vertices();
  for (std::size_t i = 0; i < clip.size() && !subject.empty(); ++i) {
    const Vec2& e0 = clip[i];
    const Vec2& e1 = clip[(i + 1) % clip.size()];
    next.clear();
    for (std::size_t j = 0; j < subject.size(); ++j) {
      const Vec2& cur = subject[j];
      const Vec2& prev = subject[(j + subject.size() - 1) % subject.size()];
      const double dc = cross(e0, e1, cur);
      const double dp = cross(e0, e1, prev);
      if (dc >= 0.0) {
        if (dp < 0.0) next.push_back(prev + (dp / (dp - dc)) * (cur - prev));
        next.push_back(cur);
      } else if (dp > 0.0) {
        next.push_back(prev + (dp / (dp - dc)) * (cur - prev));
      }
    }
    subject.swap(next);
  }
  if (subject.size() < 3) return std::nullopt;
  ConvexPolygon out = ConvexPolygon::from_ccw(std::move(subject));
  if (out.empty() || out.area() <= kMinArea) return std::nullopt;
  return out;
}

bool near_identical(const ConvexPolygon& a, const ConvexPolygon& b, double tolerance) {
  auto covered = [tolerance](const ConvexPolygon& from, const ConvexPolygon& to) {
    for (const Vec2& p : from.vertices()) {
      const bool hit = std::any_of(to.vertices().begin(), to.vertices().end(),
                                   [&](const Vec2& q) { return distance(p, q) <= tolerance; });
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

}  // namespace roiscope
