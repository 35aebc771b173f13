#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace roiscope {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
};

// Lexicographic (x, then y) order used for all point lists handed to hull code.
inline bool lex_less(const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Twice the signed area of (o, a, b); positive for a left turn.
inline double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(const Vec2& a, const Vec2& b);

struct Box2 {
  Vec2 min;
  Vec2 max;
};

// Convex polygon in pixel space. Vertices are counter-clockwise, start at the
// lowest (then leftmost) vertex, and contain no repeated or collinear vertices.
class ConvexPolygon {
public:
  ConvexPolygon() = default;

  // Normalizes a counter-clockwise vertex loop into canonical form.
  static ConvexPolygon from_ccw(std::vector<Vec2> vertices);

  // Takes vertices that are already canonical, without checks.
  static ConvexPolygon adopt(std::vector<Vec2> canonical);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.size() < 3; }

  double area() const;
  Vec2 centroid() const;
  Box2 bounds() const;

  // Closed containment: points on an edge count as inside.
  bool contains(const Vec2& p) const;

  friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

private:
  std::vector<Vec2> vertices_;
};

// Drops points strictly inside the quadrilateral spanned by the extreme
// points in x and y. Order of the surviving points is preserved.
std::vector<Vec2> akl_toussaint_filter(std::span<const Vec2> points);

// Monotone-chain hull. Input already in lex_less order skips the sort.
// Returns nullopt for fewer than 3 points or all-collinear input.
std::optional<ConvexPolygon> convex_hull(std::span<const Vec2> points);

// Scales about the area centroid so that area grows by a factor (1 + confidence).
ConvexPolygon expand_polygon(const ConvexPolygon& polygon, double confidence);

// Intersection of two convex polygons; nullopt when the overlap has no area.
std::optional<ConvexPolygon> intersect_polygons(const ConvexPolygon& a, const ConvexPolygon& b);

// True when every vertex of each polygon lies within `tolerance` of some
// vertex of the other.
bool near_identical(const ConvexPolygon& a, const ConvexPolygon& b, double tolerance);

}  // namespace roiscope
