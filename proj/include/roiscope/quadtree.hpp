#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "roiscope/facets.hpp"
#include "roiscope/geo.hpp"

namespace roiscope {

struct QuadtreeOptions {
  std::size_t capacity = 64;
  std::size_t max_depth = 12;
};

// Point quadtree over lat/lon, immutable once built. Each point index lives in
// exactly one leaf; a point on a split line goes to the north/east child.
class Quadtree {
public:
  struct Node {
    GeoBox box;
    std::size_t depth = 0;
    std::int32_t first_child = -1;  ///< children are first_child .. first_child + 3
    std::vector<std::uint32_t> items;
    bool leaf() const { return first_child < 0; }
  };

  Quadtree() = default;

  // Throws IngestError naming the POI when a location is outside `root`.
  static Quadtree build(std::span<const Poi> pois, const QuadtreeOptions& options = {}, const GeoBox& root = GeoBox::world());
  static Quadtree build(std::span<const GeoPoint> points, const QuadtreeOptions& options = {}, const GeoBox& root = GeoBox::world());

  // Indices of all points inside the (closed) box.
  std::vector<std::uint32_t> query(const GeoBox& box) const;

  // Indices of every point in leaves whose cell intersects the box. Superset
  // of query(box); used as the candidate set for containment checks.
  std::vector<std::uint32_t> candidates(const GeoBox& box) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return locations_.size(); }
  std::size_t leaf_count() const;
  std::size_t depth() const;
  const GeoBox& root() const { return nodes_.front().box; }

private:
  void insert(std::uint32_t item);
  void split(std::size_t node);
  std::size_t child_for(const Node& node, const GeoPoint& p) const;

  template <typename Fn>
  void visit(const GeoBox& box, Fn&& fn) const;

  QuadtreeOptions options_;
  std::vector<GeoPoint> locations_;
  std::vector<Node> nodes_;
};

}  // namespace roiscope
