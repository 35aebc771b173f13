#include "roiscope/quadtree.hpp"

#include <algorithm>
#include <string>

#include "roiscope/errors.hpp"

namespace roiscope {

namespace {

Quadtree::Node make_node(const GeoBox& box, std::size_t depth) {
  Quadtree::Node n;
  n.box = box;
  n.depth = depth;
  return n;
}

}  // namespace

Quadtree Quadtree::build(std::span<const Poi> pois, const QuadtreeOptions& options, const GeoBox& root) {
  std::vector<GeoPoint> points;
  points.reserve(pois.size());
  for (const Poi& p : pois) {
    if (!root.contains(p.location)) {
      throw IngestError("POI " + p.id + " at (" + std::to_string(p.location.lat) + ", " + std::to_string(p.location.lon) +
                        ") lies outside the index bounds");
    }
    points.push_back(p.location);
  }
  return build(points, options, root);
}

Quadtree Quadtree::build(std::span<const GeoPoint> points, const QuadtreeOptions& options, const GeoBox& root) {
  if (options.capacity == 0) throw ConfigError("quadtree capacity must be positive");
  Quadtree tree;
  tree.options_ = options;
  tree.locations_.assign(points.begin(), points.end());
  tree.nodes_.push_back(make_node(root, 0));
  for (std::uint32_t i = 0; i < tree.locations_.size(); ++i) {
    if (!root.contains(tree.locations_[i])) {
      throw IngestError("point #" + std::to_string(i) + " lies outside the index bounds");
    }
    tree.insert(i);
  }
  return tree;
}

std::size_t Quadtree::child_for(const Node& node, const GeoPoint& p) const {
  const double mid_lat = 0.5 * (node.box.min_lat + node.box.max_lat);
  const double mid_lon = 0.5 * (node.box.min_lon + node.box.max_lon);
  const std::size_t north = p.lat >= mid_lat ? 2 : 0;
  const std::size_t east = p.lon >= mid_lon ? 1 : 0;
  return static_cast<std::size_t>(node.first_child) + north + east;
}

void Quadtree::insert(std::uint32_t item) {
  std::size_t at = 0;
  while (!nodes_[at].leaf()) at = child_for(nodes_[at], locations_[item]);
  nodes_[at].items.push_back(item);
  if (nodes_[at].items.size() > options_.capacity && nodes_[at].depth < options_.max_depth) split(at);
}

void Quadtree::split(std::size_t node) {
  const GeoBox b = nodes_[node].box;
  const std::size_t depth = nodes_[node].depth + 1;
  const double mid_lat = 0.5 * (b.min_lat + b.max_lat);
  const double mid_lon = 0.5 * (b.min_lon + b.max_lon);
  const auto first = static_cast<std::int32_t>(nodes_.size());
  // Order matches child_for: south-west, south-east, north-west, north-east.
  nodes_.push_back(make_node({b.min_lat, b.min_lon, mid_lat, mid_lon}, depth));
  nodes_.push_back(make_node({b.min_lat, mid_lon, mid_lat, b.max_lon}, depth));
  nodes_.push_back(make_node({mid_lat, b.min_lon, b.max_lat, mid_lon}, depth));
  nodes_.push_back(make_node({mid_lat, mid_lon, b.max_lat, b.max_lon}, depth));
  nodes_[node].first_child = first;

  std::vector<std::uint32_t> items = std::move(nodes_[node].items);
  nodes_[node].items.clear();
  for (std::uint32_t item : items) {
    const std::size_t child = child_for(nodes_[node], locations_[item]);
    nodes_[child].items.push_back(item);
  }
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t child = static_cast<std::size_t>(first) + c;
    if (nodes_[child].items.size() > options_.capacity && depth < options_.max_depth) split(child);
  }
}

template <typename Fn>
void Quadtree::visit(const GeoBox& box, Fn&& fn) const {
  if (nodes_.empty()) return;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t at = stack.back();
    stack.pop_back();
    const Node& n = nodes_[at];
    if (!n.box.intersects(box)) continue;
    if (n.leaf()) {
      fn(n);
      continue;
    }
    for (std::size_t c = 4; c-- > 0;) stack.push_back(static_cast<std::size_t>(n.first_child) + c);
  }
}

std::vector<std::uint32_t> Quadtree::query(const GeoBox& box) const {
  std::vector<std::uint32_t> out;
  visit(box, [&](const Node& n) {
    for (std::uint32_t i : n.items) {
      if (box.contains(locations_[i])) out.push_back(i);
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> Quadtree::candidates(const GeoBox& box) const {
  std::vector<std::uint32_t> out;
  visit(box, [&](const Node& n) { out.insert(out.end(), n.items.begin(), n.items.end()); });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Quadtree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf(); }));
}

std::size_t Quadtree::depth() const {
  std::size_t d = 0;
  for (const Node& n : nodes_) d = std::max(d, n.depth);
  return d;
}

}  // namespace roiscope
