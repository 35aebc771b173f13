#include "roiscope/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "roiscope/errors.hpp"

namespace roiscope {

namespace {

// Uniform grid with cell side eps; neighbors of a point live in the 3x3 block
// around its cell.
class Grid {
public:
  Grid(std::span<const Vec2> points, double eps) : points_(points), eps_(eps) {
    for (std::uint32_t i = 0; i < points.size(); ++i) cells_[cell_of(points[i])].push_back(i);
  }

  template <typename Fn>
  void for_each_neighbor(std::uint32_t i, Fn&& fn) const {
    const auto [cx, cy] = cell_of(points_[i]);
    const double eps2 = eps_ * eps_;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(Cell{cx + dx, cy + dy});
        if (it == cells_.end()) continue;
        for (std::uint32_t j : it->second) {
          const double ddx = points_[j].x - points_[i].x;
          const double ddy = points_[j].y - points_[i].y;
          if (ddx * ddx + ddy * ddy < eps2) fn(j);
        }
      }
    }
  }

private:
  struct Cell {
    std::int64_t x, y;
    bool operator==(const Cell&) const = default;
  };
  struct CellHash {
    std::size_t operator()(const Cell& c) const {
      return std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(c.x) * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(c.y));
    }
  };
  Cell cell_of(const Vec2& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / eps_)), static_cast<std::int64_t>(std::floor(p.y / eps_))};
  }

  std::span<const Vec2> points_;
  double eps_;
  std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> cells_;
};

void check(const DbscanParams& params) {
  if (!(params.eps > 0.0)) throw ConfigError("dbscan eps must be positive");
  if (params.min_pts < 1) throw ConfigError("dbscan min_pts must be at least 1");
}

std::vector<std::uint8_t> core_flags_on(const Grid& grid, std::size_t n, std::size_t min_pts, Exec exec) {
  std::vector<std::uint8_t> core(n, 0);
  const bool parallel = exec == Exec::parallel;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    std::size_t neighbors = 0;
    grid.for_each_neighbor(static_cast<std::uint32_t>(i), [&](std::uint32_t) { ++neighbors; });
    core[static_cast<std::size_t>(i)] = neighbors >= min_pts ? 1 : 0;
  }
  return core;
}

}  // namespace

std::vector<std::uint8_t> core_flags(std::span<const Vec2> points, const DbscanParams& params, Exec exec) {
  check(params);
  const Grid grid(points, params.eps);
  return core_flags_on(grid, points.size(), params.min_pts, exec);
}

std::vector<int> dbscan_labels(std::span<const Vec2> points, const DbscanParams& params, Exec exec) {
  check(params);
  const std::size_t n = points.size();
  std::vector<int> labels(n, kNoise);
  if (n == 0) return labels;

  const Grid grid(points, params.eps);
  const std::vector<std::uint8_t> core = core_flags_on(grid, n, params.min_pts, exec);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return lex_less(points[a], points[b]); });

  int next_label = 0;
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t seed : order) {
    if (!core[seed] || labels[seed] != kNoise) continue;
    const int label = next_label++;
    labels[seed] = label;
    frontier.assign(1, seed);
    while (!frontier.empty()) {
      const std::uint32_t q = frontier.back();
      frontier.pop_back();
      grid.for_each_neighbor(q, [&](std::uint32_t r) {
        if (labels[r] != kNoise) return;
        labels[r] = label;
        if (core[r]) frontier.push_back(r);
      });
    }
  }

  // Dissolve undersized clusters and renumber the survivors in order.
  std::vector<std::size_t> sizes(static_cast<std::size_t>(next_label), 0);
  for (int l : labels) {
    if (l != kNoise) ++sizes[static_cast<std::size_t>(l)];
  }
  std::vector<int> remap(static_cast<std::size_t>(next_label), kNoise);
  int kept = 0;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    if (sizes[l] >= params.min_pts) remap[l] = kept++;
  }
  for (int& l : labels) {
    if (l != kNoise) l = remap[static_cast<std::size_t>(l)];
  }
  return labels;
}

std::vector<Cluster> st_dbscan(const Segment& segment, const DbscanParams& params, Exec exec) {
  std::vector<ScreenPoint> sorted = segment.points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScreenPoint& a, const ScreenPoint& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.t < b.t;
  });
  std::vector<Vec2> xy;
  xy.reserve(sorted.size());
  for (const ScreenPoint& p : sorted) xy.push_back({p.x, p.y});

  const std::vector<int> labels = dbscan_labels(xy, params, exec);
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Cluster> clusters(static_cast<std::size_t>(std::max(count, 0)));
  for (Cluster& c : clusters) c.segment_index = segment.index;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (labels[i] != kNoise) clusters[static_cast<std::size_t>(labels[i])].points.push_back(sorted[i]);
  }
  return clusters;
}

}  // namespace roiscope
