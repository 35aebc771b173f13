#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "roiscope/capture.hpp"
#include "roiscope/dbscan.hpp"
#include "roiscope/rng.hpp"

using namespace roiscope;

namespace {

std::vector<Vec2> disc(Rng& rng, Vec2 c, double r, std::size_t n) {
  std::vector<Vec2> pts;
  while (pts.size() < n) {
    const Vec2 p{rng.uniform(-r, r), rng.uniform(-r, r)};
    if (std::hypot(p.x, p.y) <= r) pts.push_back(c + p);
  }
  return pts;
}

}  // namespace

TEST_CASE("single dense blob is one cluster") {
  Rng rng(1);
  const auto pts = disc(rng, {0, 0}, 5, 20);
  const auto labels = dbscan_labels(pts, {10, 4});
  for (int l : labels) CHECK(l == 0);
}

TEST_CASE("two separated blobs are two clusters") {
  Rng rng(2);
  auto pts = disc(rng, {0, 0}, 5, 20);
  const auto far = disc(rng, {1000, 0}, 5, 20);
  pts.insert(pts.end(), far.begin(), far.end());
  const auto part = oracle::partition_from_labels(dbscan_labels(pts, {10, 4}));
  CHECK(part.size() == 2);
}

TEST_CASE("neighborhoods are strict and include the point itself") {
  // Three points exactly eps apart: nobody has another point strictly within eps.
  const std::vector<Vec2> pts{{0, 0}, {10, 0}, {20, 0}};
  CHECK(dbscan_labels(pts, {10, 2}) == std::vector<int>{kNoise, kNoise, kNoise});
  CHECK(dbscan_labels(pts, {10.0001, 2}) == std::vector<int>{0, 0, 0});
  // min_pts = 1 makes every point its own core.
  CHECK(oracle::partition_from_labels(dbscan_labels(pts, {5, 1})).size() == 3);
}

TEST_CASE("core flags match the pairwise definition") {
  Rng rng(3);
  std::vector<Vec2> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({rng.uniform(0, 1600), rng.uniform(0, 900)});
  for (Exec e : {Exec::serial, Exec::parallel}) {
    const auto flags = core_flags(pts, {15, 5}, e);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::size_t n = 0;
      for (const Vec2& q : pts) n += std::hypot(pts[i].x - q.x, pts[i].y - q.y) < 15 ? 1 : 0;
      CHECK(static_cast<bool>(flags[i]) == (n >= 5));
    }
  }
}

TEST_CASE("partitions equal the reachability oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Vec2> pts;
    const std::size_t blobs = 1 + rng.below(4);
    for (std::size_t b = 0; b < blobs; ++b) {
      const Vec2 c{rng.uniform(0, 400), rng.uniform(0, 300)};
      for (std::size_t i = 0; i < 20 + rng.below(60); ++i) pts.push_back({std::round(c.x + rng.normal(0, 15)), std::round(c.y + rng.normal(0, 15))});
    }
    for (std::size_t i = 0; i < rng.below(60); ++i) pts.push_back({std::round(rng.uniform(0, 400)), std::round(rng.uniform(0, 300))});
    const DbscanParams params{5.0 + rng.uniform(0, 20), 2 + rng.below(6)};
    const auto expected = oracle::dbscan_partition(pts, params.eps, params.min_pts);
    CHECK(oracle::partition_from_labels(dbscan_labels(pts, params, Exec::serial)) == expected);
    CHECK(dbscan_labels(pts, params, Exec::serial) == dbscan_labels(pts, params, Exec::parallel));
  }
}

TEST_CASE("result does not depend on input order") {
  Rng rng(5);
  std::vector<Vec2> pts;
  for (int i = 0; i < 150; ++i) pts.push_back({std::round(rng.normal(0, 20)), std::round(rng.normal(0, 20))});
  const auto base = oracle::partition_from_labels(dbscan_labels(pts, {8, 4}));
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<Vec2> shuffled;
  for (std::size_t i : perm) shuffled.push_back(pts[i]);
  const auto labels = dbscan_labels(shuffled, {8, 4});
  std::vector<int> back(pts.size());
  for (std::size_t i = 0; i < perm.size(); ++i) back[perm[i]] = labels[i];
  CHECK(oracle::partition_from_labels(back) == base);
}

TEST_CASE("st_dbscan clusters carry the segment index and sorted points") {
  Rng rng(6);
  Segment seg{4, {}};
  std::int64_t t = 0;
  for (const Vec2& p : disc(rng, {50, 50}, 6, 30)) seg.points.push_back({p.x, p.y, t += 100});
  seg.points.push_back({900, 900, t += 100});
  const auto clusters = st_dbscan(seg, {10, 5});
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].segment_index == 4);
  CHECK(clusters[0].points.size() == 30);
  CHECK(std::is_sorted(clusters[0].points.begin(), clusters[0].points.end(), [](const ScreenPoint& a, const ScreenPoint& b) {
    return a.x < b.x || (a.x == b.x && (a.y < b.y || (a.y == b.y && a.t < b.t)));
  }));
  CHECK(st_dbscan(Segment{1, {}}, {10, 5}).empty());
}
