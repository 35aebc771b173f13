#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roiscope/errors.hpp"
#include "roiscope/feedback.hpp"
#include "roiscope/fuzzy.hpp"
#include "roiscope/highlight.hpp"
#include "roiscope/rng.hpp"

using namespace roiscope;

namespace {

const Viewport kView{10, 20, 1e-4};

struct World {
  std::vector<Poi> pois;
  std::vector<FuzzyRegion> regions;
  std::vector<double> feedback;
};

// Two spatial blobs with disjoint facet profiles: blob 0 uses facets {0,1,2},
// blob 1 uses {3,4,5}.
World two_blobs(std::uint64_t seed, std::size_t per_blob = 40) {
  Rng rng(seed);
  World w;
  const Vec2 centers[2] = {{-200, 0}, {200, 0}};
  for (std::size_t b = 0; b < 2; ++b) {
    FuzzyRegion r;
    r.centroid = centers[b];
    r.k_prime = 5;
    for (std::size_t i = 0; i < per_blob; ++i) {
      Poi p;
      p.id = "b" + std::to_string(b) + "-" + std::to_string(100 + i);
      p.location = project_to_geo({centers[b].x + rng.normal(0, 20), centers[b].y + rng.normal(0, 20), 0}, kView);
      p.facets = {static_cast<std::uint32_t>(3 * b + rng.below(2)), static_cast<std::uint32_t>(3 * b + 2)};
      std::sort(p.facets.begin(), p.facets.end());
      r.matched.push_back(static_cast<std::uint32_t>(w.pois.size()));
      w.pois.push_back(std::move(p));
    }
    w.regions.push_back(std::move(r));
  }
  w.feedback = softmax(std::vector<double>{1, 0, 2, 0, 1, 0});
  return w;
}

// Plain fuzzy c-means on the same composite distance, for owner comparison.
std::vector<std::size_t> reference_owners(const World& w, const std::vector<std::uint32_t>& pool) {
  const std::size_t k = w.regions.size(), dims = w.feedback.size();
  std::vector<Vec2> pos;
  for (std::uint32_t i : pool) {
    const ScreenPoint s = project_to_screen(w.pois[i].location, kView);
    pos.push_back({s.x, s.y});
  }
  Vec2 lo = pos[0], hi = pos[0];
  for (const Vec2& p : pos) lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)}, hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  const double L = std::hypot(hi.x - lo.x, hi.y - lo.y);
  std::vector<Vec2> cpos;
  std::vector<std::vector<double>> cfac;
  for (const FuzzyRegion& r : w.regions) {
    cpos.push_back(r.centroid);
    std::vector<double> f(dims, 0.0);
    for (std::uint32_t i : r.matched)
      for (std::uint32_t x : w.pois[i].facets) f[x] += 1.0 / static_cast<double>(r.matched.size());
    cfac.push_back(f);
  }
  auto dist = [&](std::size_t row, std::size_t j) {
    const Poi& p = w.pois[pool[row]];
    double dot = 0, nn = 0;
    for (double v : cfac[j]) nn += v * v;
    for (std::uint32_t x : p.facets) dot += cfac[j][x];
    const double cos = nn > 0 ? dot / (std::sqrt(nn) * std::sqrt(static_cast<double>(p.facets.size()))) : 0.0;
    return std::max(1e-12, (1 - cos) + std::hypot(pos[row].x - cpos[j].x, pos[row].y - cpos[j].y) / L);
  };
  std::vector<double> u(pool.size() * k);
  for (int it = 0; it < 100; ++it) {
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double s = 0;
        for (std::size_t l = 0; l < k; ++l) s += std::pow(dist(i, j) / dist(i, l), 2.0);
        u[i * k + j] = 1.0 / s;
      }
    for (std::size_t j = 0; j < k; ++j) {
      double mass = 0;
      Vec2 p{0, 0};
      std::vector<double> f(dims, 0.0);
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const double um = u[i * k + j] * u[i * k + j];
        mass += um;
        p = p + um * pos[i];
        for (std::uint32_t x : w.pois[pool[i]].facets) f[x] += um;
      }
      cpos[j] = (1.0 / mass) * p;
      for (double& v : f) v /= mass;
      cfac[j] = f;
    }
  }
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j)
      if (u[i * k + j] > u[i * k + best]) best = j;
    owners.push_back(best);
  }
  return owners;
}

}  // namespace

TEST_CASE("two separated blobs: memberships follow ownership") {
  const World w = two_blobs(1);
  const FuzzyResult r = fuzzy_highlight(w.regions, w.pois, kView, w.feedback);
  CHECK(r.converged);
  CHECK(r.iterations <= 100);
  REQUIRE(r.pool.size() == w.pois.size());
  const auto ref = reference_owners(w, r.pool);
  for (std::size_t row = 0; row < r.pool.size(); ++row) {
    const std::size_t owner = r.pool[row] < 40 ? 0 : 1;
    CHECK(r.membership(row, owner) > 0.9);
    CHECK(ref[row] == owner);
  }
}

TEST_CASE("rows sum to one and the objective never drops") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    World w = two_blobs(seed, 15 + seed);
    // Overlap the blobs a little so iterations have work to do.
    w.regions[1].centroid = {-100, 30};
    const FuzzyResult r = fuzzy_highlight(w.regions, w.pois, kView, w.feedback);
    for (double e : r.row_sum_error) CHECK(e <= 1e-9);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) CHECK(r.objective_trace[i] >= r.objective_trace[i - 1]);
    CHECK(r.iterations <= 100);
  }
}

TEST_CASE("single region: every membership is one") {
  World w = two_blobs(2);
  w.regions.pop_back();
  const FuzzyResult r = fuzzy_highlight(w.regions, w.pois, kView, w.feedback);
  for (std::size_t row = 0; row < r.pool.size(); ++row) CHECK(r.membership(row, 0) == doctest::Approx(1.0));
  REQUIRE(r.highlights.size() == 1);
  CHECK(r.highlights[0].size() == 5);
}

TEST_CASE("relevance-only weights order highlights by relevance") {
  const World w = two_blobs(3);
  FuzzyOptions o;
  o.weights = {1, 0, 0};
  const FuzzyResult r = fuzzy_highlight(w.regions, w.pois, kView, w.feedback, o);
  for (std::size_t j = 0; j < r.highlights.size(); ++j) {
    const auto& h = r.highlights[j];
    REQUIRE(h.size() == 5);
    // The top five of the region's owned POIs by relevance.
    std::vector<std::uint32_t> owned;
    for (std::size_t row = 0; row < r.pool.size(); ++row) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < r.centroids.size(); ++c)
        if (r.membership(row, c) > r.membership(row, best)) best = c;
      if (best == j) owned.push_back(r.pool[row]);
    }
    const auto ranked = rank_by_relevance(owned, w.pois, w.feedback);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i].relevance == doctest::Approx(ranked[i].relevance));
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i - 1].relevance >= h[i].relevance);
  }
}

TEST_CASE("highlights are disjoint, within budget and drawn from matched sets") {
  World w = two_blobs(4);
  w.regions[1].matched.insert(w.regions[1].matched.end(), w.regions[0].matched.begin(), w.regions[0].matched.begin() + 10);
  w.regions[0].k_prime = 3;
  const FuzzyResult r = fuzzy_highlight(w.regions, w.pois, kView, w.feedback);
  std::vector<std::uint32_t> seen;
  for (std::size_t j = 0; j < w.regions.size(); ++j) {
    CHECK(r.highlights[j].size() <= w.regions[j].k_prime);
    for (const ScoredPoi& s : r.highlights[j]) {
      seen.push_back(s.poi);
      const auto& m = w.regions[j].matched;
      CHECK(std::find(m.begin(), m.end(), s.poi) != m.end());
    }
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("serial and parallel fuzzy agree") {
  const World w = two_blobs(5, 400);
  const FuzzyResult a = fuzzy_highlight(w.regions, w.pois, kView, w.feedback, {}, Exec::serial);
  const FuzzyResult b = fuzzy_highlight(w.regions, w.pois, kView, w.feedback, {}, Exec::parallel);
  CHECK(a.memberships == b.memberships);
  CHECK(a.objective_trace == b.objective_trace);
}

TEST_CASE("empty matched sets give empty highlights; bad options throw") {
  World w = two_blobs(6);
  for (FuzzyRegion& r : w.regions) r.matched.clear();
  const FuzzyResult r = fuzzy_highlight(w.regions, w.pois, kView, w.feedback);
  for (const auto& h : r.highlights) CHECK(h.empty());
  FuzzyOptions bad;
  bad.weights = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(fuzzy_highlight(two_blobs(7).regions, w.pois, kView, w.feedback, bad), ConfigError);
  bad = {};
  bad.fuzzifier = 1.0;
  CHECK_THROWS_AS(fuzzy_highlight(two_blobs(7).regions, w.pois, kView, w.feedback, bad), ConfigError);
}
