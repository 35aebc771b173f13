#include <doctest.h>

#include <cmath>

#include "roiscope/errors.hpp"
#include "roiscope/geo.hpp"
#include "roiscope/rng.hpp"

using namespace roiscope;

TEST_CASE("center maps to center") {
  const Viewport v{48.85, 2.35, 1.0};
  const GeoPoint g = project_to_geo({0, 0, 0}, v);
  CHECK(g.lat == 48.85);
  CHECK(g.lon == 2.35);
  const ScreenPoint s = project_to_screen({48.85, 2.35}, v);
  CHECK(s.x == 0.0);
  CHECK(s.y == 0.0);
}

TEST_CASE("equirectangular forward and inverse at 60 degrees") {
  const Viewport v{60, 0, 1};
  const GeoPoint g = project_to_geo({5, 1, 0}, v);
  CHECK(g.lat == doctest::Approx(61).epsilon(1e-12));
  CHECK(g.lon == doctest::Approx(10).epsilon(1e-12));
  const ScreenPoint s = project_to_screen({61, 10}, v);
  CHECK(s.x == doctest::Approx(5).epsilon(1e-12));
  CHECK(s.y == doctest::Approx(1).epsilon(1e-12));
  CHECK(s.t == 0);
}

TEST_CASE("origin is invariant under scaling") {
  const ScreenPoint s = project_to_screen({0, 0}, Viewport{0, 0, 0.01});
  CHECK(s.x == 0.0);
  CHECK(s.y == 0.0);
}

TEST_CASE("scale converts pixels to degrees") {
  const Viewport v{0, 0, 0.5};
  const GeoPoint g = project_to_geo({4, 2, 0}, v);
  CHECK(g.lat == doctest::Approx(1.0));
  CHECK(g.lon == doctest::Approx(2.0));
}

TEST_CASE("round trip within 1e-9 px over random points") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Viewport v{rng.uniform(-70, 70), rng.uniform(-170, 170), rng.uniform(1e-5, 1e-3)};
    const ScreenPoint m{rng.uniform(-1000, 1000), rng.uniform(-1000, 1000), 0};
    const ScreenPoint back = project_to_screen(project_to_geo(m, v), v);
    REQUIRE(std::abs(back.x - m.x) <= 1e-9);
    REQUIRE(std::abs(back.y - m.y) <= 1e-9);
  }
}

TEST_CASE("projection is monotone in both axes") {
  const Viewport v{45, 10, 0.001};
  double last_lat = -1e9, last_lon = -1e9;
  for (int k = -100; k <= 100; ++k) {
    const GeoPoint a = project_to_geo({0, static_cast<double>(k), 0}, v);
    const GeoPoint b = project_to_geo({static_cast<double>(k), 0, 0}, v);
    CHECK(a.lat > last_lat);
    CHECK(b.lon > last_lon);
    last_lat = a.lat;
    last_lon = b.lon;
  }
}

TEST_CASE("degenerate viewports are rejected") {
  CHECK_THROWS_AS(project_to_geo({0, 0, 0}, Viewport{90, 0, 1}), DegenerateViewport);
  CHECK_THROWS_AS(project_to_screen({0, 0}, Viewport{-90, 0, 1}), DegenerateViewport);
  CHECK_THROWS_AS(Viewport({0, 0, 0}).validate(), DegenerateViewport);
  CHECK_THROWS_AS(Viewport({0, 0, -1}).validate(), DegenerateViewport);
}

TEST_CASE("out-of-range results are clamped") {
  const GeoPoint g = project_to_geo({1000, 1000, 0}, Viewport{0, 0, 1});
  CHECK(g.lat == 90.0);
  CHECK(g.lon == 180.0);
  const GeoPoint h = project_to_geo({-1000, -1000, 0}, Viewport{0, 0, 1});
  CHECK(h.lat == -90.0);
  CHECK(h.lon == -180.0);
}

TEST_CASE("geo box containment is inclusive") {
  const GeoBox b{0, 0, 1, 1};
  CHECK(b.contains({0, 0}));
  CHECK(b.contains({1, 1}));
  CHECK_FALSE(b.contains({1.0000001, 0.5}));
  CHECK(b.intersects({1, 1, 2, 2}));
  CHECK_FALSE(b.intersects({1.1, 1.1, 2, 2}));
}
