#include <doctest.h>

#include "roiscope/errors.hpp"
#include "roiscope/scenario.hpp"
#include "roiscope/sim.hpp"

using namespace roiscope;

namespace {

struct World {
  std::shared_ptr<const Dataset> dataset;
  Viewport viewport;
  AgentProfile profile;
};

// One hotel-only blob the agent cares about, inside a mixed city.
World hotel_world() {
  WorldSpec w;
  w.background = 3000;
  PoiBlob blob;
  blob.center = {w.center.lat + 0.005, w.center.lon - 0.008};
  blob.sigma_deg = 0.001;
  blob.count = 300;
  blob.attributes = {{"type", "hotel"}};
  w.blobs.push_back(blob);

  World out;
  out.dataset = synthetic_city(w, 11);
  out.viewport = {w.center.lat, w.center.lon, 1e-4};
  InterestRegion r;
  r.center = blob.center;
  r.radius_m = 250;
  r.preferred = {"type=hotel"};
  out.profile.regions = {r};
  out.profile.iterations = 6;
  return out;
}

}  // namespace

TEST_CASE("focused agent finds its region every time") {
  const World w = hotel_world();
  const EvalReport rep = simulate(w.profile, *w.dataset, w.viewport, PipelineConfig{}, 5);
  CHECK(rep.iterations == 6);
  CHECK(rep.hit_ratio == 1.0);
  CHECK(rep.precision > 0.5);
  CHECK(rep.highlights > 0);
}

TEST_CASE("noise never improves precision") {
  World w = hotel_world();
  const EvalReport clean = simulate(w.profile, *w.dataset, w.viewport, PipelineConfig{}, 5);
  w.profile.noise_ratio = 1.0;
  const EvalReport noisy = simulate(w.profile, *w.dataset, w.viewport, PipelineConfig{}, 5);
  CHECK(noisy.precision <= clean.precision);
}

TEST_CASE("simulation is reproducible per seed") {
  World w = hotel_world();
  w.profile.noise_ratio = 0.3;
  const auto a = simulate(w.profile, *w.dataset, w.viewport, PipelineConfig{}, 9).to_json(false);
  const auto b = simulate(w.profile, *w.dataset, w.viewport, PipelineConfig{}, 9).to_json(false);
  CHECK(a == b);
}

TEST_CASE("agent profile validation and JSON") {
  AgentProfile p = hotel_world().profile;
  CHECK(AgentProfile::from_json(p.to_json()).to_json() == p.to_json());
  p.noise_ratio = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_THROWS_AS(AgentProfile::from_json({{"regions", nlohmann::json::array()}}), ConfigError);
}

TEST_CASE("percentiles use nearest rank") {
  const Percentiles p = percentiles({5, 1, 4, 2, 3, 6, 7, 8, 9, 10});
  CHECK(p.p50 == 5);
  CHECK(p.p95 == 10);
  CHECK(percentiles({}).p95 == 0);
}

TEST_CASE("bench covers every stage and rejects zero repetitions") {
  CHECK_THROWS_AS(bench({1000}, {500}, 0, 1), ConfigError);
  const auto rows = bench({2000}, {1000}, 2, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].repetitions == 2);
  CHECK(rows[0].rois > 0);
  const auto j = to_json(rows[0].latency);
  for (const char* stage : {"capture", "discover", "match", "update", "highlight", "total"}) CHECK(j.contains(stage));
  CHECK(rows[0].latency.total.p95 >= rows[0].latency.match.p95);
}
