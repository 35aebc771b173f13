#include <doctest.h>

#include "roiscope/errors.hpp"
#include "roiscope/pipeline.hpp"
#include "roiscope/scenario.hpp"

using namespace roiscope;

namespace {

PipelineConfig deterministic(PipelineConfig c) {
  c.greedy.time_limit_ms = 0;
  return c;
}

// POIs only near the top-left of the map; the trace stays far away.
std::shared_ptr<const Dataset> ocean_world() {
  WorldSpec w;
  w.center = {48.8566 + 0.2, 2.3522 - 0.3};
  w.half_lat = 0.01;
  w.half_lon = 0.01;
  w.background = 500;
  return synthetic_city(w, 3);
}

}  // namespace

TEST_CASE("config JSON round trip and validation") {
  PipelineConfig c;
  c.capture.strategy = SegmentStrategy::drift;
  c.k = 4;
  c.fuzzy.weights = {0.6, 0.2, 0.2};
  c.policy = AlgorithmPolicy::fuzzy;
  c.peculiarity = PeculiarityMode::literal;
  c.greedy.guard = ScanGuard::literal;
  const PipelineConfig back = PipelineConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());

  const PipelineConfig partial = PipelineConfig::from_json({{"k", 3}}, c);
  CHECK(partial.k == 3);
  CHECK(partial.capture.strategy == SegmentStrategy::drift);

  CHECK_THROWS_AS(PipelineConfig::from_json({{"strategy", "spiral"}}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json({{"weights", {0.5, 0.5}}}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json({{"weights", {0.5, 0.5, 0.5}}}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json({{"k", "ten"}}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json({{"epsilon_ms", 0}}), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json({{"similarity_threshold", 2}}), ConfigError);
  CHECK_THROWS_AS(viewport_from_json({{"gamma", 90}, {"theta", 0}}), DegenerateViewport);
  CHECK_THROWS_AS(viewport_from_json({{"theta", 0}}), ConfigError);
}

TEST_CASE("no recorded points: warning and no interaction") {
  const Scenario s = overlap_scenario();
  FeedbackVector f(s.dataset->schema.size());
  const AnalyzeResult r = run_analysis(*s.dataset, s.viewport, s.config, {}, f);
  CHECK(r.rois.empty());
  CHECK(r.warnings.size() == 1);
  CHECK(f.interactions() == 0);
}

TEST_CASE("planted overlaps all get highlights") {
  const Scenario s = overlap_scenario();
  FeedbackVector f(s.dataset->schema.size());
  const AnalyzeResult r = run_analysis(*s.dataset, s.viewport, deterministic(s.config), s.trace, f);
  CHECK(r.segments == 3);
  CHECK(r.rois.size() >= 4);
  CHECK(r.algorithm == HighlightAlgorithm::greedy);
  for (const RoiReport& roi : r.rois) {
    CHECK_FALSE(roi.matched.pois.empty());
    CHECK_FALSE(roi.highlights.empty());
    CHECK(roi.highlights.size() <= roi.k_prime);
    for (const ScoredPoi& h : roi.highlights)
      CHECK(std::find(roi.matched.pois.begin(), roi.matched.pois.end(), h.poi) != roi.matched.pois.end());
  }
  CHECK(f.interactions() == 1);
  CHECK(f.nnz() > 0);
}

TEST_CASE("ocean trace: ROIs with empty matches and highlights") {
  const Scenario s = overlap_scenario();
  const auto ocean = ocean_world();
  FeedbackVector f(ocean->schema.size());
  const AnalyzeResult r = run_analysis(*ocean, s.viewport, deterministic(s.config), s.trace, f);
  CHECK(r.rois.size() >= 4);
  for (const RoiReport& roi : r.rois) {
    CHECK(roi.matched.pois.empty());
    CHECK(roi.highlights.empty());
  }
}

TEST_CASE("repeated analysis without new events") {
  const Scenario s = overlap_scenario();
  const auto ocean = ocean_world();
  FeedbackVector f(ocean->schema.size());
  const PipelineConfig c = deterministic(s.config);
  const AnalyzeResult a = run_analysis(*ocean, s.viewport, c, s.trace, f);
  const AnalyzeResult b = run_analysis(*ocean, s.viewport, c, s.trace, f);
  REQUIRE(a.rois.size() == b.rois.size());
  for (std::size_t i = 0; i < a.rois.size(); ++i) CHECK(a.rois[i].roi.polygon == b.rois[i].roi.polygon);
  CHECK(a.interactions == 1);
  CHECK(b.interactions == 2);
  CHECK(b.confidence <= a.confidence);

  // With matches, confidence (nnz / (xi T)) still never rises without new facets.
  FeedbackVector g(s.dataset->schema.size());
  double last = 2.0;
  for (int i = 0; i < 4; ++i) {
    run_analysis(*s.dataset, s.viewport, c, s.trace, g);
    const double now = confidence(g, c.discover.xi);
    if (i > 0) CHECK(now <= last);
    last = now;
  }
}

TEST_CASE("policy selection") {
  const Scenario s = overlap_scenario();
  PipelineConfig c = deterministic(s.config);
  c.policy = AlgorithmPolicy::fuzzy;
  FeedbackVector f(s.dataset->schema.size());
  const AnalyzeResult r = run_analysis(*s.dataset, s.viewport, c, s.trace, f);
  CHECK(r.algorithm == HighlightAlgorithm::fuzzy);
  std::size_t total = 0;
  for (const RoiReport& roi : r.rois) total += roi.highlights.size();
  CHECK(total > 0);

  // Saturated confidence switches the automatic policy to fuzzy.
  c.policy = AlgorithmPolicy::automatic;
  c.discover.xi = 1e-6;
  FeedbackVector g(s.dataset->schema.size());
  run_analysis(*s.dataset, s.viewport, c, s.trace, g);
  const AnalyzeResult second = run_analysis(*s.dataset, s.viewport, c, s.trace, g);
  CHECK(second.confidence == 1.0);
  CHECK(second.algorithm == HighlightAlgorithm::fuzzy);
}

TEST_CASE("result document layout") {
  const Scenario s = overlap_scenario();
  FeedbackVector f(s.dataset->schema.size());
  const AnalyzeResult r = run_analysis(*s.dataset, s.viewport, deterministic(s.config), s.trace, f);
  const auto doc = to_json(r, *s.dataset, s.viewport, f, false);
  CHECK(doc.at("schema_version") == kSchemaVersion);
  CHECK_FALSE(doc.contains("timings_ms"));
  CHECK(doc.at("rois").at("type") == "FeatureCollection");
  const auto& feature = doc.at("rois").at("features").at(0);
  CHECK(feature.at("geometry").at("type") == "Polygon");
  const auto& ring = feature.at("geometry").at("coordinates").at(0);
  CHECK(ring.front() == ring.back());
  CHECK(doc.at("highlights").size() == r.rois.size());
  const auto& poi = doc.at("highlights").at(0).at("pois").at(0);
  for (const char* key : {"id", "lat", "lon", "relevance", "algorithm"}) CHECK(poi.contains(key));
  CHECK(doc.at("feedback").at("interactions") == 1);
  CHECK(to_json(r, *s.dataset, s.viewport, f, true).contains("timings_ms"));
}

TEST_CASE("serial and parallel analyses produce the same document") {
  const Scenario s = load_scenario(5000, 2000, 4);
  const PipelineConfig c = deterministic(s.config);
  FeedbackVector f1(s.dataset->schema.size()), f2(s.dataset->schema.size());
  for (int i = 0; i < 2; ++i) {
    const auto a = run_analysis(*s.dataset, s.viewport, c, s.trace, f1, Exec::serial);
    const auto b = run_analysis(*s.dataset, s.viewport, c, s.trace, f2, Exec::parallel);
    CHECK(to_json(a, *s.dataset, s.viewport, f1, false).dump() == to_json(b, *s.dataset, s.viewport, f2, false).dump());
  }
}
