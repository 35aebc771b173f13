#include "roiscope/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "roiscope/errors.hpp"

namespace roiscope {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

std::string_view to_string(ScanGuard g) { return g == ScanGuard::literal ? "literal" : "relevance_floor"; }

}  // namespace

std::string_view to_string(AlgorithmPolicy p) {
  switch (p) {
    case AlgorithmPolicy::greedy: return "greedy";
    case AlgorithmPolicy::fuzzy: return "fuzzy";
    case AlgorithmPolicy::automatic: break;
  }
  return "auto";
}

AlgorithmPolicy algorithm_policy_from_string(std::string_view s) {
  if (s == "auto") return AlgorithmPolicy::automatic;
  if (s == "greedy") return AlgorithmPolicy::greedy;
  if (s == "fuzzy") return AlgorithmPolicy::fuzzy;
  throw ConfigError("unknown algorithm policy '" + std::string(s) + "'");
}

void PipelineConfig::validate() const {
  capture.validate();
  if (!(discover.dbscan.eps > 0.0) || discover.dbscan.min_pts < 1) throw ConfigError("invalid clustering parameters");
  if (!(discover.xi > 0.0)) throw ConfigError("xi must be positive");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (greedy.similarity_threshold < 0.0 || greedy.similarity_threshold > 1.0) {
    throw ConfigError("similarity threshold must lie in [0, 1]");
  }
  const FuzzyWeights& w = fuzzy.weights;
  if (w.relevance < 0 || w.cohesiveness < 0 || w.representativeness < 0 ||
      std::abs(w.relevance + w.cohesiveness + w.representativeness - 1.0) > 1e-9) {
    throw ConfigError("fuzzy weights must be non-negative and sum to 1");
  }
  if (!(fuzzy.fuzzifier > 1.0) || fuzzy.max_iters == 0) throw ConfigError("invalid fuzzy options");
}

nlohmann::json PipelineConfig::to_json() const {
  return {
      {"epsilon_ms", capture.epsilon_ms},
      {"strategy", std::string(to_string(capture.strategy))},
      {"segment_ms", capture.segment_ms},
      {"idle_ms", capture.idle_ms},
      {"idle_radius", capture.idle_radius},
      {"drift_levels", capture.drift_levels},
      {"drift_window", capture.drift_window},
      {"drift_persistence", capture.drift_persistence},
      {"dbscan_eps", discover.dbscan.eps},
      {"min_pts", discover.dbscan.min_pts},
      {"xi", discover.xi},
      {"merge_tolerance", discover.merge_tolerance},
      {"delta", delta},
      {"k", k},
      {"similarity_threshold", greedy.similarity_threshold},
      {"time_limit_ms", greedy.time_limit_ms},
      {"max_candidates", greedy.max_candidates},
      {"scan_guard", std::string(to_string(greedy.guard))},
      {"weights", {fuzzy.weights.relevance, fuzzy.weights.cohesiveness, fuzzy.weights.representativeness}},
      {"fuzzifier", fuzzy.fuzzifier},
      {"fuzzy_tolerance", fuzzy.tolerance},
      {"fuzzy_max_iters", fuzzy.max_iters},
      {"peculiarity_mode", std::string(to_string(peculiarity))},
      {"algorithm", std::string(to_string(policy))},
      {"policy_cutoff", policy_cutoff},
  };
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) { return from_json(j, PipelineConfig{}); }

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const PipelineConfig& base) {
  PipelineConfig c = base;
  if (j.is_null()) return c;
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  try {
    read(j, "epsilon_ms", c.capture.epsilon_ms);
    if (j.contains("strategy")) c.capture.strategy = segment_strategy_from_string(j.at("strategy").get<std::string>());
    read(j, "segment_ms", c.capture.segment_ms);
    read(j, "idle_ms", c.capture.idle_ms);
    read(j, "idle_radius", c.capture.idle_radius);
    read(j, "drift_levels", c.capture.drift_levels);
    read(j, "drift_window", c.capture.drift_window);
    read(j, "drift_persistence", c.capture.drift_persistence);
    read(j, "dbscan_eps", c.discover.dbscan.eps);
    read(j, "min_pts", c.discover.dbscan.min_pts);
    read(j, "xi", c.discover.xi);
    read(j, "merge_tolerance", c.discover.merge_tolerance);
    read(j, "delta", c.delta);
    read(j, "k", c.k);
    read(j, "similarity_threshold", c.greedy.similarity_threshold);
    read(j, "time_limit_ms", c.greedy.time_limit_ms);
    read(j, "max_candidates", c.greedy.max_candidates);
    if (j.contains("scan_guard")) {
      const std::string g = j.at("scan_guard").get<std::string>();
      if (g == "literal") {
        c.greedy.guard = ScanGuard::literal;
      } else if (g == "relevance_floor") {
        c.greedy.guard = ScanGuard::relevance_floor;
      } else {
        throw ConfigError("unknown scan guard '" + g + "'");
      }
    }
    if (j.contains("weights")) {
      const auto w = j.at("weights").get<std::vector<double>>();
      if (w.size() != 3) throw ConfigError("weights must have three entries");
      c.fuzzy.weights = {w[0], w[1], w[2]};
    }
    read(j, "fuzzifier", c.fuzzy.fuzzifier);
    read(j, "fuzzy_tolerance", c.fuzzy.tolerance);
    read(j, "fuzzy_max_iters", c.fuzzy.max_iters);
    if (j.contains("peculiarity_mode")) {
      c.peculiarity = peculiarity_mode_from_string(j.at("peculiarity_mode").get<std::string>());
    }
    if (j.contains("algorithm")) c.policy = algorithm_policy_from_string(j.at("algorithm").get<std::string>());
    read(j, "policy_cutoff", c.policy_cutoff);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const Viewport& v) { return {{"gamma", v.gamma}, {"theta", v.theta}, {"scale", v.scale}}; }

Viewport viewport_from_json(const nlohmann::json& j) {
  Viewport v;
  try {
    v.gamma = j.at("gamma").get<double>();
    v.theta = j.at("theta").get<double>();
    if (j.contains("scale")) v.scale = j.at("scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad viewport: ") + e.what());
  }
  v.validate();
  return v;
}

AnalyzeResult run_analysis(const Dataset& dataset, const Viewport& viewport, const PipelineConfig& config,
                           std::span<const ScreenPoint> recorded, FeedbackVector& feedback, Exec exec) {
  const auto started = Clock::now();
  AnalyzeResult result;
  result.interactions = feedback.interactions();
  if (recorded.empty()) {
    result.warnings.emplace_back("no recorded points; nothing to analyze");
    result.timings.total_ms = ms_since(started);
    return result;
  }

  auto stage = Clock::now();
  const std::vector<Segment> segments = segment_stream(recorded, config.capture);
  result.segments = segments.size();
  result.timings.capture_ms = ms_since(stage);

  stage = Clock::now();
  DiscoverResult discovered = discover_rois(segments, feedback, config.discover, exec);
  result.confidence = discovered.confidence;
  result.polygons = discovered.polygons.size();
  result.timings.discover_ms = ms_since(stage);

  stage = Clock::now();
  result.rois.reserve(discovered.rois.size());
  for (Roi& roi : discovered.rois) {
    RoiReport report;
    report.matched.roi_id = roi.id;
    report.matched.pois = match_points(roi.polygon, dataset.index, dataset.pois, viewport, exec);
    report.matched.facets = facet_vector(report.matched.pois, dataset.pois, dataset.schema.size());
    report.roi = std::move(roi);
    result.rois.push_back(std::move(report));
  }
  result.timings.match_ms = ms_since(stage);

  stage = Clock::now();
  for (const RoiReport& r : result.rois) feedback.update(r.matched.pois, dataset.pois, config.delta);
  result.timings.update_ms = ms_since(stage);

  stage = Clock::now();
  const std::vector<double> normalized = feedback.normalized();
  for (RoiReport& r : result.rois) {
    r.peculiarity = peculiarity(normalized, r.matched.facets, config.peculiarity);
    r.k_prime = r.matched.pois.empty() ? 0 : highlight_budget(config.k, r.peculiarity, true);
  }
  switch (config.policy) {
    case AlgorithmPolicy::greedy: result.algorithm = HighlightAlgorithm::greedy; break;
    case AlgorithmPolicy::fuzzy: result.algorithm = HighlightAlgorithm::fuzzy; break;
    case AlgorithmPolicy::automatic:
      result.algorithm = result.confidence < config.policy_cutoff ? HighlightAlgorithm::greedy : HighlightAlgorithm::fuzzy;
      break;
  }
  const bool any_matched =
      std::any_of(result.rois.begin(), result.rois.end(), [](const RoiReport& r) { return !r.matched.pois.empty(); });
  if (result.algorithm == HighlightAlgorithm::greedy) {
    for (RoiReport& r : result.rois) {
      r.highlights = greedy_highlight(r.matched.pois, dataset.pois, normalized, r.k_prime, config.greedy).selection;
    }
  } else if (any_matched) {
    std::vector<FuzzyRegion> regions;
    for (const RoiReport& r : result.rois) regions.push_back({r.roi.polygon.centroid(), r.matched.pois, r.k_prime});
    FuzzyResult fuzzy = fuzzy_highlight(regions, dataset.pois, viewport, normalized, config.fuzzy, exec);
    for (std::size_t i = 0; i < result.rois.size(); ++i) result.rois[i].highlights = std::move(fuzzy.highlights[i]);
  }
  result.timings.highlight_ms = ms_since(stage);

  feedback.count_interaction();
  result.interactions = feedback.interactions();
  result.timings.total_ms = ms_since(started);
  return result;
}

nlohmann::json feedback_view(const FeedbackVector& feedback, const FacetSchema& schema) {
  return {{"interactions", feedback.interactions()},
          {"nnz", feedback.nnz()},
          {"raw", feedback.to_json(schema, false)},
          {"normalized", feedback.to_json(schema, true)}};
}

nlohmann::json to_json(const AnalyzeResult& result, const Dataset& dataset, const Viewport& viewport,
                       const FeedbackVector& feedback, bool include_timings) {
  nlohmann::json features = nlohmann::json::array();
  nlohmann::json highlights = nlohmann::json::array();
  for (const RoiReport& r : result.rois) {
    nlohmann::json ring = nlohmann::json::array();
    nlohmann::json pixels = nlohmann::json::array();
    for (const Vec2& v : r.roi.polygon.vertices()) {
      const GeoPoint g = project_to_geo({v.x, v.y, 0}, viewport);
      ring.push_back({g.lon, g.lat});
      pixels.push_back({v.x, v.y});
    }
    if (!ring.empty()) ring.push_back(ring.front());
    features.push_back({
        {"type", "Feature"},
        {"id", r.roi.id},
        {"geometry", {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}}},
        {"properties",
         {{"roi", r.roi.id},
          {"source", {r.roi.source.first, r.roi.source.second}},
          {"area_px", r.roi.area},
          {"pixel_vertices", pixels},
          {"matched", r.matched.pois.size()},
          {"peculiarity", r.peculiarity},
          {"k_prime", r.k_prime}}},
    });

    nlohmann::json list = nlohmann::json::array();
    for (const ScoredPoi& s : r.highlights) {
      const Poi& p = dataset.pois[s.poi];
      list.push_back({{"id", p.id},
                      {"lat", p.location.lat},
                      {"lon", p.location.lon},
                      {"relevance", s.relevance},
                      {"contribution", s.contribution},
                      {"algorithm", std::string(to_string(result.algorithm))}});
    }
    highlights.push_back({{"roi", r.roi.id}, {"algorithm", std::string(to_string(result.algorithm))}, {"pois", list}});
  }

  nlohmann::json doc = {
      {"schema_version", kSchemaVersion},
      {"interactions", result.interactions},
      {"segments", result.segments},
      {"polygons", result.polygons},
      {"confidence", result.confidence},
      {"algorithm", std::string(to_string(result.algorithm))},
      {"rois", {{"type", "FeatureCollection"}, {"features", features}}},
      {"highlights", highlights},
      {"feedback", feedback_view(feedback, dataset.schema)},
      {"warnings", result.warnings},
  };
  if (include_timings) {
    doc["timings_ms"] = {{"capture", result.timings.capture_ms},     {"discover", result.timings.discover_ms},
                         {"match", result.timings.match_ms},         {"update", result.timings.update_ms},
                         {"highlight", result.timings.highlight_ms}, {"total", result.timings.total_ms}};
  }
  return doc;
}

}  // namespace roiscope
