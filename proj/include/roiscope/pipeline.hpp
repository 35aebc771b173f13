#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roiscope/capture.hpp"
#include "roiscope/dataset.hpp"
#include "roiscope/discover.hpp"
#include "roiscope/exec.hpp"
#include "roiscope/feedback.hpp"
#include "roiscope/fuzzy.hpp"
#include "roiscope/highlight.hpp"
#include "roiscope/matching.hpp"

namespace roiscope {

inline constexpr int kSchemaVersion = 1;

enum class AlgorithmPolicy {
  automatic,  ///< greedy below the confidence cutoff, fuzzy at or above it
  greedy,
  fuzzy,
};

std::string_view to_string(AlgorithmPolicy p);
AlgorithmPolicy algorithm_policy_from_string(std::string_view s);

// Every tunable of the capture -> discover -> highlight loop.
struct PipelineConfig {
  CaptureConfig capture;
  DiscoverConfig discover;
  double delta = 1.0;
  std::size_t k = 10;
  GreedyOptions greedy;
  FuzzyOptions fuzzy;
  PeculiarityMode peculiarity = PeculiarityMode::narrative;
  AlgorithmPolicy policy = AlgorithmPolicy::automatic;
  double policy_cutoff = 0.5;

  void validate() const;
  nlohmann::json to_json() const;
  // Fields missing from `j` keep their value from `base`.
  static PipelineConfig from_json(const nlohmann::json& j, const PipelineConfig& base);
  static PipelineConfig from_json(const nlohmann::json& j);
};

nlohmann::json to_json(const Viewport& v);
Viewport viewport_from_json(const nlohmann::json& j);

struct StageTimings {
  double capture_ms = 0.0;
  double discover_ms = 0.0;
  double match_ms = 0.0;
  double update_ms = 0.0;
  double highlight_ms = 0.0;
  double total_ms = 0.0;
};

struct RoiReport {
  Roi roi;
  MatchedSet matched;
  double peculiarity = 0.0;
  std::size_t k_prime = 0;
  std::vector<ScoredPoi> highlights;
};

struct AnalyzeResult {
  std::size_t segments = 0;
  std::size_t polygons = 0;
  double confidence = 0.0;
  HighlightAlgorithm algorithm = HighlightAlgorithm::greedy;
  std::size_t interactions = 0;  ///< interaction count after this call
  std::vector<RoiReport> rois;
  std::vector<std::string> warnings;
  StageTimings timings;
};

// One pass over all recorded points. Updates `feedback` and counts the
// interaction, except when nothing was recorded.
AnalyzeResult run_analysis(const Dataset& dataset, const Viewport& viewport, const PipelineConfig& config,
                           std::span<const ScreenPoint> recorded, FeedbackVector& feedback, Exec exec = Exec::parallel);

// Result document: ROIs as a GeoJSON FeatureCollection, highlights, feedback
// view. Timings are optional so documents can be compared byte for byte.
nlohmann::json to_json(const AnalyzeResult& result, const Dataset& dataset, const Viewport& viewport,
                       const FeedbackVector& feedback, bool include_timings);

nlohmann::json feedback_view(const FeedbackVector& feedback, const FacetSchema& schema);

}  // namespace roiscope
