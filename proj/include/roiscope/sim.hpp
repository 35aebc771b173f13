#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "roiscope/dataset.hpp"
#include "roiscope/pipeline.hpp"

namespace roiscope {

struct InterestRegion {
  GeoPoint center;
  double radius_m = 200.0;
  std::vector<std::string> preferred;  ///< facet labels, e.g. "type=hotel"
};

// Virtual explorer. Each iteration it dwells on one interest region (round
// robin), replacing a `noise_ratio` fraction of moves with uniform random
// positions over the screen, then asks for an analysis.
struct AgentProfile {
  std::vector<InterestRegion> regions;
  std::size_t moves_per_iteration = 60;
  double jitter_px = 12.0;
  double noise_ratio = 0.0;
  std::size_t iterations = 5;
  double screen_width = 800.0;
  double screen_height = 600.0;

  void validate() const;
  static AgentProfile from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct Percentiles {
  double p50 = 0.0;
  double p95 = 0.0;
};

// Nearest-rank percentiles of `samples`; both zero when empty.
Percentiles percentiles(std::vector<double> samples);

struct StageLatency {
  Percentiles capture, discover, match, update, highlight, total;
};

StageLatency summarize(const std::vector<StageTimings>& timings);

struct EvalReport {
  double precision = 0.0;   ///< highlights inside a region carrying one of its preferred facets
  double hit_ratio = 0.0;   ///< regions that received at least one highlight
  double diversity = 0.0;   ///< mean pairwise diversity of highlight sets
  std::size_t highlights = 0;
  std::size_t rois = 0;
  std::size_t iterations = 0;
  StageLatency latency;

  nlohmann::json to_json(bool include_latency = true) const;
};

// Deterministic for fixed inputs: the greedy wall-clock limit is replaced by
// a candidate-count limit before running.
EvalReport simulate(const AgentProfile& profile, const Dataset& dataset, const Viewport& viewport,
                    PipelineConfig config, std::uint64_t seed);

struct BenchRow {
  std::size_t pois = 0;
  std::size_t points = 0;
  std::size_t repetitions = 0;
  std::size_t rois = 0;
  StageLatency latency;
};

// Runs the full analysis `repetitions` times per (pois, points) pair on
// generated workloads. Throws ConfigError when repetitions is zero.
std::vector<BenchRow> bench(const std::vector<std::size_t>& poi_sizes, const std::vector<std::size_t>& point_sizes,
                            std::size_t repetitions, std::uint64_t seed);

nlohmann::json to_json(const StageLatency& l);

}  // namespace roiscope
