#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "roiscope/dataset.hpp"
#include "roiscope/geometry.hpp"
#include "roiscope/pipeline.hpp"

namespace roiscope {

// Synthetic city generator. Background POIs are uniform over a lat/lon box;
// blobs add Gaussian clusters whose attributes may be pinned.
struct PoiBlob {
  GeoPoint center;
  double sigma_deg = 0.001;
  std::size_t count = 100;
  std::map<std::string, std::string> attributes;  ///< overrides for every POI of the blob
};

struct WorldSpec {
  GeoPoint center{48.8566, 2.3522};
  double half_lat = 0.03;
  double half_lon = 0.045;
  std::size_t background = 5000;
  std::vector<PoiBlob> blobs;
};

// Attributes "type", "rooms" and a binned "price".
BinConfig city_bins();
std::shared_ptr<const Dataset> synthetic_city(const WorldSpec& world, std::uint64_t seed);

// Mouse dwell around a screen point.
struct TraceBlob {
  Vec2 center;
  double sigma = 10.0;
  std::size_t points = 50;
};

// Segment j's points fall in (j * segment_ms, (j + 1) * segment_ms], spaced
// `spacing_ms` apart, so fixed-length segmentation recovers the script.
std::vector<ScreenPoint> scripted_trace(std::span<const std::vector<TraceBlob>> segments, std::int64_t segment_ms,
                                        std::int64_t spacing_ms, std::uint64_t seed);

struct Scenario {
  std::shared_ptr<const Dataset> dataset;
  Viewport viewport;
  PipelineConfig config;
  std::vector<ScreenPoint> trace;
  std::vector<Vec2> planted;  ///< pixel centers of the intended ROIs
};

// Three segments of two dwell blobs each. Segments 2 and 3 are shifted so
// each of their blobs overlaps one blob of segment 1 and nothing else: four
// planted overlaps over a Paris-like POI set.
Scenario overlap_scenario(std::uint64_t seed = 1);

// Latency workload: `pois` uniform POIs and a trace of `points` accepted
// samples dwelling on a rotating set of hotspots.
Scenario load_scenario(std::size_t pois, std::size_t points, std::uint64_t seed);

}  // namespace roiscope
