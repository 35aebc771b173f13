#include "roiscope/scenario.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "roiscope/rng.hpp"

namespace roiscope {

namespace {

constexpr std::array<const char*, 6> kTypes{"hotel", "restaurant", "museum", "cafe", "shop", "park"};

std::map<std::string, std::string> random_attributes(Rng& rng, const BinConfig& bins) {
  std::map<std::string, std::string> a;
  a["type"] = kTypes[rng.below(kTypes.size())];
  a["rooms"] = std::to_string(1 + rng.below(5));
  a["price"] = bins.label("price", std::exp(rng.normal(std::log(120.0), 0.7)));
  return a;
}

}  // namespace

BinConfig city_bins() {
  BinConfig b;
  b.edges["price"] = {50, 100, 200, 400};
  return b;
}

std::shared_ptr<const Dataset> synthetic_city(const WorldSpec& world, std::uint64_t seed) {
  Rng rng(seed);
  const BinConfig bins = city_bins();
  std::vector<Poi> pois;
  pois.reserve(world.background);
  std::size_t n = 0;
  auto make_id = [&n] { return "p" + std::to_string(n++); };

  for (std::size_t i = 0; i < world.background; ++i) {
    Poi p;
    p.id = make_id();
    p.location = {world.center.lat + rng.uniform(-world.half_lat, world.half_lat),
                  world.center.lon + rng.uniform(-world.half_lon, world.half_lon)};
    p.attributes = random_attributes(rng, bins);
    pois.push_back(std::move(p));
  }
  const double cos_lat = std::cos(world.center.lat * std::numbers::pi / 180.0);
  for (const PoiBlob& blob : world.blobs) {
    for (std::size_t i = 0; i < blob.count; ++i) {
      Poi p;
      p.id = make_id();
      p.location = {blob.center.lat + rng.normal(0.0, blob.sigma_deg),
                    blob.center.lon + rng.normal(0.0, blob.sigma_deg / cos_lat)};
      p.attributes = random_attributes(rng, bins);
      for (const auto& [k, v] : blob.attributes) p.attributes[k] = v;
      pois.push_back(std::move(p));
    }
  }
  return make_dataset(std::move(pois), {"type", "rooms", "price"}, bins);
}

std::vector<ScreenPoint> scripted_trace(std::span<const std::vector<TraceBlob>> segments, std::int64_t segment_ms,
                                        std::int64_t spacing_ms, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ScreenPoint> out;
  for (std::size_t j = 0; j < segments.size(); ++j) {
    std::int64_t t = static_cast<std::int64_t>(j) * segment_ms;
    const std::int64_t end = t + segment_ms;
    for (const TraceBlob& b : segments[j]) {
      for (std::size_t i = 0; i < b.points && t + spacing_ms <= end; ++i) {
        t += spacing_ms;
        // Whole pixels, as in recorded trace files.
        out.push_back({std::round(b.center.x + rng.normal(0.0, b.sigma)), std::round(b.center.y + rng.normal(0.0, b.sigma)), t});
      }
    }
  }
  return out;
}

Scenario overlap_scenario(std::uint64_t seed) {
  Scenario s;
  s.viewport = Viewport{48.8566, 2.3522, 0.0001};

  WorldSpec world;
  world.background = 20000;
  world.half_lon = 0.07;
  s.dataset = synthetic_city(world, seed);

  s.config.capture.strategy = SegmentStrategy::fixed_length;
  s.config.capture.segment_ms = 10000;

  const double sigma = 16.0;
  const std::vector<std::vector<TraceBlob>> script{
      {{{-200, 0}, sigma, 50}, {{200, 0}, sigma, 50}},
      {{{-170, -40}, sigma, 50}, {{230, -40}, sigma, 50}},
      {{{-230, 40}, sigma, 50}, {{170, 40}, sigma, 50}},
  };
  s.trace = scripted_trace(script, s.config.capture.segment_ms, s.config.capture.epsilon_ms, seed + 1);
  s.planted = {{-185, -20}, {-215, 20}, {215, -20}, {185, 20}};
  return s;
}

Scenario load_scenario(std::size_t pois, std::size_t points, std::uint64_t seed) {
  Scenario s;
  s.viewport = Viewport{48.8566, 2.3522, 0.0001};
  WorldSpec world;
  world.background = pois;
  s.dataset = synthetic_city(world, seed);

  // Ten segments; each dwells on two of twelve hotspots so that consecutive
  // visits to a hotspot produce overlapping clusters.
  constexpr std::size_t kSegments = 10;
  constexpr std::size_t kHotspots = 12;
  Rng rng(seed + 1);
  std::vector<Vec2> hotspots;
  for (std::size_t i = 0; i < kHotspots; ++i) hotspots.push_back({rng.uniform(-350, 350), rng.uniform(-250, 250)});

  const std::size_t per_segment = (points + kSegments - 1) / kSegments;
  s.config.capture.strategy = SegmentStrategy::fixed_length;
  s.config.capture.segment_ms = static_cast<std::int64_t>(per_segment) * s.config.capture.epsilon_ms;

  std::vector<std::vector<TraceBlob>> script;
  std::size_t left = points;
  for (std::size_t j = 0; j < kSegments && left > 0; ++j) {
    const std::size_t here = std::min(per_segment, left);
    left -= here;
    const std::size_t a = rng.below(kHotspots);
    std::size_t b = rng.below(kHotspots - 1);
    if (b >= a) ++b;
    script.push_back({{hotspots[a], 15.0, here / 2}, {hotspots[b], 15.0, here - here / 2}});
  }
  s.trace = scripted_trace(script, s.config.capture.segment_ms, s.config.capture.epsilon_ms, seed + 2);
  return s;
}

}  // namespace roiscope
