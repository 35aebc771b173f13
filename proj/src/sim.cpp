#include "roiscope/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "roiscope/capture.hpp"
#include "roiscope/errors.hpp"
#include "roiscope/highlight.hpp"
#include "roiscope/rng.hpp"
#include "roiscope/scenario.hpp"

namespace roiscope {

namespace {

constexpr double kMetersPerDegree = 111320.0;
constexpr std::size_t kSimulationCandidateLimit = 512;

double geo_distance_m(const GeoPoint& a, const GeoPoint& b) {
  const double k = std::cos((a.lat + b.lat) * 0.5 * std::numbers::pi / 180.0);
  const double dy = (a.lat - b.lat) * kMetersPerDegree;
  const double dx = (a.lon - b.lon) * kMetersPerDegree * k;
  return std::hypot(dx, dy);
}

}  // namespace

void AgentProfile::validate() const {
  if (regions.empty()) throw ConfigError("agent needs at least one interest region");
  if (!(noise_ratio >= 0.0 && noise_ratio <= 1.0)) throw ConfigError("noise_ratio must be in [0, 1]");
  if (jitter_px < 0.0) throw ConfigError("jitter_px must be >= 0");
  if (screen_width <= 0.0 || screen_height <= 0.0) throw ConfigError("screen size must be positive");
}

AgentProfile AgentProfile::from_json(const nlohmann::json& j) {
  AgentProfile p;
  for (const nlohmann::json& r : j.at("regions")) {
    InterestRegion region;
    region.center = {r.at("lat").get<double>(), r.at("lon").get<double>()};
    region.radius_m = r.value("radius_m", region.radius_m);
    region.preferred = r.value("preferred", std::vector<std::string>{});
    p.regions.push_back(std::move(region));
  }
  p.moves_per_iteration = j.value("moves_per_iteration", p.moves_per_iteration);
  p.jitter_px = j.value("jitter_px", p.jitter_px);
  p.noise_ratio = j.value("noise_ratio", p.noise_ratio);
  p.iterations = j.value("iterations", p.iterations);
  p.screen_width = j.value("screen_width", p.screen_width);
  p.screen_height = j.value("screen_height", p.screen_height);
  p.validate();
  return p;
}

nlohmann::json AgentProfile::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const InterestRegion& r : regions) {
    rs.push_back({{"lat", r.center.lat}, {"lon", r.center.lon}, {"radius_m", r.radius_m}, {"preferred", r.preferred}});
  }
  return {{"regions", rs},
          {"moves_per_iteration", moves_per_iteration},
          {"jitter_px", jitter_px},
          {"noise_ratio", noise_ratio},
          {"iterations", iterations},
          {"screen_width", screen_width},
          {"screen_height", screen_height}};
}

Percentiles percentiles(std::vector<double> samples) {
  if (samples.empty()) return {};
  std::sort(samples.begin(), samples.end());
  auto rank = [&](double q) {
    const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::clamp<std::size_t>(r, 1, samples.size()) - 1];
  };
  return {rank(0.50), rank(0.95)};
}

StageLatency summarize(const std::vector<StageTimings>& timings) {
  auto column = [&](double StageTimings::*field) {
    std::vector<double> v;
    v.reserve(timings.size());
    for (const StageTimings& t : timings) v.push_back(t.*field);
    return percentiles(std::move(v));
  };
  return {column(&StageTimings::capture_ms), column(&StageTimings::discover_ms), column(&StageTimings::match_ms),
          column(&StageTimings::update_ms),  column(&StageTimings::highlight_ms), column(&StageTimings::total_ms)};
}

nlohmann::json to_json(const StageLatency& l) {
  auto p = [](const Percentiles& x) { return nlohmann::json{{"p50", x.p50}, {"p95", x.p95}}; };
  return {{"capture", p(l.capture)},   {"discover", p(l.discover)},   {"match", p(l.match)},
          {"update", p(l.update)},     {"highlight", p(l.highlight)}, {"total", p(l.total)}};
}

nlohmann::json EvalReport::to_json(bool include_latency) const {
  nlohmann::json j{{"precision", precision}, {"hit_ratio", hit_ratio}, {"diversity", diversity},
                   {"highlights", highlights}, {"rois", rois},           {"iterations", iterations}};
  if (include_latency) j["latency_ms"] = roiscope::to_json(latency);
  return j;
}

EvalReport simulate(const AgentProfile& profile, const Dataset& dataset, const Viewport& viewport,
                    PipelineConfig config, std::uint64_t seed) {
  profile.validate();
  config.greedy.time_limit_ms = 0.0;
  if (config.greedy.max_candidates == 0) config.greedy.max_candidates = kSimulationCandidateLimit;
  config.validate();

  // Preferred facets resolved once per region; unknown labels are ignored.
  std::vector<std::vector<std::uint32_t>> preferred(profile.regions.size());
  for (std::size_t r = 0; r < profile.regions.size(); ++r) {
    for (const std::string& label : profile.regions[r].preferred) {
      if (auto f = dataset.schema.find_label(label)) preferred[r].push_back(*f);
    }
    std::sort(preferred[r].begin(), preferred[r].end());
  }
  auto good_for = [&](const Poi& poi, std::size_t r) {
    if (geo_distance_m(poi.location, profile.regions[r].center) > profile.regions[r].radius_m) return false;
    return std::any_of(preferred[r].begin(), preferred[r].end(),
                       [&](std::uint32_t f) { return std::binary_search(poi.facets.begin(), poi.facets.end(), f); });
  };
  auto inside = [&](const Poi& poi, std::size_t r) {
    return geo_distance_m(poi.location, profile.regions[r].center) <= profile.regions[r].radius_m;
  };

  Rng rng(seed);
  FeedbackVector feedback(dataset.schema.size());
  EvalReport report;
  std::vector<StageTimings> timings;
  std::vector<bool> hit(profile.regions.size(), false);
  std::size_t precise = 0;
  double diversity_sum = 0.0;
  std::size_t diversity_sets = 0;
  std::int64_t clock = 0;

  for (std::size_t it = 0; it < profile.iterations; ++it) {
    const InterestRegion& target = profile.regions[it % profile.regions.size()];
    const ScreenPoint c = project_to_screen(target.center, viewport);
    Recorder recorder(config.capture.epsilon_ms);
    for (std::size_t m = 0; m < profile.moves_per_iteration; ++m) {
      clock += config.capture.epsilon_ms;
      ScreenPoint p{0, 0, clock};
      if (rng.uniform() < profile.noise_ratio) {
        p.x = rng.uniform(-0.5, 0.5) * profile.screen_width;
        p.y = rng.uniform(-0.5, 0.5) * profile.screen_height;
      } else {
        p.x = c.x + rng.normal(0.0, profile.jitter_px);
        p.y = c.y + rng.normal(0.0, profile.jitter_px);
      }
      recorder.record(p);
    }

    const AnalyzeResult result = run_analysis(dataset, viewport, config, recorder.points(), feedback, Exec::parallel);
    timings.push_back(result.timings);
    report.rois += result.rois.size();
    for (const RoiReport& roi : result.rois) {
      std::vector<std::uint32_t> ids;
      for (const ScoredPoi& h : roi.highlights) {
        ids.push_back(h.poi);
        const Poi& poi = dataset.pois[h.poi];
        bool good = false;
        for (std::size_t r = 0; r < profile.regions.size(); ++r) {
          if (inside(poi, r)) hit[r] = true;
          good = good || good_for(poi, r);
        }
        precise += good ? 1 : 0;
        ++report.highlights;
      }
      if (ids.size() >= 2) {
        diversity_sum += pairwise_diversity(ids, dataset.pois);
        ++diversity_sets;
      }
    }
  }

  report.iterations = profile.iterations;
  report.precision = report.highlights ? static_cast<double>(precise) / static_cast<double>(report.highlights) : 0.0;
  report.hit_ratio = static_cast<double>(std::count(hit.begin(), hit.end(), true)) / static_cast<double>(hit.size());
  report.diversity = diversity_sets ? diversity_sum / static_cast<double>(diversity_sets) : 0.0;
  report.latency = summarize(timings);
  return report;
}

std::vector<BenchRow> bench(const std::vector<std::size_t>& poi_sizes, const std::vector<std::size_t>& point_sizes,
                            std::size_t repetitions, std::uint64_t seed) {
  if (repetitions == 0) throw ConfigError("repetitions must be at least 1");
  if (poi_sizes.empty() || point_sizes.empty()) throw ConfigError("bench needs at least one dataset and trace size");
  std::vector<BenchRow> rows;
  for (std::size_t pois : poi_sizes) {
    for (std::size_t points : point_sizes) {
      const Scenario s = load_scenario(pois, points, seed);
      PipelineConfig config = s.config;
      config.greedy.time_limit_ms = 0.0;
      config.greedy.max_candidates = kSimulationCandidateLimit;
      std::vector<StageTimings> timings;
      BenchRow row{pois, points, repetitions, 0, {}};
      for (std::size_t r = 0; r < repetitions; ++r) {
        FeedbackVector feedback(s.dataset->schema.size());
        const AnalyzeResult result = run_analysis(*s.dataset, s.viewport, config, s.trace, feedback, Exec::parallel);
        timings.push_back(result.timings);
        row.rois = result.rois.size();
      }
      row.latency = summarize(timings);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace roiscope
