#include "roiscope/capture.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "roiscope/errors.hpp"

namespace roiscope {

std::string_view to_string(SegmentStrategy s) {
  switch (s) {
    case SegmentStrategy::fixed_length: return "fixed";
    case SegmentStrategy::idle: return "idle";
    case SegmentStrategy::drift: return "drift";
  }
  return "fixed";
}

SegmentStrategy segment_strategy_from_string(std::string_view s) {
  if (s == "fixed" || s == "psi1") return SegmentStrategy::fixed_length;
  if (s == "idle" || s == "psi2") return SegmentStrategy::idle;
  if (s == "drift" || s == "psi3") return SegmentStrategy::drift;
  throw ConfigError("unknown segmentation strategy '" + std::string(s) + "'");
}

void CaptureConfig::validate() const {
  if (epsilon_ms <= 0) throw ConfigError("epsilon must be positive");
  if (segment_ms <= 0 || idle_ms <= 0) throw ConfigError("segment durations must be positive");
  if (idle_radius < 0.0) throw ConfigError("idle radius must be non-negative");
  if (drift_levels.empty()) throw ConfigError("drift levels must not be empty");
  for (std::size_t i = 1; i < drift_levels.size(); ++i) {
    if (!(drift_levels[i] > drift_levels[i - 1])) throw ConfigError("drift levels must be strictly increasing");
  }
  if (drift_window < 2) throw ConfigError("drift window must hold at least 2 points");
  if (drift_persistence < 1) throw ConfigError("drift persistence must be at least 1");
}

Recorder::Recorder(std::int64_t epsilon_ms) : epsilon_ms_(epsilon_ms) {
  if (epsilon_ms_ <= 0) throw ConfigError("epsilon must be positive");
}

bool Recorder::record(const ScreenPoint& raw) {
  if (raw.t < 0) throw OrderingError("negative timestamp " + std::to_string(raw.t));
  if (points_.empty()) {
    points_.push_back(raw);
    return true;
  }
  const std::int64_t last = points_.back().t;
  if (raw.t < last) {
    throw OrderingError("timestamp " + std::to_string(raw.t) + " precedes last recorded " + std::to_string(last));
  }
  if (raw.t - last < epsilon_ms_) return false;
  points_.push_back(raw);
  return true;
}

void Recorder::clear() { points_.clear(); }

std::size_t drift_level(double displacement, std::span<const double> levels) {
  return static_cast<std::size_t>(std::count_if(levels.begin(), levels.end(), [&](double r) { return r < displacement; }));
}

double window_displacement(std::span<const ScreenPoint> window) {
  double best = 0.0;
  if (window.empty()) return best;
  const ScreenPoint& first = window.front();
  for (const ScreenPoint& p : window.subspan(1)) {
    best = std::max(best, std::hypot(p.x - first.x, p.y - first.y));
  }
  return best;
}

Segmenter::Segmenter(CaptureConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void Segmenter::close_through(std::size_t last_index) {
  Segment seg;
  seg.index = next_index_++;
  seg.points.assign(open_.begin(), open_.begin() + static_cast<std::ptrdiff_t>(last_index + 1));
  open_.erase(open_.begin(), open_.begin() + static_cast<std::ptrdiff_t>(last_index + 1));
  closed_.push_back(std::move(seg));
}

void Segmenter::push(const ScreenPoint& m) {
  if (!open_.empty() && m.t < open_.back().t) {
    throw OrderingError("segmenter input must be time ordered");
  }
  switch (cfg_.strategy) {
    case SegmentStrategy::fixed_length: push_fixed(m); break;
    case SegmentStrategy::idle: push_idle(m); break;
    case SegmentStrategy::drift: push_drift(m); break;
  }
}

// Segment j covers (j*L, (j+1)*L]; the first one also owns t = 0.
void Segmenter::push_fixed(const ScreenPoint& m) {
  const std::int64_t bucket = m.t <= 0 ? 0 : (m.t - 1) / cfg_.segment_ms;
  if (!open_.empty() && bucket != bucket_) close_through(open_.size() - 1);
  bucket_ = bucket;
  open_.push_back(m);
}

// A stationary run is the set of consecutive points within idle_radius of the
// run's first point. The pointer is considered resting until the first point
// that leaves the radius arrives, so the run lasted until that point's time.
void Segmenter::push_idle(const ScreenPoint& m) {
  if (anchor_ && std::hypot(m.x - anchor_->x, m.y - anchor_->y) <= cfg_.idle_radius) {
    open_.push_back(m);
    return;
  }
  if (anchor_ && !open_.empty() && m.t - anchor_->t >= cfg_.idle_ms) {
    close_through(open_.size() - 1);
  }
  anchor_ = m;
  open_.push_back(m);
}

void Segmenter::push_drift(const ScreenPoint& m) {
  open_.push_back(m);
  window_.push_back(m);
  if (window_.size() > cfg_.drift_window) window_.pop_front();
  if (window_.size() < cfg_.drift_window) return;

  const std::vector<ScreenPoint> win(window_.begin(), window_.end());
  const std::size_t level = drift_level(window_displacement(win), cfg_.drift_levels);
  if (!level_) {
    level_ = level;
    return;
  }
  if (level == *level_) {
    pending_level_.reset();
    pending_count_ = 0;
    return;
  }
  if (pending_level_ != level) {
    pending_level_ = level;
    pending_count_ = 1;
    pending_pos_ = open_.size() - 1;
  } else {
    ++pending_count_;
  }
  if (pending_count_ >= cfg_.drift_persistence) {
    close_through(pending_pos_);
    level_ = level;
    pending_level_.reset();
    pending_count_ = 0;
  }
}

std::vector<Segment> Segmenter::take_closed() { return std::exchange(closed_, {}); }

std::vector<Segment> Segmenter::finish() {
  if (!open_.empty()) close_through(open_.size() - 1);
  return take_closed();
}

std::vector<Segment> segment_stream(std::span<const ScreenPoint> points, const CaptureConfig& cfg) {
  Segmenter segmenter(cfg);
  for (const ScreenPoint& p : points) segmenter.push(p);
  return segmenter.finish();
}

std::vector<ScreenPoint> read_trace(std::istream& in) {
  std::vector<ScreenPoint> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ScreenPoint p{j.at("x").get<double>(), j.at("y").get<double>(), j.at("t").get<std::int64_t>()};
      if (!out.empty() && p.t < out.back().t) {
        throw OrderingError("trace line " + std::to_string(lineno) + ": timestamps must be sorted");
      }
      out.push_back(p);
    } catch (const nlohmann::json::exception& e) {
      throw Error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_trace(std::ostream& out, std::span<const ScreenPoint> points) {
  for (const ScreenPoint& p : points) {
    nlohmann::json j;
    j["x"] = std::llround(p.x);
    j["y"] = std::llround(p.y);
    j["t"] = p.t;
    out << j.dump() << '\n';
  }
}

}  // namespace roiscope
