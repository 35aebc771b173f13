#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "roiscope/geo.hpp"

namespace roiscope {

enum class SegmentStrategy {
  fixed_length,  ///< cut every `segment_ms` of session time
  idle,          ///< cut after the pointer rested for `idle_ms`
  drift,         ///< cut when the windowed displacement changes ring level
};

std::string_view to_string(SegmentStrategy s);
SegmentStrategy segment_strategy_from_string(std::string_view s);

struct CaptureConfig {
  std::int64_t epsilon_ms = 100;
  SegmentStrategy strategy = SegmentStrategy::fixed_length;

  std::int64_t segment_ms = 1000;

  std::int64_t idle_ms = 500;
  double idle_radius = 3.0;

  // Ring radii in pixels, strictly increasing.
  std::vector<double> drift_levels = {5.0, 50.0, 500.0};
  std::size_t drift_window = 10;
  std::size_t drift_persistence = 3;

  void validate() const;
};

struct Segment {
  std::size_t index = 0;  ///< 1-based ordinal
  std::vector<ScreenPoint> points;
};

// Throttles raw pointer events: a point is kept only if at least epsilon ms
// passed since the previously kept one.
class Recorder {
public:
  explicit Recorder(std::int64_t epsilon_ms = 100);

  // Returns whether the point was kept. Throws OrderingError when the
  // timestamp precedes the last kept point.
  bool record(const ScreenPoint& raw);

  const std::vector<ScreenPoint>& points() const { return points_; }
  std::int64_t epsilon_ms() const { return epsilon_ms_; }
  void clear();

private:
  std::int64_t epsilon_ms_;
  std::vector<ScreenPoint> points_;
};

// Ring level of a displacement: the number of ring radii strictly below it.
std::size_t drift_level(double displacement, std::span<const double> levels);

// Largest distance between the first point of the window and any other.
double window_displacement(std::span<const ScreenPoint> window);

// Online segmentation. Points are pushed in time order; segments become
// available once the strategy closes them. finish() flushes the open one.
class Segmenter {
public:
  explicit Segmenter(CaptureConfig cfg);

  void push(const ScreenPoint& m);
  std::vector<Segment> take_closed();
  std::vector<Segment> finish();

private:
  void close_through(std::size_t last_index);
  void push_fixed(const ScreenPoint& m);
  void push_idle(const ScreenPoint& m);
  void push_drift(const ScreenPoint& m);

  CaptureConfig cfg_;
  std::vector<ScreenPoint> open_;
  std::vector<Segment> closed_;
  std::size_t next_index_ = 1;

  std::int64_t bucket_ = -1;

  std::optional<ScreenPoint> anchor_;

  std::deque<ScreenPoint> window_;
  std::optional<std::size_t> level_;
  std::optional<std::size_t> pending_level_;
  std::size_t pending_count_ = 0;
  std::size_t pending_pos_ = 0;
};

// Batch form of Segmenter. Concatenating the result reproduces the input.
std::vector<Segment> segment_stream(std::span<const ScreenPoint> points, const CaptureConfig& cfg);

// Trace files: one JSON object {"x": int, "y": int, "t": int} per line, sorted by t.
std::vector<ScreenPoint> read_trace(std::istream& in);
void write_trace(std::ostream& out, std::span<const ScreenPoint> points);

}  // namespace roiscope
