#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "roiscope/capture.hpp"
#include "roiscope/dataset.hpp"
#include "roiscope/feedback.hpp"
#include "roiscope/pipeline.hpp"

namespace roiscope {

// One explorer's state: recorder, feedback vector and last result. All
// mutating calls are serialized on the session's own mutex.
class Session {
public:
  Session(std::string id, std::shared_ptr<const Dataset> dataset, Viewport viewport, PipelineConfig config);

  const std::string& id() const { return id_; }
  const Dataset& dataset() const { return *dataset_; }

  // Feeds the batch through the throttle. The batch is rejected as a whole
  // (OrderingError) if any timestamp goes backwards.
  std::size_t push_events(std::span<const ScreenPoint> events);

  // Changing the frame invalidates recorded pixels, so the recorder is reset.
  void set_viewport(const Viewport& viewport);

  // Full result document; timings included on request.
  nlohmann::json analyze(bool include_timings = true, Exec exec = Exec::parallel);

  nlohmann::json feedback_view() const;
  nlohmann::json status() const;
  FeedbackVector feedback() const;
  Viewport viewport() const;
  PipelineConfig config() const;
  std::optional<nlohmann::json> last_result() const;

private:
  std::string id_;
  std::shared_ptr<const Dataset> dataset_;
  mutable std::mutex mutex_;
  Viewport viewport_;
  PipelineConfig config_;
  Recorder recorder_;
  FeedbackVector feedback_;
  std::optional<nlohmann::json> last_;
};

// Registry of datasets and sessions. With a data directory every session
// keeps an append-only JSONL event log plus a snapshot of its latest result,
// and restore() rebuilds everything from disk.
class SessionManager {
public:
  explicit SessionManager(std::optional<std::filesystem::path> data_dir = std::nullopt, PipelineConfig defaults = {});

  std::string add_dataset(std::shared_ptr<const Dataset> dataset);
  std::string ingest_dataset(std::string_view text, DatasetFormat format, const BinConfig& bins);
  std::shared_ptr<const Dataset> dataset(const std::string& id) const;

  std::string create_session(const std::string& dataset_id, const Viewport& viewport,
                             const nlohmann::json& config_overrides = nlohmann::json::object());
  std::size_t push_events(const std::string& session_id, std::span<const ScreenPoint> events);
  void set_viewport(const std::string& session_id, const Viewport& viewport);
  nlohmann::json analyze(const std::string& session_id, bool include_timings = true);
  nlohmann::json feedback(const std::string& session_id) const;
  nlohmann::json status(const std::string& session_id) const;
  std::shared_ptr<Session> session(const std::string& id) const;

  const PipelineConfig& defaults() const { return defaults_; }

  // Loads persisted datasets and replays every session log.
  void restore();

  // Re-executes a session log against `dataset`; returns each analyze
  // document (without timings) in order.
  static std::vector<nlohmann::json> replay_log(std::istream& log, std::shared_ptr<const Dataset> dataset);

  std::optional<std::filesystem::path> log_path(const std::string& session_id) const;

private:
  void append_log(const std::string& session_id, const nlohmann::json& record) const;
  void write_snapshot(const Session& session, const nlohmann::json& result) const;

  std::optional<std::filesystem::path> dir_;
  PipelineConfig defaults_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_dataset_ = 1;
  std::size_t next_session_ = 1;
};

std::vector<ScreenPoint> events_from_json(const nlohmann::json& events);
nlohmann::json events_to_json(std::span<const ScreenPoint> events);

}  // namespace roiscope
