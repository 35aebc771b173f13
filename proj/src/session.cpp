#include "roiscope/session.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "roiscope/errors.hpp"

namespace roiscope {

namespace fs = std::filesystem;

std::vector<ScreenPoint> events_from_json(const nlohmann::json& events) {
  if (!events.is_array()) throw ConfigError("events must be an array");
  std::vector<ScreenPoint> out;
  out.reserve(events.size());
  try {
    for (const nlohmann::json& e : events) out.push_back({e.at("x").get<double>(), e.at("y").get<double>(), e.at("t").get<std::int64_t>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad event: ") + e.what());
  }
  return out;
}

nlohmann::json events_to_json(std::span<const ScreenPoint> events) {
  nlohmann::json out = nlohmann::json::array();
  for (const ScreenPoint& p : events) out.push_back({{"x", p.x}, {"y", p.y}, {"t", p.t}});
  return out;
}

Session::Session(std::string id, std::shared_ptr<const Dataset> dataset, Viewport viewport, PipelineConfig config)
    : id_(std::move(id)),
      dataset_(std::move(dataset)),
      viewport_(viewport),
      config_(std::move(config)),
      recorder_(config_.capture.epsilon_ms),
      feedback_(dataset_->schema.size()) {
  viewport_.validate();
  config_.validate();
}

std::size_t Session::push_events(std::span<const ScreenPoint> events) {
  std::lock_guard lock(mutex_);
  Recorder trial = recorder_;
  std::size_t accepted = 0;
  for (const ScreenPoint& e : events) accepted += trial.record(e) ? 1 : 0;
  recorder_ = std::move(trial);
  return accepted;
}

void Session::set_viewport(const Viewport& viewport) {
  viewport.validate();
  std::lock_guard lock(mutex_);
  viewport_ = viewport;
  recorder_.clear();
}

nlohmann::json Session::analyze(bool include_timings, Exec exec) {
  std::lock_guard lock(mutex_);
  const AnalyzeResult result = run_analysis(*dataset_, viewport_, config_, recorder_.points(), feedback_, exec);
  nlohmann::json doc = to_json(result, *dataset_, viewport_, feedback_, include_timings);
  doc["session_id"] = id_;
  last_ = doc;
  last_->erase("timings_ms");
  return doc;
}

nlohmann::json Session::feedback_view() const {
  std::lock_guard lock(mutex_);
  nlohmann::json j = roiscope::feedback_view(feedback_, dataset_->schema);
  j["schema_version"] = kSchemaVersion;
  j["session_id"] = id_;
  return j;
}

nlohmann::json Session::status() const {
  std::lock_guard lock(mutex_);
  return {{"schema_version", kSchemaVersion},
          {"session_id", id_},
          {"dataset_id", dataset_->id},
          {"viewport", to_json(viewport_)},
          {"recorded_points", recorder_.points().size()},
          {"interactions", feedback_.interactions()},
          {"confidence", confidence(feedback_, config_.discover.xi)},
          {"config", config_.to_json()},
          {"has_result", last_.has_value()}};
}

FeedbackVector Session::feedback() const {
  std::lock_guard lock(mutex_);
  return feedback_;
}

Viewport Session::viewport() const {
  std::lock_guard lock(mutex_);
  return viewport_;
}

PipelineConfig Session::config() const {
  std::lock_guard lock(mutex_);
  return config_;
}

std::optional<nlohmann::json> Session::last_result() const {
  std::lock_guard lock(mutex_);
  return last_;
}

SessionManager::SessionManager(std::optional<fs::path> data_dir, PipelineConfig defaults)
    : dir_(std::move(data_dir)), defaults_(std::move(defaults)) {
  defaults_.validate();
  if (dir_) {
    fs::create_directories(*dir_ / "datasets");
    fs::create_directories(*dir_ / "sessions");
  }
}

std::string SessionManager::add_dataset(std::shared_ptr<const Dataset> dataset) {
  std::unique_lock lock(mutex_);
  std::string id = dataset->id;
  if (id.empty() || datasets_.contains(id)) {
    id = "ds-" + std::to_string(next_dataset_++);
    auto copy = std::make_shared<Dataset>(*dataset);
    copy->id = id;
    dataset = std::move(copy);
  }
  datasets_[id] = std::move(dataset);
  return id;
}

std::string SessionManager::ingest_dataset(std::string_view text, DatasetFormat format, const BinConfig& bins) {
  std::shared_ptr<const Dataset> parsed = ingest_text(text, format, bins);
  std::unique_lock lock(mutex_);
  const std::string id = "ds-" + std::to_string(next_dataset_++);
  auto named = std::const_pointer_cast<Dataset>(parsed);
  named->id = id;
  if (dir_) {
    const fs::path base = *dir_ / "datasets" / id;
    std::ofstream(base.string() + (format == DatasetFormat::csv ? ".csv" : ".geojson"), std::ios::binary) << text;
    std::ofstream(base.string() + ".bins.json") << bins.to_json().dump();
  }
  datasets_[id] = std::move(named);
  return id;
}

std::shared_ptr<const Dataset> SessionManager::dataset(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = datasets_.find(id);
  if (it == datasets_.end()) throw NotFound("unknown dataset '" + id + "'");
  return it->second;
}

std::shared_ptr<Session> SessionManager::session(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
  return it->second;
}

std::string SessionManager::create_session(const std::string& dataset_id, const Viewport& viewport,
                                           const nlohmann::json& config_overrides) {
  std::shared_ptr<const Dataset> ds = dataset(dataset_id);
  const PipelineConfig config = PipelineConfig::from_json(config_overrides, defaults_);
  std::string id;
  {
    std::unique_lock lock(mutex_);
    id = "s-" + std::to_string(next_session_++);
    sessions_[id] = std::make_shared<Session>(id, ds, viewport, config);
  }
  append_log(id, {{"op", "create"},
                  {"session", id},
                  {"dataset", dataset_id},
                  {"viewport", to_json(viewport)},
                  {"config", config.to_json()}});
  return id;
}

std::size_t SessionManager::push_events(const std::string& session_id, std::span<const ScreenPoint> events) {
  std::shared_ptr<Session> s = session(session_id);
  const std::size_t accepted = s->push_events(events);
  if (!events.empty()) append_log(session_id, {{"op", "events"}, {"events", events_to_json(events)}});
  return accepted;
}

void SessionManager::set_viewport(const std::string& session_id, const Viewport& viewport) {
  session(session_id)->set_viewport(viewport);
  append_log(session_id, {{"op", "viewport"}, {"viewport", to_json(viewport)}});
}

nlohmann::json SessionManager::analyze(const std::string& session_id, bool include_timings) {
  std::shared_ptr<Session> s = session(session_id);
  nlohmann::json doc = s->analyze(include_timings);
  append_log(session_id, {{"op", "analyze"}});
  if (dir_) write_snapshot(*s, *s->last_result());
  return doc;
}

nlohmann::json SessionManager::feedback(const std::string& session_id) const { return session(session_id)->feedback_view(); }

nlohmann::json SessionManager::status(const std::string& session_id) const { return session(session_id)->status(); }

std::optional<fs::path> SessionManager::log_path(const std::string& session_id) const {
  if (!dir_) return std::nullopt;
  return *dir_ / "sessions" / (session_id + ".jsonl");
}

void SessionManager::append_log(const std::string& session_id, const nlohmann::json& record) const {
  if (!dir_) return;
  std::ofstream out(*log_path(session_id), std::ios::app | std::ios::binary);
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw Error("failed to append to event log of " + session_id);
}

void SessionManager::write_snapshot(const Session& session, const nlohmann::json& result) const {
  const fs::path final_path = *dir_ / "sessions" / (session.id() + ".snapshot.json");
  const fs::path tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << result.dump(2) << '\n';
  }
  fs::rename(tmp, final_path);
}

std::vector<nlohmann::json> SessionManager::replay_log(std::istream& log, std::shared_ptr<const Dataset> dataset) {
  std::vector<nlohmann::json> outputs;
  std::unique_ptr<Session> session;
  std::string line;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    const nlohmann::json rec = nlohmann::json::parse(line);
    const std::string op = rec.at("op").get<std::string>();
    if (op == "create") {
      const PipelineConfig config = PipelineConfig::from_json(rec.at("config"));
      session = std::make_unique<Session>(rec.at("session").get<std::string>(), dataset,
                                          viewport_from_json(rec.at("viewport")), config);
      continue;
    }
    if (!session) throw Error("event log does not start with a create record");
    if (op == "events") {
      const std::vector<ScreenPoint> events = events_from_json(rec.at("events"));
      session->push_events(events);
    } else if (op == "viewport") {
      session->set_viewport(viewport_from_json(rec.at("viewport")));
    } else if (op == "analyze") {
      outputs.push_back(session->analyze(false));
    } else {
      throw Error("unknown event log op '" + op + "'");
    }
  }
  return outputs;
}

void SessionManager::restore() {
  if (!dir_) return;
  std::size_t max_ds = 0, max_s = 0;
  auto number = [](const std::string& stem, const std::string& prefix) -> std::size_t {
    if (stem.rfind(prefix, 0) != 0) return 0;
    try {
      return std::stoul(stem.substr(prefix.size()));
    } catch (...) {
      return 0;
    }
  };

  for (const auto& entry : fs::directory_iterator(*dir_ / "datasets")) {
    const fs::path p = entry.path();
    const std::string ext = p.extension().string();
    if (ext != ".csv" && ext != ".geojson") continue;
    const std::string id = p.stem().string();
    BinConfig bins;
    const fs::path bins_path = *dir_ / "datasets" / (id + ".bins.json");
    if (fs::exists(bins_path)) {
      std::ifstream in(bins_path);
      bins = BinConfig::from_json(nlohmann::json::parse(in));
    }
    auto ds = std::const_pointer_cast<Dataset>(ingest_file(p, bins));
    ds->id = id;
    std::unique_lock lock(mutex_);
    datasets_[id] = std::move(ds);
    max_ds = std::max(max_ds, number(id, "ds-"));
  }

  for (const auto& entry : fs::directory_iterator(*dir_ / "sessions")) {
    const fs::path p = entry.path();
    if (p.extension() != ".jsonl") continue;
    std::ifstream in(p);
    std::string first;
    if (!std::getline(in, first)) continue;
    const nlohmann::json create = nlohmann::json::parse(first);
    const std::string sid = create.at("session").get<std::string>();
    std::shared_ptr<const Dataset> ds = dataset(create.at("dataset").get<std::string>());
    auto s = std::make_shared<Session>(sid, ds, viewport_from_json(create.at("viewport")),
                                       PipelineConfig::from_json(create.at("config")));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const nlohmann::json rec = nlohmann::json::parse(line);
      const std::string op = rec.at("op").get<std::string>();
      if (op == "events") {
        const std::vector<ScreenPoint> events = events_from_json(rec.at("events"));
        s->push_events(events);
      } else if (op == "viewport") {
        s->set_viewport(viewport_from_json(rec.at("viewport")));
      } else if (op == "analyze") {
        s->analyze(false);
      }
    }
    spdlog::info("restored session {} ({} interactions)", sid, s->feedback().interactions());
    std::unique_lock lock(mutex_);
    sessions_[sid] = std::move(s);
    max_s = std::max(max_s, number(sid, "s-"));
  }
  std::unique_lock lock(mutex_);
  next_dataset_ = std::max(next_dataset_, max_ds + 1);
  next_session_ = std::max(next_session_, max_s + 1);
}

}  // namespace roiscope
