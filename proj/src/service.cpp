#include "roiscope/service.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "roiscope/errors.hpp"

namespace roiscope {

using nlohmann::json;

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig c;
  if (j.contains("host")) c.host = j.at("host").get<std::string>();
  if (j.contains("port")) c.port = j.at("port").get<int>();
  if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
  if (j.contains("pipeline")) c.defaults = PipelineConfig::from_json(j.at("pipeline"));
  return c;
}

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("bad config file " + path.string() + ": " + e.what());
  }
}

void ServiceConfig::apply_env() {
  if (const char* h = std::getenv("ROISCOPE_HOST")) host = h;
  if (const char* p = std::getenv("ROISCOPE_PORT")) {
    try {
      port = std::stoi(p);
    } catch (const std::exception&) {
      throw ConfigError(std::string("ROISCOPE_PORT is not a number: ") + p);
    }
  }
  if (const char* d = std::getenv("ROISCOPE_DATA_DIR")) data_dir = d;
}

namespace {

void reply(httplib::Response& res, int status, json body) {
  body["schema_version"] = kSchemaVersion;
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", message}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON body: ") + e.what());
  }
}

template <class F>
httplib::Server::Handler guarded(F&& fn) {
  return [fn = std::forward<F>(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const NotFound& e) {
      fail(res, 404, e.what());
    } catch (const Error& e) {
      fail(res, 400, e.what());
    } catch (const json::exception& e) {
      fail(res, 400, e.what());
    } catch (const std::exception& e) {
      spdlog::error("unhandled error on {} {}: {}", req.method, req.path, e.what());
      fail(res, 500, e.what());
    }
  };
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      manager_(std::make_unique<SessionManager>(config_.data_dir, config_.defaults)),
      server_(std::make_unique<httplib::Server>()) {
  manager_->restore();
  routes();
}

Service::~Service() { stop(); }

void Service::routes() {
  httplib::Server& s = *server_;
  SessionManager& m = *manager_;

  s.Post("/datasets", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    std::string text;
    std::string filename;
    BinConfig bins;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) throw ConfigError("multipart field 'file' is required");
      const auto file = req.get_file_value("file");
      text = file.content;
      filename = file.filename;
      if (req.has_file("bins")) bins = BinConfig::from_json(json::parse(req.get_file_value("bins").content));
    } else {
      text = req.body;
    }
    if (text.empty()) throw IngestError("empty dataset upload");
    DatasetFormat format = DatasetFormat::csv;
    if (!filename.empty()) {
      format = format_for(filename);
    } else if (text.find_first_not_of(" \t\r\n") != std::string::npos && text[text.find_first_not_of(" \t\r\n")] == '{') {
      format = DatasetFormat::geojson;
    }
    const std::string id = m.ingest_dataset(text, format, bins);
    const auto ds = m.dataset(id);
    reply(res, 201, {{"dataset_id", id}, {"pois", ds->pois.size()}, {"facets", ds->schema.size()}});
  }));

  s.Post("/sessions", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const std::string ds = body.at("dataset_id").get<std::string>();
    const Viewport vp = viewport_from_json(body.at("viewport"));
    const json overrides = body.value("config", json::object());
    const std::string id = m.create_session(ds, vp, overrides);
    reply(res, 201, {{"session_id", id}, {"dataset_id", ds}});
  }));

  s.Post(R"(/sessions/([^/]+)/events)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const json body = parse_body(req);
    const std::vector<ScreenPoint> events = events_from_json(body.at("events"));
    const std::size_t accepted = m.push_events(id, events);
    reply(res, 200, {{"session_id", id}, {"received", events.size()}, {"accepted", accepted}});
  }));

  s.Post(R"(/sessions/([^/]+)/analyze)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, m.analyze(req.matches[1]));
  }));

  s.Post(R"(/sessions/([^/]+)/viewport)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const json body = parse_body(req);
    m.set_viewport(id, viewport_from_json(body.contains("viewport") ? body.at("viewport") : body));
    reply(res, 200, m.status(id));
  }));

  s.Get(R"(/sessions/([^/]+)/feedback)", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, m.feedback(req.matches[1]));
  }));

  s.Get(R"(/sessions/([^/]+))", guarded([&m](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, m.status(req.matches[1]));
  }));

  s.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"status", "ok"}}); });

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) fail(res, res.status, "no such route");
  });
}

int Service::bind() {
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) throw ConfigError("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  spdlog::info("listening on {}:{}", config_.host, port);
  return port;
}

void Service::listen_after_bind() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::running() const { return server_->is_running(); }

}  // namespace roiscope
