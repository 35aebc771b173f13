#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "roiscope/pipeline.hpp"
#include "roiscope/session.hpp"

namespace httplib {
class Server;
}

namespace roiscope {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> data_dir;
  PipelineConfig defaults;

  // Reads {"host", "port", "data_dir", "pipeline": {...}}; missing keys keep
  // their defaults.
  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig from_file(const std::filesystem::path& path);
  // ROISCOPE_HOST, ROISCOPE_PORT and ROISCOPE_DATA_DIR override the file.
  void apply_env();
};

// REST front end over a SessionManager. Every response body is JSON carrying
// schema_version; failures map to 400 (bad input) or 404 (unknown id).
class Service {
public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  SessionManager& sessions() { return *manager_; }

  // Binds to an ephemeral port when config.port is 0; returns the bound port.
  int bind();
  // Blocks until stop().
  void listen_after_bind();
  void stop();
  bool running() const;

private:
  void routes();

  ServiceConfig config_;
  std::unique_ptr<SessionManager> manager_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace roiscope
