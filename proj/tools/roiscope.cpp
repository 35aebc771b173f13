// roiscope command-line driver: replay traces and event logs, run virtual
// agents, measure latency, generate scenario files, or start the service.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "roiscope/capture.hpp"
#include "roiscope/dataset.hpp"
#include "roiscope/errors.hpp"
#include "roiscope/pipeline.hpp"
#include "roiscope/scenario.hpp"
#include "roiscope/service.hpp"
#include "roiscope/session.hpp"
#include "roiscope/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roiscope;

namespace {

constexpr int kOk = 0;
constexpr int kThresholdFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

// One string option per PipelineConfig key, so the flag set follows the
// config schema. Values are parsed as JSON when possible ("3", "[1,2]",
// "true"), otherwise taken as strings ("idle").
class ConfigFlags {
public:
  void attach(CLI::App& app) {
    const json defaults = PipelineConfig{}.to_json();
    for (const auto& [key, value] : defaults.items()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app.add_option(flag, raw_[key], fmt::format("pipeline {} (default {})", key, value.dump()))->group("Pipeline");
    }
    app.add_option("--config", config_file_, "JSON file with pipeline keys and an optional viewport")
        ->check(CLI::ExistingFile);
  }

  json file() const { return config_file_.empty() ? json::object() : read_json_file(config_file_); }

  PipelineConfig resolve() const {
    json j = file();
    for (const auto& [key, text] : raw_) {
      if (text.empty()) continue;
      json value = json::parse(text, nullptr, false);
      j[key] = value.is_discarded() ? json(text) : value;
    }
    return PipelineConfig::from_json(j);
  }

private:
  std::map<std::string, std::string> raw_;
  std::string config_file_;
};

struct ViewportFlags {
  std::optional<double> gamma, theta, scale;

  void attach(CLI::App& app) {
    app.add_option("--gamma", gamma, "viewport center latitude")->group("Viewport");
    app.add_option("--theta", theta, "viewport center longitude")->group("Viewport");
    app.add_option("--scale", scale, "degrees per pixel")->group("Viewport");
  }

  Viewport resolve(const json& config_file) const {
    Viewport v = config_file.contains("viewport") ? viewport_from_json(config_file.at("viewport")) : Viewport{};
    if (gamma) v.gamma = *gamma;
    if (theta) v.theta = *theta;
    if (scale) v.scale = *scale;
    v.validate();
    return v;
  }
};

std::shared_ptr<const Dataset> load_dataset(const std::string& path, const std::string& bins_path) {
  if (!fs::exists(path)) throw UsageError("dataset file not found: " + path);
  const BinConfig bins = bins_path.empty() ? BinConfig{} : BinConfig::from_json(read_json_file(bins_path));
  return ingest_file(path, bins);
}

void print_analysis_table(const json& doc, std::ostream& out) {
  out << fmt::format("segments {}  polygons {}  confidence {:.4f}  algorithm {}  interactions {}\n",
                     doc.at("segments").get<std::size_t>(), doc.at("polygons").get<std::size_t>(),
                     doc.at("confidence").get<double>(), doc.at("algorithm").get<std::string>(),
                     doc.at("interactions").get<std::size_t>());
  out << fmt::format("{:>4}  {:>10}  {:>7}  {:>11}  {:>3}  {}\n", "roi", "area_px", "matched", "peculiarity", "k'",
                     "highlights");
  const json& features = doc.at("rois").at("features");
  const json& highlights = doc.at("highlights");
  for (std::size_t i = 0; i < features.size(); ++i) {
    const json& p = features[i].at("properties");
    std::string ids;
    for (const json& h : highlights[i].at("pois")) ids += (ids.empty() ? "" : ",") + h.at("id").get<std::string>();
    out << fmt::format("{:>4}  {:>10.1f}  {:>7}  {:>11.4f}  {:>3}  {}\n", p.at("roi").get<std::size_t>(),
                       p.at("area_px").get<double>(), p.at("matched").get<std::size_t>(),
                       p.at("peculiarity").get<double>(), p.at("k_prime").get<std::size_t>(), ids);
  }
  for (const json& w : doc.at("warnings")) out << "warning: " << w.get<std::string>() << '\n';
  if (doc.contains("timings_ms")) out << "timings_ms " << doc.at("timings_ms").dump() << '\n';
}

void print_latency_table(const StageLatency& l, std::ostream& out) {
  const std::pair<const char*, const Percentiles*> rows[] = {{"capture", &l.capture}, {"discover", &l.discover},
                                                             {"match", &l.match},     {"update", &l.update},
                                                             {"highlight", &l.highlight}, {"total", &l.total}};
  out << fmt::format("{:>10}  {:>10}  {:>10}\n", "stage", "p50_ms", "p95_ms");
  for (const auto& [name, p] : rows) out << fmt::format("{:>10}  {:>10.3f}  {:>10.3f}\n", name, p->p50, p->p95);
}

std::atomic<Service*> g_service{nullptr};

void handle_signal(int) {
  if (Service* s = g_service.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roiscope: region-of-interest discovery over mouse traces"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output = "json";
  std::uint64_t seed = 1;
  std::string log_level = "warn";
  app.add_option("--output", output, "json or table")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--seed", seed, "random seed");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  // replay
  auto* replay = app.add_subcommand("replay", "analyze a recorded trace, or re-run a session event log");
  std::string trace_path, dataset_path, bins_path, log_path;
  bool no_timings = false;
  ConfigFlags replay_cfg;
  ViewportFlags replay_vp;
  replay->add_option("--trace", trace_path, "JSONL trace of {x,y,t} samples");
  replay->add_option("--log", log_path, "session event log (JSONL); prints every analyze document");
  replay->add_option("--dataset", dataset_path, "POI file (.csv or .geojson)")->required();
  replay->add_option("--bins", bins_path, "bin configuration JSON");
  replay->add_flag("--no-timings", no_timings, "omit timings so output is byte-comparable");
  replay_cfg.attach(*replay);
  replay_vp.attach(*replay);

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "run a virtual agent and report precision, hit ratio, diversity");
  std::string profile_path, sim_dataset, sim_bins;
  std::optional<double> min_precision, min_hit_ratio;
  ConfigFlags sim_cfg;
  ViewportFlags sim_vp;
  simulate_cmd->add_option("--profile", profile_path, "agent profile JSON")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--dataset", sim_dataset, "POI file; defaults to a generated city");
  simulate_cmd->add_option("--bins", sim_bins, "bin configuration JSON");
  simulate_cmd->add_option("--min-precision", min_precision, "exit 1 when precision is lower");
  simulate_cmd->add_option("--min-hit-ratio", min_hit_ratio, "exit 1 when hit ratio is lower");
  sim_cfg.attach(*simulate_cmd);
  sim_vp.attach(*simulate_cmd);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "per-stage analyze latency on generated workloads");
  std::vector<std::size_t> poi_sizes{10000}, point_sizes{2000};
  std::size_t repetitions = 10;
  std::optional<double> max_p95;
  bench_cmd->add_option("--pois", poi_sizes, "dataset sizes")->delimiter(',');
  bench_cmd->add_option("--points", point_sizes, "recorded trace sizes")->delimiter(',');
  bench_cmd->add_option("--repetitions", repetitions, "runs per size pair");
  bench_cmd->add_option("--max-p95", max_p95, "exit 1 when any end-to-end p95 exceeds this many ms");

  // generate
  auto* generate = app.add_subcommand("generate", "write scenario files (POIs, bins, trace, config)");
  std::string scenario_name = "overlap", out_dir = ".";
  std::size_t gen_pois = 100000, gen_points = 10000;
  generate->add_option("--scenario", scenario_name, "overlap or load")->check(CLI::IsMember({"overlap", "load"}));
  generate->add_option("--out", out_dir, "output directory");
  generate->add_option("--pois", gen_pois, "POIs for the load scenario");
  generate->add_option("--points", gen_points, "trace points for the load scenario");

  // serve
  auto* serve = app.add_subcommand("serve", "start the HTTP session service");
  std::string serve_config;
  std::optional<std::string> host, data_dir;
  std::optional<int> port;
  serve->add_option("--config", serve_config, "service config JSON")->check(CLI::ExistingFile);
  serve->add_option("--host", host, "bind address (overrides ROISCOPE_HOST)");
  serve->add_option("--port", port, "port, 0 for any (overrides ROISCOPE_PORT)");
  serve->add_option("--data-dir", data_dir, "directory for event logs and snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("roiscope"));
  spdlog::set_level(spdlog::level::from_str(log_level));
  const bool table = output == "table";

  try {
    if (replay->parsed()) {
      if (trace_path.empty() == log_path.empty()) throw UsageError("replay needs exactly one of --trace or --log");
      const auto dataset = load_dataset(dataset_path, bins_path);
      if (!log_path.empty()) {
        std::ifstream in(log_path);
        if (!in) throw UsageError("cannot open " + log_path);
        const std::vector<json> docs = SessionManager::replay_log(in, dataset);
        for (const json& doc : docs) {
          if (table) {
            print_analysis_table(doc, std::cout);
          } else {
            std::cout << doc.dump() << '\n';
          }
        }
        return kOk;
      }
      std::ifstream in(trace_path);
      if (!in) throw UsageError("cannot open " + trace_path);
      const PipelineConfig config = replay_cfg.resolve();
      const Viewport viewport = replay_vp.resolve(replay_cfg.file());
      Recorder recorder(config.capture.epsilon_ms);
      for (const ScreenPoint& p : read_trace(in)) recorder.record(p);
      FeedbackVector feedback(dataset->schema.size());
      const AnalyzeResult result = run_analysis(*dataset, viewport, config, recorder.points(), feedback);
      const json doc = to_json(result, *dataset, viewport, feedback, !no_timings);
      if (table) {
        print_analysis_table(doc, std::cout);
      } else {
        std::cout << doc.dump(2) << '\n';
      }
      return kOk;
    }

    if (simulate_cmd->parsed()) {
      const AgentProfile profile = AgentProfile::from_json(read_json_file(profile_path));
      const PipelineConfig config = sim_cfg.resolve();
      const json file = sim_cfg.file();
      std::shared_ptr<const Dataset> dataset;
      Viewport viewport;
      if (sim_dataset.empty()) {
        WorldSpec world;
        for (const InterestRegion& r : profile.regions) {
          world.blobs.push_back(PoiBlob{r.center, 0.0006, 300, {}});
        }
        dataset = synthetic_city(world, seed);
        viewport = Viewport{world.center.lat, world.center.lon, 0.0001};
        if (file.contains("viewport") || sim_vp.gamma || sim_vp.theta || sim_vp.scale) viewport = sim_vp.resolve(file);
      } else {
        dataset = load_dataset(sim_dataset, sim_bins);
        viewport = sim_vp.resolve(file);
      }
      const EvalReport report = simulate(profile, *dataset, viewport, config, seed);
      if (table) {
        std::cout << fmt::format("precision {:.4f}  hit_ratio {:.4f}  diversity {:.4f}  highlights {}  rois {}\n",
                                 report.precision, report.hit_ratio, report.diversity, report.highlights, report.rois);
        print_latency_table(report.latency, std::cout);
      } else {
        std::cout << report.to_json().dump(2) << '\n';
      }
      bool ok = true;
      if (min_precision && report.precision < *min_precision) {
        std::cerr << fmt::format("precision {:.4f} below {:.4f}\n", report.precision, *min_precision);
        ok = false;
      }
      if (min_hit_ratio && report.hit_ratio < *min_hit_ratio) {
        std::cerr << fmt::format("hit ratio {:.4f} below {:.4f}\n", report.hit_ratio, *min_hit_ratio);
        ok = false;
      }
      return ok ? kOk : kThresholdFailed;
    }

    if (bench_cmd->parsed()) {
      if (repetitions == 0) throw UsageError("--repetitions must be at least 1");
      const std::vector<BenchRow> rows = bench(poi_sizes, point_sizes, repetitions, seed);
      bool ok = true;
      json out = json::array();
      for (const BenchRow& r : rows) {
        if (table) {
          std::cout << fmt::format("pois {}  points {}  repetitions {}  rois {}\n", r.pois, r.points, r.repetitions,
                                   r.rois);
          print_latency_table(r.latency, std::cout);
        }
        out.push_back({{"pois", r.pois},
                       {"points", r.points},
                       {"repetitions", r.repetitions},
                       {"rois", r.rois},
                       {"latency_ms", to_json(r.latency)}});
        if (max_p95 && r.latency.total.p95 > *max_p95) {
          std::cerr << fmt::format("p95 {:.1f} ms exceeds {:.1f} ms at {} POIs / {} points\n", r.latency.total.p95,
                                   *max_p95, r.pois, r.points);
          ok = false;
        }
      }
      if (!table) std::cout << out.dump(2) << '\n';
      return ok ? kOk : kThresholdFailed;
    }

    if (generate->parsed()) {
      const Scenario s = scenario_name == "overlap" ? overlap_scenario(seed) : load_scenario(gen_pois, gen_points, seed);
      fs::create_directories(out_dir);
      const fs::path dir(out_dir);
      {
        std::ofstream f(dir / "pois.csv");
        write_csv(f, *s.dataset);
      }
      std::ofstream(dir / "bins.json") << s.dataset->bins.to_json().dump(2) << '\n';
      {
        std::ofstream f(dir / "trace.jsonl");
        write_trace(f, s.trace);
      }
      json config = s.config.to_json();
      config["viewport"] = to_json(s.viewport);
      std::ofstream(dir / "config.json") << config.dump(2) << '\n';
      if (table) std::cout << fmt::format("wrote {} POIs and {} trace points to {}\n", s.dataset->pois.size(),
                                          s.trace.size(), dir.string());
      return kOk;
    }

    if (serve->parsed()) {
      ServiceConfig config = serve_config.empty() ? ServiceConfig{} : ServiceConfig::from_file(serve_config);
      config.apply_env();
      if (host) config.host = *host;
      if (port) config.port = *port;
      if (data_dir) config.data_dir = *data_dir;
      Service service(config);
      const int bound = service.bind();
      std::cout << fmt::format("listening on {}:{}", config.host, bound) << std::endl;
      g_service = &service;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      service.listen_after_bind();
      g_service = nullptr;
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
