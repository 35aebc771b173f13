#include "roiscope/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "roiscope/errors.hpp"

namespace roiscope {

namespace {

std::string format_edge(double v) { return fmt::format("{:g}", v); }

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// One CSV record; handles quoted fields with doubled quotes. Quoted fields may
// not span lines.
std::vector<std::string> split_csv(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (quoted) throw IngestError("line " + std::to_string(lineno) + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

BinConfig BinConfig::from_json(const nlohmann::json& j) {
  BinConfig cfg;
  if (j.is_null()) return cfg;
  const nlohmann::json& bins = j.contains("bins") ? j.at("bins") : j;
  if (!bins.is_object()) throw ConfigError("bin config must be an object of attribute -> edge list");
  for (const auto& [name, edges] : bins.items()) {
    std::vector<double> e = edges.get<std::vector<double>>();
    if (e.empty()) throw ConfigError("bin edges for '" + name + "' must not be empty");
    for (std::size_t i = 1; i < e.size(); ++i) {
      if (!(e[i] > e[i - 1])) throw ConfigError("bin edges for '" + name + "' must be strictly increasing");
    }
    cfg.edges[name] = std::move(e);
  }
  return cfg;
}

nlohmann::json BinConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, e] : edges) j[name] = e;
  return j;
}

std::string BinConfig::label(const std::string& attribute, double value) const {
  const std::vector<double>& e = edges.at(attribute);
  if (value < e.front()) return "<" + format_edge(e.front());
  if (value >= e.back()) return ">=" + format_edge(e.back());
  const auto it = std::upper_bound(e.begin(), e.end(), value);
  return "[" + format_edge(*(it - 1)) + "," + format_edge(*it) + ")";
}

std::vector<std::string> BinConfig::labels(const std::string& attribute) const {
  const std::vector<double>& e = edges.at(attribute);
  std::vector<std::string> out{"<" + format_edge(e.front())};
  for (std::size_t i = 0; i + 1 < e.size(); ++i) out.push_back("[" + format_edge(e[i]) + "," + format_edge(e[i + 1]) + ")");
  out.push_back(">=" + format_edge(e.back()));
  return out;
}

namespace {

// Numbers are mapped to their bin; an existing bin label passes through so
// exported datasets read back unchanged.
std::optional<std::string> binned(const BinConfig& bins, const std::string& attribute, const std::string& raw) {
  if (const auto v = parse_number(raw)) return bins.label(attribute, *v);
  const std::vector<std::string> labels = bins.labels(attribute);
  if (std::find(labels.begin(), labels.end(), raw) != labels.end()) return raw;
  return std::nullopt;
}

}  // namespace

std::shared_ptr<const Dataset> make_dataset(std::vector<Poi> pois, std::vector<std::string> attribute_order,
                                            const BinConfig& bins, const QuadtreeOptions& index) {
  std::unordered_set<std::string> ids;
  std::map<std::string, std::set<std::string>> seen;
  for (const Poi& p : pois) {
    if (!ids.insert(p.id).second) throw IngestError("duplicate POI id " + p.id);
    for (const auto& [name, value] : p.attributes) {
      seen[name].insert(value);
      if (std::find(attribute_order.begin(), attribute_order.end(), name) == attribute_order.end()) {
        attribute_order.push_back(name);
      }
    }
  }

  std::vector<FacetSchema::Attribute> attributes;
  for (const std::string& name : attribute_order) {
    FacetSchema::Attribute a{name, {}};
    if (bins.edges.contains(name)) {
      a.domain = bins.labels(name);
    } else {
      const auto it = seen.find(name);
      if (it == seen.end()) continue;
      a.domain.assign(it->second.begin(), it->second.end());
    }
    attributes.push_back(std::move(a));
  }

  auto ds = std::make_shared<Dataset>();
  ds->schema = FacetSchema(std::move(attributes));
  for (Poi& p : pois) ds->schema.encode(p);
  ds->index = Quadtree::build(pois, index);
  ds->pois = std::move(pois);
  ds->bins = bins;
  return ds;
}

std::shared_ptr<const Dataset> ingest_csv(std::istream& in, const BinConfig& bins, const QuadtreeOptions& index) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv(line, lineno);
  }
  if (header.size() < 3 || header[0] != "id" || header[1] != "lat" || header[2] != "lon") {
    throw IngestError("line " + std::to_string(lineno) + ": CSV header must start with id,lat,lon");
  }
  const std::vector<std::string> attrs(header.begin() + 3, header.end());

  std::vector<Poi> pois;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = split_csv(line, lineno);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (f.size() != header.size()) {
      throw IngestError(where + "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    Poi p;
    p.id = f[0];
    if (p.id.empty()) throw IngestError(where + "empty id");
    const auto lat = parse_number(f[1]);
    const auto lon = parse_number(f[2]);
    if (!lat || !lon) throw IngestError(where + "lat/lon must be numeric");
    p.location = {*lat, *lon};
    if (!GeoBox::world().contains(p.location)) {
      throw IngestError(where + "POI " + p.id + " has coordinates outside the valid range");
    }
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const std::string& raw = f[a + 3];
      if (raw.empty()) continue;
      if (bins.edges.contains(attrs[a])) {
        const auto label = binned(bins, attrs[a], raw);
        if (!label) throw IngestError(where + "attribute '" + attrs[a] + "' is binned but '" + raw + "' is not numeric");
        p.attributes[attrs[a]] = *label;
      } else {
        p.attributes[attrs[a]] = raw;
      }
    }
    pois.push_back(std::move(p));
  }
  return make_dataset(std::move(pois), attrs, bins, index);
}

std::shared_ptr<const Dataset> ingest_geojson(const nlohmann::json& doc, const BinConfig& bins, const QuadtreeOptions& index) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features")) {
    throw IngestError("GeoJSON document must be a FeatureCollection");
  }
  std::vector<Poi> pois;
  std::vector<std::string> order;
  std::size_t n = 0;
  for (const nlohmann::json& feature : doc.at("features")) {
    const std::string where = "feature " + std::to_string(n) + ": ";
    const nlohmann::json& geom = feature.value("geometry", nlohmann::json());
    if (!geom.is_object() || geom.value("type", "") != "Point") {
      throw IngestError(where + "Point features only");
    }
    const nlohmann::json& coords = geom.at("coordinates");
    if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() || !coords[1].is_number()) {
      throw IngestError(where + "Point coordinates must be [lon, lat]");
    }
    Poi p;
    p.location = {coords[1].get<double>(), coords[0].get<double>()};
    const nlohmann::json props = feature.value("properties", nlohmann::json::object());
    if (feature.contains("id")) {
      p.id = feature["id"].is_string() ? feature["id"].get<std::string>() : feature["id"].dump();
    } else if (props.contains("id")) {
      p.id = props["id"].is_string() ? props["id"].get<std::string>() : props["id"].dump();
    } else {
      p.id = std::to_string(n);
    }
    if (!GeoBox::world().contains(p.location)) {
      throw IngestError(where + "POI " + p.id + " has coordinates outside the valid range");
    }
    for (const auto& [name, value] : props.items()) {
      if (name == "id" || value.is_null()) continue;
      if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
      if (bins.edges.contains(name)) {
        std::optional<std::string> label;
        if (value.is_number()) label = bins.label(name, value.get<double>());
        if (value.is_string()) label = binned(bins, name, value.get<std::string>());
        if (!label) throw IngestError(where + "attribute '" + name + "' is binned but not numeric");
        p.attributes[name] = *label;
      } else if (value.is_string()) {
        p.attributes[name] = value.get<std::string>();
      } else if (value.is_primitive()) {
        p.attributes[name] = value.dump();
      } else {
        throw IngestError(where + "attribute '" + name + "' must be a scalar");
      }
    }
    pois.push_back(std::move(p));
    ++n;
  }
  return make_dataset(std::move(pois), order, bins, index);
}

std::shared_ptr<const Dataset> ingest_text(std::string_view text, DatasetFormat format, const BinConfig& bins,
                                           const QuadtreeOptions& index) {
  if (format == DatasetFormat::csv) {
    std::istringstream in{std::string(text)};
    return ingest_csv(in, bins, index);
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(std::string("GeoJSON parse error: ") + e.what());
  }
  return ingest_geojson(doc, bins, index);
}

DatasetFormat format_for(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return DatasetFormat::csv;
  if (ext == ".json" || ext == ".geojson") return DatasetFormat::geojson;
  throw IngestError("unrecognized dataset extension '" + ext + "' (expected .csv, .json or .geojson)");
}

std::shared_ptr<const Dataset> ingest_file(const std::filesystem::path& path, const BinConfig& bins,
                                           const QuadtreeOptions& index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open dataset file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ingest_text(buf.str(), format_for(path), bins, index);
}

void write_csv(std::ostream& out, const std::vector<Poi>& pois, const std::vector<std::string>& attribute_order) {
  out << "id,lat,lon";
  for (const std::string& a : attribute_order) out << ',' << csv_escape(a);
  out << '\n';
  for (const Poi& p : pois) {
    out << csv_escape(p.id) << ',' << fmt::format("{},{}", p.location.lat, p.location.lon);
    for (const std::string& a : attribute_order) {
      out << ',';
      const auto it = p.attributes.find(a);
      if (it != p.attributes.end()) out << csv_escape(it->second);
    }
    out << '\n';
  }
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  std::vector<std::string> order;
  for (const auto& a : dataset.schema.attributes()) order.push_back(a.name);
  write_csv(out, dataset.pois, order);
}

}  // namespace roiscope
