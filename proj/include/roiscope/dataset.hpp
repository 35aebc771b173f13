#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roiscope/facets.hpp"
#include "roiscope/quadtree.hpp"

namespace roiscope {

// Numeric attributes listed here are discretized into labeled bins at
// ingestion. With edges e0 < e1 < ... < en the labels are "<e0",
// "[e0,e1)", ..., ">=en".
struct BinConfig {
  std::map<std::string, std::vector<double>> edges;

  static BinConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // Label of `value` for `attribute`; the attribute must be configured.
  std::string label(const std::string& attribute, double value) const;
  std::vector<std::string> labels(const std::string& attribute) const;
};

enum class DatasetFormat { csv, geojson };

// Immutable POI collection with its facet schema and spatial index.
struct Dataset {
  std::string id;
  std::vector<Poi> pois;
  FacetSchema schema;
  Quadtree index;
  BinConfig bins;
};

// Columns: id, lat, lon, then attributes. Empty cells leave the attribute unset.
// Errors carry the 1-based line number.
std::shared_ptr<const Dataset> ingest_csv(std::istream& in, const BinConfig& bins, const QuadtreeOptions& index = {});

// FeatureCollection of Point features; properties become attributes.
std::shared_ptr<const Dataset> ingest_geojson(const nlohmann::json& doc, const BinConfig& bins,
                                              const QuadtreeOptions& index = {});

std::shared_ptr<const Dataset> ingest_text(std::string_view text, DatasetFormat format, const BinConfig& bins,
                                           const QuadtreeOptions& index = {});

// Format picked by extension (.csv, .json/.geojson).
std::shared_ptr<const Dataset> ingest_file(const std::filesystem::path& path, const BinConfig& bins,
                                           const QuadtreeOptions& index = {});

DatasetFormat format_for(const std::filesystem::path& path);

// Builds schema and index from raw POIs (attributes already categorical).
std::shared_ptr<const Dataset> make_dataset(std::vector<Poi> pois, std::vector<std::string> attribute_order,
                                            const BinConfig& bins, const QuadtreeOptions& index = {});

void write_csv(std::ostream& out, const Dataset& dataset);
void write_csv(std::ostream& out, const std::vector<Poi>& pois, const std::vector<std::string>& attribute_order);

}  // namespace roiscope
