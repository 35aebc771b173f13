#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "roiscope/geo.hpp"

namespace roiscope {

// Spatial item with categorical attributes. `facets` holds the sorted flat
// facet indices of its attribute values and is filled by FacetSchema::encode.
struct Poi {
  std::string id;
  GeoPoint location;
  std::map<std::string, std::string> attributes;
  std::vector<std::uint32_t> facets;
};

// Ordered attributes, each with an ordered domain. A facet is one
// (attribute, value) pair; facets are numbered attribute by attribute.
class FacetSchema {
public:
  struct Attribute {
    std::string name;
    std::vector<std::string> domain;
  };

  FacetSchema() = default;
  explicit FacetSchema(std::vector<Attribute> attributes);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t size() const { return size_; }

  std::optional<std::uint32_t> find(std::string_view attribute, std::string_view value) const;
  // "attribute=value"
  std::string label(std::uint32_t facet) const;
  std::optional<std::uint32_t> find_label(std::string_view label) const;

  // Fills poi.facets; throws IngestError for values outside the schema.
  void encode(Poi& poi) const;

private:
  std::vector<Attribute> attributes_;
  std::vector<std::uint32_t> offsets_;
  std::unordered_map<std::string, std::uint32_t> lookup_;
  std::size_t size_ = 0;
};

using FacetVector = std::vector<std::uint8_t>;

// Binary vector with a 1 at every facet taken by at least one listed POI.
FacetVector facet_vector(std::span<const std::uint32_t> matched, std::span<const Poi> pois, std::size_t dims);

// Cosine similarity of two POIs' binary facet vectors.
double facet_cosine(const Poi& a, const Poi& b);

// Cosine between a POI's binary facet vector and a dense vector of norm `dense_norm`.
double facet_cosine(const Poi& poi, std::span<const double> dense, double dense_norm);

}  // namespace roiscope
