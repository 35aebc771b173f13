#include "roiscope/facets.hpp"

#include <algorithm>
#include <cmath>

#include "roiscope/errors.hpp"

namespace roiscope {

FacetSchema::FacetSchema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
  for (const Attribute& a : attributes_) {
    offsets_.push_back(static_cast<std::uint32_t>(size_));
    for (const std::string& v : a.domain) {
      const bool inserted = lookup_.emplace(a.name + "=" + v, static_cast<std::uint32_t>(size_)).second;
      if (!inserted) throw ConfigError("duplicate facet " + a.name + "=" + v);
      ++size_;
    }
  }
}

std::optional<std::uint32_t> FacetSchema::find(std::string_view attribute, std::string_view value) const {
  std::string key;
  key.reserve(attribute.size() + value.size() + 1);
  key.append(attribute).append("=").append(value);
  return find_label(key);
}

std::optional<std::uint32_t> FacetSchema::find_label(std::string_view label) const {
  const auto it = lookup_.find(std::string(label));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::string FacetSchema::label(std::uint32_t facet) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), facet);
  const std::size_t a = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return attributes_[a].name + "=" + attributes_[a].domain[facet - offsets_[a]];
}

void FacetSchema::encode(Poi& poi) const {
  poi.facets.clear();
  for (const auto& [name, value] : poi.attributes) {
    const auto f = find(name, value);
    if (!f) throw IngestError("POI " + poi.id + ": value '" + value + "' of attribute '" + name + "' not in schema");
    poi.facets.push_back(*f);
  }
  std::sort(poi.facets.begin(), poi.facets.end());
}

FacetVector facet_vector(std::span<const std::uint32_t> matched, std::span<const Poi> pois, std::size_t dims) {
  FacetVector v(dims, 0);
  for (std::uint32_t i : matched) {
    for (std::uint32_t f : pois[i].facets) v[f] = 1;
  }
  return v;
}

double facet_cosine(const Poi& a, const Poi& b) {
  if (a.facets.empty() || b.facets.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.facets.begin();
  auto j = b.facets.begin();
  while (i != a.facets.end() && j != b.facets.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  return static_cast<double>(common) / std::sqrt(static_cast<double>(a.facets.size() * b.facets.size()));
}

double facet_cosine(const Poi& poi, std::span<const double> dense, double dense_norm) {
  if (poi.facets.empty() || dense_norm <= 0.0) return 0.0;
  double dot = 0.0;
  for (std::uint32_t f : poi.facets) dot += dense[f];
  return dot / (std::sqrt(static_cast<double>(poi.facets.size())) * dense_norm);
}

}  // namespace roiscope
