#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roiscope/facets.hpp"

namespace roiscope {

// Per-facet preference accumulator. Raw weights only ever grow; scoring uses
// the softmax view. Also carries the number of completed interactions.
class FeedbackVector {
public:
  FeedbackVector() = default;
  explicit FeedbackVector(std::size_t dims) : raw_(dims, 0.0) {}

  // Adds delta to every facet of every matched POI (once per occurrence).
  void update(std::span<const std::uint32_t> matched, std::span<const Poi> pois, double delta);
  void update(const Poi& poi, double delta);

  std::vector<double> normalized() const;
  // Number of strictly positive raw cells.
  std::size_t nnz() const;

  const std::vector<double>& raw() const { return raw_; }
  std::size_t size() const { return raw_.size(); }

  std::size_t interactions() const { return interactions_; }
  void count_interaction() { ++interactions_; }

  // {"attribute=value": weight} for the raw or softmax view.
  nlohmann::json to_json(const FacetSchema& schema, bool normalized_view) const;

  friend bool operator==(const FeedbackVector&, const FeedbackVector&) = default;

private:
  std::vector<double> raw_;
  std::size_t interactions_ = 0;
};

std::vector<double> softmax(std::span<const double> values);
double cosine(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);

// min(1, nnz / (xi * interactions)); 0 before the first interaction.
double confidence(std::size_t nnz, double xi, std::size_t interactions);
double confidence(const FeedbackVector& f, double xi);

enum class PeculiarityMode {
  narrative,  ///< 1 - cosine: regions already covered by F score low
  literal,    ///< cosine, as the formula is written
};

std::string_view to_string(PeculiarityMode m);
PeculiarityMode peculiarity_mode_from_string(std::string_view s);

// How unexplored a region's facet profile is relative to the normalized F.
double peculiarity(std::span<const double> normalized_feedback, const FacetVector& region, PeculiarityMode mode);

// floor(k * peculiarity), at least 1 for a non-empty region with peculiarity > 0.
std::size_t highlight_budget(std::size_t k, double peculiarity, bool region_nonempty = true);

}  // namespace roiscope
