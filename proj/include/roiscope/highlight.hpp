#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "roiscope/facets.hpp"

namespace roiscope {

enum class HighlightAlgorithm { greedy, fuzzy };

std::string_view to_string(HighlightAlgorithm a);

struct ScoredPoi {
  std::uint32_t poi = 0;
  double relevance = 0.0;
  // Greedy: summed cosine distance to the rest of the selection.
  // Fuzzy: membership in the owning centroid.
  double contribution = 0.0;
};

// Cosine between a POI's facet vector and the normalized feedback vector.
double relevance(const Poi& poi, std::span<const double> normalized_feedback);

// Sum over unordered pairs of (1 - cosine) between facet vectors.
double pairwise_diversity(std::span<const std::uint32_t> selection, std::span<const Poi> pois);

// Matched POIs ordered by relevance, highest first; ties by POI id.
std::vector<ScoredPoi> rank_by_relevance(std::span<const std::uint32_t> matched, std::span<const Poi> pois,
                                         std::span<const double> normalized_feedback);

enum class ScanGuard {
  relevance_floor,  ///< keep scanning while the candidate's relevance >= threshold
  literal,          ///< keep scanning while similarity(candidate, top POI) <= threshold
};

struct GreedyOptions {
  double similarity_threshold = 0.1;
  double time_limit_ms = 400.0;    ///< <= 0 disables the wall-clock limit
  std::size_t max_candidates = 0;  ///< 0 = no limit on scanned candidates
  ScanGuard guard = ScanGuard::relevance_floor;
};

struct GreedyResult {
  std::vector<ScoredPoi> selection;    ///< ordered by relevance, highest first
  std::vector<double> diversity_trace; ///< initial diversity, then after each accepted swap
  std::size_t scanned = 0;
  bool timed_out = false;
};

// Starts from the k' most relevant POIs and scans the rest of the ranking in
// order. A candidate replaces the first incumbent whose swap strictly raises
// pairwise diversity. Scanning stops at the time or candidate limit, or once
// the scan guard fails.
GreedyResult greedy_highlight(std::span<const std::uint32_t> matched, std::span<const Poi> pois,
                              std::span<const double> normalized_feedback, std::size_t k_prime,
                              const GreedyOptions& options = {});

}  // namespace roiscope
