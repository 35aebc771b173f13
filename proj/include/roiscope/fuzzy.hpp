#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "roiscope/exec.hpp"
#include "roiscope/facets.hpp"
#include "roiscope/geo.hpp"
#include "roiscope/geometry.hpp"
#include "roiscope/highlight.hpp"

namespace roiscope {

struct FuzzyWeights {
  double relevance = 0.5;
  double cohesiveness = 0.25;
  double representativeness = 0.25;
};

struct FuzzyOptions {
  FuzzyWeights weights;
  double fuzzifier = 2.0;
  double tolerance = 1e-4;
  std::size_t max_iters = 100;
};

// One ROI as seen by the fuzzy highlighter.
struct FuzzyRegion {
  Vec2 centroid;                       ///< pixel-space centroid of the ROI polygon
  std::vector<std::uint32_t> matched;  ///< POI indices matched to the ROI
  std::size_t k_prime = 0;             ///< highlight budget of the ROI
};

struct FuzzyResult {
  std::vector<std::vector<ScoredPoi>> highlights;  ///< per region, best first
  std::vector<std::uint32_t> pool;                 ///< union of matched sets, ascending
  std::vector<double> memberships;                 ///< pool.size() x regions, row-major
  std::vector<Vec2> centroids;                     ///< final spatial centroids
  std::vector<double> objective_trace;             ///< composite objective per accepted iterate
  std::vector<double> row_sum_error;               ///< max |sum_j u_ij - 1| per iterate
  std::size_t iterations = 0;
  bool converged = false;

  double membership(std::size_t row, std::size_t region) const {
    return memberships[row * centroids.size() + region];
  }
};

// Fuzzy c-means over all ROIs at once, one centroid per ROI.
//
// A POI is embedded by its screen position and its facet set. The distance to
// a centroid is (1 - facet cosine) + spatial distance / L, where L is the
// diagonal of the pool's bounding box. Memberships follow the usual fuzzy
// c-means rule. Centroids move to the mean of the POIs weighted by
// u^m * (w1 * relevance + w2), which maximizes membership-weighted cohesion.
// The composite objective
//   w1 * relevance + w2 * cohesiveness + w3 * representativeness
// (per-centroid membership-weighted means, representativeness = mean pairwise
// centroid distance / L) never decreases: a step that would lower it is
// halved up to three times, and iteration stops if none is an ascent.
//
// Each POI ends up with the centroid of highest membership. Per centroid, its
// POIs are ranked by w1 * relevance + w2 * cosine to the centroid facets +
// w3 * mean distance to the other centroids / L, and the top k' are kept.
FuzzyResult fuzzy_highlight(std::span<const FuzzyRegion> regions, std::span<const Poi> pois, const Viewport& viewport,
                            std::span<const double> normalized_feedback, const FuzzyOptions& options = {},
                            Exec exec = Exec::parallel);

}  // namespace roiscope
