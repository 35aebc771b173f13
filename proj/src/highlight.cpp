#include "roiscope/highlight.hpp"

#include <algorithm>
#include <chrono>

#include "roiscope/feedback.hpp"

namespace roiscope {

std::string_view to_string(HighlightAlgorithm a) { return a == HighlightAlgorithm::fuzzy ? "fuzzy" : "greedy"; }

double relevance(const Poi& poi, std::span<const double> normalized_feedback) {
  return facet_cosine(poi, normalized_feedback, norm(normalized_feedback));
}

double pairwise_diversity(std::span<const std::uint32_t> selection, std::span<const Poi> pois) {
  double total = 0.0;
  for (std::size_t i = 0; i < selection.size(); ++i) {
    for (std::size_t j = i + 1; j < selection.size(); ++j) {
      total += 1.0 - facet_cosine(pois[selection[i]], pois[selection[j]]);
    }
  }
  return total;
}

std::vector<ScoredPoi> rank_by_relevance(std::span<const std::uint32_t> matched, std::span<const Poi> pois,
                                         std::span<const double> normalized_feedback) {
  const double fnorm = norm(normalized_feedback);
  std::vector<ScoredPoi> ranked;
  ranked.reserve(matched.size());
  for (std::uint32_t i : matched) ranked.push_back({i, facet_cosine(pois[i], normalized_feedback, fnorm), 0.0});
  std::sort(ranked.begin(), ranked.end(), [&](const ScoredPoi& a, const ScoredPoi& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    if (pois[a.poi].id != pois[b.poi].id) return pois[a.poi].id < pois[b.poi].id;
    return a.poi < b.poi;
  });
  return ranked;
}

GreedyResult greedy_highlight(std::span<const std::uint32_t> matched, std::span<const Poi> pois,
                              std::span<const double> normalized_feedback, std::size_t k_prime,
                              const GreedyOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();

  GreedyResult result;
  if (matched.empty() || k_prime == 0) return result;

  const std::vector<ScoredPoi> ranked = rank_by_relevance(matched, pois, normalized_feedback);
  const std::size_t size = std::min(k_prime, ranked.size());
  std::vector<ScoredPoi> chosen(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(size));

  auto dist = [&](const ScoredPoi& a, const ScoredPoi& b) { return 1.0 - facet_cosine(pois[a.poi], pois[b.poi]); };
  // Summed distance from chosen[pos] to every other member.
  auto member_share = [&](std::size_t pos, const ScoredPoi& who) {
    double s = 0.0;
    for (std::size_t h = 0; h < chosen.size(); ++h) {
      if (h != pos) s += dist(who, chosen[h]);
    }
    return s;
  };

  auto exact_diversity = [&] {
    double d = 0.0;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      for (std::size_t j = i + 1; j < chosen.size(); ++j) d += dist(chosen[i], chosen[j]);
    }
    return d;
  };
  double diversity = exact_diversity();
  result.diversity_trace.push_back(diversity);

  const Poi& top = pois[ranked.front().poi];
  for (std::size_t c = size; c < ranked.size(); ++c) {
    if (options.time_limit_ms > 0.0) {
      const std::chrono::duration<double, std::milli> spent = Clock::now() - started;
      if (spent.count() > options.time_limit_ms) {
        result.timed_out = true;
        break;
      }
    }
    if (options.max_candidates > 0 && result.scanned >= options.max_candidates) break;
    const ScoredPoi& candidate = ranked[c];
    if (options.guard == ScanGuard::relevance_floor) {
      if (candidate.relevance < options.similarity_threshold) break;
    } else if (facet_cosine(pois[candidate.poi], top) > options.similarity_threshold) {
      break;
    }
    ++result.scanned;

    for (std::size_t pos = 0; pos < chosen.size(); ++pos) {
      const double swapped = diversity - member_share(pos, chosen[pos]) + member_share(pos, candidate);
      if (swapped > diversity + 1e-12) {
        chosen[pos] = candidate;
        diversity = exact_diversity();
        result.diversity_trace.push_back(diversity);
        break;
      }
    }
  }

  for (std::size_t pos = 0; pos < chosen.size(); ++pos) chosen[pos].contribution = member_share(pos, chosen[pos]);
  std::sort(chosen.begin(), chosen.end(), [&](const ScoredPoi& a, const ScoredPoi& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    return pois[a.poi].id < pois[b.poi].id;
  });
  result.selection = std::move(chosen);
  return result;
}

}  // namespace roiscope
