#include "roiscope/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roiscope/errors.hpp"
#include "roiscope/feedback.hpp"

namespace roiscope {

namespace {

constexpr double kDistanceFloor = 1e-12;

struct Centroid {
  Vec2 position;
  std::vector<double> facets;
  double facet_norm = 0.0;
};

class Problem {
public:
  Problem(std::span<const FuzzyRegion> regions, std::span<const Poi> pois, const Viewport& viewport,
          std::span<const double> feedback, const FuzzyOptions& options, Exec exec)
      : pois_(pois), options_(options), exec_(exec), dims_(feedback.size()) {
    for (const FuzzyRegion& r : regions) pool_.insert(pool_.end(), r.matched.begin(), r.matched.end());
    std::sort(pool_.begin(), pool_.end());
    pool_.erase(std::unique(pool_.begin(), pool_.end()), pool_.end());

    const double fnorm = norm(feedback);
    Box2 box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
             {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    auto grow = [&box](const Vec2& p) {
      box.min.x = std::min(box.min.x, p.x), box.min.y = std::min(box.min.y, p.y);
      box.max.x = std::max(box.max.x, p.x), box.max.y = std::max(box.max.y, p.y);
    };
    for (std::uint32_t i : pool_) {
      const ScreenPoint s = project_to_screen(pois[i].location, viewport);
      positions_.push_back({s.x, s.y});
      relevance_.push_back(facet_cosine(pois[i], feedback, fnorm));
      grow(positions_.back());
    }
    for (const FuzzyRegion& r : regions) grow(r.centroid);
    scale_ = std::hypot(box.max.x - box.min.x, box.max.y - box.min.y);
    if (!(scale_ > 0.0)) scale_ = 1.0;
  }

  std::size_t rows() const { return pool_.size(); }
  const std::vector<std::uint32_t>& pool() const { return pool_; }

  std::vector<Centroid> initial(std::span<const FuzzyRegion> regions) const {
    std::vector<Centroid> c;
    for (const FuzzyRegion& r : regions) {
      Centroid ct;
      ct.position = r.centroid;
      ct.facets.assign(dims_, 0.0);
      for (std::uint32_t i : r.matched) {
        for (std::uint32_t f : pois_[i].facets) ct.facets[f] += 1.0 / static_cast<double>(r.matched.size());
      }
      ct.facet_norm = norm(ct.facets);
      c.push_back(std::move(ct));
    }
    return c;
  }

  double facet_cos(std::size_t row, const Centroid& c) const {
    return facet_cosine(pois_[pool_[row]], c.facets, c.facet_norm);
  }

  double distance_to(std::size_t row, const Centroid& c) const {
    const double d = (1.0 - facet_cos(row, c)) + distance(positions_[row], c.position) / scale_;
    return std::max(d, kDistanceFloor);
  }

  std::vector<double> memberships(const std::vector<Centroid>& cs) const {
    const std::size_t n = rows(), k = cs.size();
    std::vector<double> u(n * k, 0.0);
    const double power = 2.0 / (options_.fuzzifier - 1.0);
    const bool parallel = exec_ == Exec::parallel && n > 512;
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t r = 0; r < count; ++r) {
      const auto row = static_cast<std::size_t>(r);
      std::vector<double> d(k);
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        d[j] = distance_to(row, cs[j]);
        dmin = std::min(dmin, d[j]);
      }
      // Inverse-distance weights relative to the nearest centroid keep the
      // powers in range.
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        d[j] = std::pow(dmin / d[j], power);
        total += d[j];
      }
      for (std::size_t j = 0; j < k; ++j) u[row * k + j] = d[j] / total;
    }
    return u;
  }

  double objective(const std::vector<double>& u, const std::vector<Centroid>& cs) const {
    const std::size_t n = rows(), k = cs.size();
    const FuzzyWeights& w = options_.weights;
    double rel = 0.0, coh = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double mass = 0.0, r = 0.0, c = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double um = std::pow(u[i * k + j], options_.fuzzifier);
        mass += um;
        r += um * relevance_[i];
        c += um * facet_cos(i, cs[j]);
      }
      if (mass > 0.0) {
        rel += r / mass;
        coh += c / mass;
      }
    }
    rel /= static_cast<double>(k);
    coh /= static_cast<double>(k);
    return w.relevance * rel + w.cohesiveness * coh + w.representativeness * representativeness(cs);
  }

  double representativeness(const std::vector<Centroid>& cs) const {
    if (cs.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t a = 0; a < cs.size(); ++a) {
      for (std::size_t b = a + 1; b < cs.size(); ++b) total += distance(cs[a].position, cs[b].position);
    }
    const double pairs = static_cast<double>(cs.size() * (cs.size() - 1) / 2);
    return total / (scale_ * pairs);
  }

  std::vector<Centroid> update(const std::vector<double>& u, const std::vector<Centroid>& cs) const {
    const std::size_t n = rows(), k = cs.size();
    const FuzzyWeights& w = options_.weights;
    std::vector<Centroid> next = cs;
    for (std::size_t j = 0; j < k; ++j) {
      auto accumulate = [&](bool scored) {
        double mass = 0.0;
        Vec2 pos;
        std::vector<double> facets(dims_, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          double a = std::pow(u[i * k + j], options_.fuzzifier);
          if (scored) a *= w.relevance * relevance_[i] + w.cohesiveness;
          if (a <= 0.0) continue;
          mass += a;
          pos = pos + a * positions_[i];
          const auto& f = pois_[pool_[i]].facets;
          if (f.empty()) continue;
          const double unit = a / std::sqrt(static_cast<double>(f.size()));
          for (std::uint32_t idx : f) facets[idx] += unit;
        }
        if (mass > 0.0) {
          next[j].position = (1.0 / mass) * pos;
          for (double& v : facets) v /= mass;
          next[j].facet_norm = norm(facets);
          next[j].facets = std::move(facets);
        }
        return mass > 0.0;
      };
      if (!accumulate(true)) accumulate(false);
    }
    return next;
  }

  static std::vector<Centroid> blend(const std::vector<Centroid>& from, const std::vector<Centroid>& to, double t) {
    std::vector<Centroid> out = from;
    for (std::size_t j = 0; j < from.size(); ++j) {
      out[j].position = from[j].position + t * (to[j].position - from[j].position);
      for (std::size_t f = 0; f < out[j].facets.size(); ++f) {
        out[j].facets[f] = from[j].facets[f] + t * (to[j].facets[f] - from[j].facets[f]);
      }
      out[j].facet_norm = norm(out[j].facets);
    }
    return out;
  }

  double displacement(const std::vector<Centroid>& a, const std::vector<Centroid>& b) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      double dir = 0.0;
      for (std::size_t f = 0; f < dims_; ++f) {
        const double x = a[j].facet_norm > 0.0 ? a[j].facets[f] / a[j].facet_norm : 0.0;
        const double y = b[j].facet_norm > 0.0 ? b[j].facets[f] / b[j].facet_norm : 0.0;
        dir += (x - y) * (x - y);
      }
      worst = std::max(worst, distance(a[j].position, b[j].position) / scale_ + std::sqrt(dir));
    }
    return worst;
  }

  double score(std::size_t row, std::size_t j, const std::vector<Centroid>& cs) const {
    const FuzzyWeights& w = options_.weights;
    double separation = 0.0;
    if (cs.size() > 1) {
      for (std::size_t l = 0; l < cs.size(); ++l) {
        if (l != j) separation += distance(positions_[row], cs[l].position);
      }
      separation /= scale_ * static_cast<double>(cs.size() - 1);
    }
    return w.relevance * relevance_[row] + w.cohesiveness * facet_cos(row, cs[j]) + w.representativeness * separation;
  }

  double relevance(std::size_t row) const { return relevance_[row]; }

private:
  std::span<const Poi> pois_;
  FuzzyOptions options_;
  Exec exec_;
  std::size_t dims_;
  std::vector<std::uint32_t> pool_;
  std::vector<Vec2> positions_;
  std::vector<double> relevance_;
  double scale_ = 1.0;
};

double row_error(const std::vector<double>& u, std::size_t k) {
  double worst = 0.0;
  for (std::size_t r = 0; r * k < u.size(); ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += u[r * k + j];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace

FuzzyResult fuzzy_highlight(std::span<const FuzzyRegion> regions, std::span<const Poi> pois, const Viewport& viewport,
                            std::span<const double> normalized_feedback, const FuzzyOptions& options, Exec exec) {
  if (!(options.fuzzifier > 1.0)) throw ConfigError("fuzzifier must exceed 1");
  const FuzzyWeights& w = options.weights;
  if (w.relevance < 0 || w.cohesiveness < 0 || w.representativeness < 0 ||
      std::abs(w.relevance + w.cohesiveness + w.representativeness - 1.0) > 1e-9) {
    throw ConfigError("fuzzy weights must be non-negative and sum to 1");
  }

  FuzzyResult result;
  result.highlights.resize(regions.size());
  const Problem problem(regions, pois, viewport, normalized_feedback, options, exec);
  result.pool = problem.pool();
  if (regions.empty() || problem.rows() == 0) return result;

  const std::size_t k = regions.size();
  std::vector<Centroid> centroids = problem.initial(regions);
  std::vector<double> u = problem.memberships(centroids);
  double current = problem.objective(u, centroids);
  result.objective_trace.push_back(current);
  result.row_sum_error.push_back(row_error(u, k));

  while (result.iterations < options.max_iters) {
    const std::vector<Centroid> proposal = problem.update(u, centroids);
    bool accepted = false;
    for (double step = 1.0; step >= 0.125; step *= 0.5) {
      std::vector<Centroid> trial = step == 1.0 ? proposal : Problem::blend(centroids, proposal, step);
      std::vector<double> trial_u = problem.memberships(trial);
      const double value = problem.objective(trial_u, trial);
      if (value >= current) {
        const double moved = problem.displacement(centroids, trial);
        centroids = std::move(trial);
        u = std::move(trial_u);
        current = value;
        accepted = true;
        ++result.iterations;
        result.objective_trace.push_back(current);
        result.row_sum_error.push_back(row_error(u, k));
        if (moved < options.tolerance) result.converged = true;
        break;
      }
    }
    if (!accepted) result.converged = true;
    if (result.converged) break;
  }

  result.memberships = u;
  for (const Centroid& c : centroids) result.centroids.push_back(c.position);

  std::vector<std::vector<ScoredPoi>> owned(k);
  for (std::size_t row = 0; row < problem.rows(); ++row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (u[row * k + j] > u[row * k + best]) best = j;
    }
    owned[best].push_back({result.pool[row], problem.relevance(row), u[row * k + best]});
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<std::pair<double, ScoredPoi>> ranked;
    for (const ScoredPoi& s : owned[j]) {
      const auto row = static_cast<std::size_t>(
          std::lower_bound(result.pool.begin(), result.pool.end(), s.poi) - result.pool.begin());
      ranked.emplace_back(problem.score(row, j, centroids), s);
    }
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return pois[a.second.poi].id < pois[b.second.poi].id;
    });
    const std::size_t take = std::min(regions[j].k_prime, ranked.size());
    for (std::size_t i = 0; i < take; ++i) result.highlights[j].push_back(ranked[i].second);
  }
  return result;
}

}  // namespace roiscope
