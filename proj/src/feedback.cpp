#include "roiscope/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roiscope/errors.hpp"

namespace roiscope {

void FeedbackVector::update(std::span<const std::uint32_t> matched, std::span<const Poi> pois, double delta) {
  for (std::uint32_t i : matched) update(pois[i], delta);
}

void FeedbackVector::update(const Poi& poi, double delta) {
  if (!(delta > 0.0)) throw ConfigError("feedback increment must be positive");
  for (std::uint32_t f : poi.facets) raw_[f] += delta;
}

std::vector<double> FeedbackVector::normalized() const { return softmax(raw_); }

std::size_t FeedbackVector::nnz() const {
  return static_cast<std::size_t>(std::count_if(raw_.begin(), raw_.end(), [](double v) { return v > 0.0; }));
}

nlohmann::json FeedbackVector::to_json(const FacetSchema& schema, bool normalized_view) const {
  const std::vector<double> values = normalized_view ? normalized() : raw_;
  nlohmann::json out = nlohmann::json::object();
  for (std::uint32_t f = 0; f < values.size(); ++f) out[schema.label(f)] = values[f];
  return out;
}

std::vector<double> softmax(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const double peak = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / (na * nb);
}

double confidence(std::size_t nnz, double xi, std::size_t interactions) {
  if (!(xi > 0.0)) throw ConfigError("feedback frequency xi must be positive");
  if (interactions == 0) return 0.0;
  return std::min(1.0, static_cast<double>(nnz) / (xi * static_cast<double>(interactions)));
}

double confidence(const FeedbackVector& f, double xi) { return confidence(f.nnz(), xi, f.interactions()); }

std::string_view to_string(PeculiarityMode m) { return m == PeculiarityMode::literal ? "literal" : "narrative"; }

PeculiarityMode peculiarity_mode_from_string(std::string_view s) {
  if (s == "narrative") return PeculiarityMode::narrative;
  if (s == "literal") return PeculiarityMode::literal;
  throw ConfigError("unknown peculiarity mode '" + std::string(s) + "'");
}

double peculiarity(std::span<const double> normalized_feedback, const FacetVector& region, PeculiarityMode mode) {
  std::vector<double> dense(region.begin(), region.end());
  const double sim = std::clamp(cosine(normalized_feedback, dense), 0.0, 1.0);
  return mode == PeculiarityMode::literal ? sim : 1.0 - sim;
}

std::size_t highlight_budget(std::size_t k, double peculiarity, bool region_nonempty) {
  peculiarity = std::clamp(peculiarity, 0.0, 1.0);
  // The small bias keeps products like 10 * 0.7 from flooring to 6.
  auto budget = static_cast<std::size_t>(std::floor(static_cast<double>(k) * peculiarity + 1e-9));
  if (budget == 0 && region_nonempty && peculiarity > 0.0 && k > 0) budget = 1;
  return std::min(budget, k);
}

}  // namespace roiscope
