#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "roiscope/errors.hpp"
#include "roiscope/facets.hpp"
#include "roiscope/feedback.hpp"
#include "roiscope/rng.hpp"

using namespace roiscope;

namespace {

FacetSchema hotel_schema() {
  return FacetSchema({{"rooms", {"1", "2", "3"}}, {"type", {"apartment", "hotel"}}});
}

Poi make_poi(const FacetSchema& schema, std::string id, std::map<std::string, std::string> attrs) {
  Poi p{std::move(id), {0, 0}, std::move(attrs), {}};
  schema.encode(p);
  return p;
}

}  // namespace

TEST_CASE("facet schema layout and labels") {
  const FacetSchema s = hotel_schema();
  CHECK(s.size() == 5);
  CHECK(s.find("rooms", "2") == 1u);
  CHECK(s.find("type", "hotel") == 4u);
  CHECK_FALSE(s.find("type", "castle"));
  CHECK(s.label(3) == "type=apartment");
  CHECK(s.find_label("rooms=3") == 2u);
  Poi bad{"x", {0, 0}, {{"type", "castle"}}, {}};
  CHECK_THROWS_AS(s.encode(bad), IngestError);
}

TEST_CASE("facet vector marks the union of matched facets") {
  const FacetSchema s = hotel_schema();
  const std::vector<Poi> pois{make_poi(s, "a", {{"rooms", "2"}, {"type", "apartment"}}),
                              make_poi(s, "b", {{"rooms", "1"}}), make_poi(s, "c", {{"rooms", "3"}})};
  CHECK(facet_vector(std::vector<std::uint32_t>{0}, pois, s.size()) == FacetVector{0, 1, 0, 1, 0});
  CHECK(facet_vector(std::vector<std::uint32_t>{}, pois, s.size()) == FacetVector{0, 0, 0, 0, 0});
  CHECK(facet_vector(std::vector<std::uint32_t>{0, 1, 2}, pois, s.size()) == FacetVector{1, 1, 1, 1, 0});
  // Union semantics: vec(A ∪ B) = vec(A) OR vec(B).
  const auto a = facet_vector(std::vector<std::uint32_t>{0}, pois, s.size());
  const auto b = facet_vector(std::vector<std::uint32_t>{1}, pois, s.size());
  const auto ab = facet_vector(std::vector<std::uint32_t>{0, 1}, pois, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(ab[i] == (a[i] | b[i]));
}

TEST_CASE("update adds delta per matched occurrence") {
  const FacetSchema s = hotel_schema();
  const std::vector<Poi> pois{make_poi(s, "a", {{"rooms", "2"}})};
  FeedbackVector f(s.size());
  f.update(std::vector<std::uint32_t>{0}, pois, 1.0);
  CHECK(f.raw()[1] == 1.0);
  f.update(std::vector<std::uint32_t>{0, 0}, pois, 1.0);
  CHECK(f.raw()[1] == 3.0);
  const FeedbackVector before = f;
  f.update(std::vector<std::uint32_t>{}, pois, 1.0);
  CHECK(f == before);
}

TEST_CASE("raw cells never decrease") {
  Rng rng(8);
  const FacetSchema s = hotel_schema();
  std::vector<Poi> pois;
  for (int i = 0; i < 30; ++i) {
    std::map<std::string, std::string> a{{"rooms", std::to_string(1 + rng.below(3))}};
    if (rng.uniform() < 0.5) a["type"] = rng.uniform() < 0.5 ? "hotel" : "apartment";
    pois.push_back(make_poi(s, "p" + std::to_string(i), a));
  }
  FeedbackVector f(s.size());
  for (int step = 0; step < 50; ++step) {
    const auto prev = f.raw();
    std::vector<std::uint32_t> m;
    for (std::size_t k = 0; k < rng.below(6); ++k) m.push_back(static_cast<std::uint32_t>(rng.below(pois.size())));
    f.update(m, pois, rng.uniform(0.1, 2));
    for (std::size_t i = 0; i < prev.size(); ++i) CHECK(f.raw()[i] >= prev[i]);
  }
}

TEST_CASE("softmax views") {
  FeedbackVector zero(4);
  for (double v : zero.normalized()) CHECK(v == doctest::Approx(0.25));
  const std::vector<double> ones{1, 1, 1, 1};
  for (double v : softmax(ones)) CHECK(v == doctest::Approx(0.25));
  const std::vector<double> dominant{20, 0, 0, 0};
  CHECK(softmax(dominant)[0] > 0.999);
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> raw;
    for (int k = 0; k < 12; ++k) raw.push_back(rng.uniform(0, 30));
    const auto sm = softmax(raw);
    const auto ref = oracle::softmax(raw);
    CHECK(std::abs(std::accumulate(sm.begin(), sm.end(), 0.0) - 1.0) <= 1e-12);
    for (std::size_t k = 0; k < sm.size(); ++k) {
      CHECK(sm[k] > 0.0);
      CHECK(sm[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("confidence follows min(1, nnz / (xi T))") {
  CHECK(std::abs(confidence(50, 7, 10) - 0.71) <= 0.005);
  CHECK(confidence(50, 7, 10) == doctest::Approx(50.0 / 70.0));
  CHECK(confidence(0, 7, 10) == 0.0);
  CHECK(confidence(1000, 7, 10) == 1.0);
  CHECK(confidence(5, 7, 0) == 0.0);
  for (std::size_t nnz = 0; nnz < 100; nnz += 7) {
    for (std::size_t t = 1; t < 20; ++t) {
      const double c = confidence(nnz, 7, t);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      CHECK(confidence(nnz + 1, 7, t) >= c);
      CHECK(confidence(nnz, 7, t + 1) <= c);
    }
  }
}

TEST_CASE("confidence of a feedback vector uses raw nonzeros and interactions") {
  FeedbackVector f(100);
  std::vector<double> raw(100, 0.0);
  const FacetSchema s({{"a", [] {
                          std::vector<std::string> d;
                          for (int i = 0; i < 100; ++i) d.push_back(std::to_string(i));
                          return d;
                        }()}});
  std::vector<Poi> pois;
  for (int i = 0; i < 50; ++i) pois.push_back(make_poi(s, std::to_string(i), {{"a", std::to_string(i)}}));
  for (std::uint32_t i = 0; i < 50; ++i) f.update(pois[i], 1.0);
  for (int i = 0; i < 10; ++i) f.count_interaction();
  CHECK(f.nnz() == 50);
  CHECK(std::abs(confidence(f, 7) - 0.71) <= 0.005);
}

TEST_CASE("peculiarity modes") {
  std::vector<double> normF{0.5, 0.5, 0.0, 0.0};
  const FacetVector same{1, 1, 0, 0}, orth{0, 0, 1, 1}, none{0, 0, 0, 0};
  CHECK(peculiarity(normF, same, PeculiarityMode::narrative) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(peculiarity(normF, same, PeculiarityMode::literal) == doctest::Approx(1.0));
  CHECK(peculiarity(normF, orth, PeculiarityMode::narrative) == doctest::Approx(1.0));
  CHECK(peculiarity(normF, none, PeculiarityMode::narrative) == 1.0);
  CHECK(peculiarity(normF, none, PeculiarityMode::literal) == 0.0);

  // Uniform softmax over 4 facets against a vector covering 2 of them:
  // cos = (2 * 0.25) / (0.5 * sqrt(2)) = sqrt(2)/2.
  FeedbackVector uniform(4);
  const auto u = uniform.normalized();
  const FacetVector half{1, 1, 0, 0};
  CHECK(peculiarity(u, half, PeculiarityMode::literal) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(peculiarity(u, half, PeculiarityMode::narrative) == doctest::Approx(1.0 - std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(peculiarity_mode_from_string("narrative") == PeculiarityMode::narrative);
  CHECK(peculiarity_mode_from_string("literal") == PeculiarityMode::literal);
}

TEST_CASE("highlight budget") {
  CHECK(highlight_budget(10, 0.71) == 7);
  CHECK(highlight_budget(10, 1.0) == 10);
  CHECK(highlight_budget(10, 0.0) == 0);
  CHECK(highlight_budget(10, 0.05) == 1);
  CHECK(highlight_budget(10, 0.05, false) == 0);
  CHECK(highlight_budget(10, 0.7) == 7);
  std::size_t last = 0;
  for (int i = 0; i <= 100; ++i) {
    const std::size_t b = highlight_budget(10, i / 100.0);
    CHECK(b >= last);
    last = b;
  }
}

TEST_CASE("transparency view is keyed by facet labels") {
  const FacetSchema s = hotel_schema();
  FeedbackVector f(s.size());
  f.update(make_poi(s, "a", {{"rooms", "2"}}), 1.0);
  const auto raw = f.to_json(s, false);
  const auto norm = f.to_json(s, true);
  CHECK(raw["rooms=2"] == 1.0);
  CHECK(raw["type=hotel"] == 0.0);
  double best = 0;
  std::string arg;
  for (const auto& [k, v] : norm.items()) {
    if (v.get<double>() > best) {
      best = v.get<double>();
      arg = k;
    }
  }
  CHECK(arg == "rooms=2");
}
