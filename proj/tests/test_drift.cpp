#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "textshift/drift.hpp"

using namespace textshift;
using testutil::make_doc;

namespace {

Explanation make_explanation(const std::vector<TokenWeight>& weights, int target = 1) {
  Explanation e;
  e.token_weights = weights;
  e.target_class = target;
  return e;
}

// Brute-force Spearman on <= 10 items: average ranks then textbook Pearson.
double naive_spearman(std::vector<double> a, std::vector<double> b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0.0, equal = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] > v[i]) ++less;  // rank 1 = largest
        if (v[j] == v[i]) ++equal;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  std::vector<double> ra = ranks(a), rb = ranks(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("align marks exactly the substituted positions") {
  auto doc = make_doc({"offers", "that", "rare", "combination"});
  auto aligned = align(doc, {});
  REQUIRE(aligned.size() == 4);
  for (const auto& t : aligned) {
    CHECK_FALSE(t.changed);
    CHECK(t.token_before == t.token_after);
  }

  std::vector<Substitution> subs{{0, "offers", "prescribes", SubstitutionKind::Synonym},
                                 {2, "rare", "sparse", SubstitutionKind::Synonym}};
  aligned = align(doc, subs);
  CHECK(aligned[0].changed);
  CHECK(aligned[0].token_after == "prescribes");
  CHECK_FALSE(aligned[1].changed);
  CHECK(aligned[2].changed);
  CHECK(aligned[2].token_after == "sparse");
  CHECK_FALSE(aligned[3].changed);

  std::vector<Substitution> oob{{9, "x", "y", SubstitutionKind::Synonym}};
  CHECK_THROWS(align(doc, oob));
}

TEST_CASE("render_transition formats argmax class and rounded percent") {
  std::array<std::string, 2> names{"Negative", "Positive"};
  CHECK(render_transition(prediction_from_p1(1.00), prediction_from_p1(0.04), names) ==
        "[[Positive (100%)]] to [[Negative (96%)]]");
  CHECK(render_transition(prediction_from_p1(0.93), prediction_from_p1(0.93), names) ==
        "[[Positive (93%)]] to [[Positive (93%)]]");
  // nearest-integer rounding at the boundary
  CHECK(render_transition(prediction_from_p1(0.005), prediction_from_p1(0.005), names) ==
        "[[Negative (100%)]] to [[Negative (100%)]]");
  CHECK(render_transition(prediction_from_p1(0.126), prediction_from_p1(0.874), names) ==
        "[[Negative (87%)]] to [[Positive (87%)]]");
}

TEST_CASE("compare: identical explanations are a fixed point") {
  auto doc = make_doc({"so", "clever", "you", "want"});
  Explanation e = make_explanation(
      {{1, "clever", 0.5}, {3, "want", -0.2}, {0, "so", 0.1}});
  Prediction p = prediction_from_p1(0.94);
  DriftReport r = compare(e, e, p, p, align(doc, {}));
  CHECK(r.topk_jaccard == 1.0);
  REQUIRE(r.spearman_rho.has_value());
  CHECK(*r.spearman_rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.sign_flips == 0);
  CHECK_FALSE(r.flipped);
  CHECK(r.confidence_delta[0] == 0.0);
  CHECK(r.confidence_delta[1] == 0.0);
}

TEST_CASE("compare: self-comparison with tied weights still gives rho 1") {
  auto doc = make_doc({"a", "b", "c"});
  Explanation e = make_explanation({{0, "a", 0.3}, {1, "b", 0.3}, {2, "c", 0.3}});
  Prediction p = prediction_from_p1(0.7);
  DriftReport r = compare(e, e, p, p, align(doc, {}));
  REQUIRE(r.spearman_rho.has_value());
  CHECK(*r.spearman_rho == 1.0);
}

TEST_CASE("compare reproduces the confidence-shift example") {
  auto doc = make_doc({"word"});
  Explanation e = make_explanation({{0, "word", 0.4}});
  Prediction before = prediction_from_p1(0.94);  // (0.06, 0.94)
  Prediction after = prediction_from_p1(0.39);   // (0.61, 0.39)
  DriftReport r = compare(e, e, before, after, align(doc, {}));
  CHECK(r.flipped);
  CHECK(r.confidence_delta[0] == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(r.confidence_delta[1] == doctest::Approx(-0.55).epsilon(1e-12));
}

TEST_CASE("compare: disjoint top-K sets give jaccard 0 and null rho") {
  auto doc = make_doc({"a", "b", "c", "d"});
  Explanation before = make_explanation({{0, "a", 0.5}, {1, "b", 0.3}});
  Explanation after = make_explanation({{2, "c", 0.4}, {3, "d", 0.2}});
  Prediction p = prediction_from_p1(0.9);
  DriftReport r = compare(before, after, p, p, align(doc, {}));
  CHECK(r.topk_jaccard == 0.0);
  CHECK_FALSE(r.spearman_rho.has_value());
}

TEST_CASE("compare: jaccard is symmetric") {
  auto doc = make_doc({"a", "b", "c", "d", "e"});
  Explanation x = make_explanation({{0, "a", 0.5}, {1, "b", 0.3}, {2, "c", 0.2}});
  Explanation y = make_explanation({{1, "b", 0.6}, {2, "c", -0.1}, {4, "e", 0.4}});
  Prediction p = prediction_from_p1(0.8);
  DriftReport xy = compare(x, y, p, p, align(doc, {}));
  DriftReport yx = compare(y, x, p, p, align(doc, {}));
  CHECK(xy.topk_jaccard == yx.topk_jaccard);
  CHECK(xy.topk_jaccard == doctest::Approx(2.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("compare counts strict sign flips above the noise floor") {
  auto doc = make_doc({"a", "b", "c", "d"});
  Explanation before = make_explanation(
      {{0, "a", 0.5}, {1, "b", -0.3}, {2, "c", 1e-12}, {3, "d", 0.2}});
  Explanation after = make_explanation(
      {{0, "a", -0.4}, {1, "b", -0.2}, {2, "c", -0.5}, {3, "d", 1e-12}});
  Prediction p = prediction_from_p1(0.8);
  DriftReport r = compare(before, after, p, p, align(doc, {}));
  // a: + -> -  counts; b: - -> -  no; c/d: below 1e-9 on one side -> no
  CHECK(r.sign_flips == 1);
}

TEST_CASE("compare fills aligned weights, zero outside top-K") {
  auto doc = make_doc({"a", "b", "c"});
  Explanation before = make_explanation({{0, "a", 0.5}});
  Explanation after = make_explanation({{2, "c", -0.3}});
  Prediction p = prediction_from_p1(0.8);
  DriftReport r = compare(before, after, p, p,
                          align(doc, {{1, "b", "x", SubstitutionKind::CharSwap}}));
  REQUIRE(r.aligned.size() == 3);
  CHECK(r.aligned[0].weight_before == 0.5);
  CHECK(r.aligned[0].weight_after == 0.0);
  CHECK(r.aligned[1].changed);
  CHECK(r.aligned[2].weight_after == -0.3);
}

TEST_CASE("spearman matches a brute-force implementation on shared positions") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> m_dist(2, 10);
    int m = m_dist(rng);
    std::vector<TokenWeight> before_w, after_w;
    std::vector<std::string> words;
    for (int i = 0; i < m; ++i) {
      words.push_back("w" + std::to_string(i));
      before_w.push_back({i, words.back(), weight(rng)});
      after_w.push_back({i, words.back(), weight(rng)});
    }
    auto doc = make_doc(words);
    DriftReport r = compare(make_explanation(before_w), make_explanation(after_w),
                            prediction_from_p1(0.7), prediction_from_p1(0.7), align(doc, {}));
    std::vector<double> a, b;
    for (int i = 0; i < m; ++i) {
      a.push_back(std::abs(before_w[static_cast<std::size_t>(i)].weight));
      b.push_back(std::abs(after_w[static_cast<std::size_t>(i)].weight));
    }
    double expected = naive_spearman(a, b);
    REQUIRE(r.spearman_rho.has_value());
    CHECK(*r.spearman_rho == doctest::Approx(expected).epsilon(1e-9));
    CHECK(*r.spearman_rho >= -1.0 - 1e-12);
    CHECK(*r.spearman_rho <= 1.0 + 1e-12);
  }
}
