#include <gtest/gtest.h>

#include <algorithm>

#include "property_common.hpp"
#include "utpada/rsi.hpp"

using namespace utpada;
using property::coin;
using property::kCases;
using property::pick;

namespace {

std::map<ReviewCategory, int> random_scores(std::mt19937_64& g) {
  std::map<ReviewCategory, int> m;
  for (auto c : kReviewCategories) m[c] = pick(g, 0, kMaxCategoryScore);
  return m;
}

Rational random_points(std::mt19937_64& g) { return Rational(pick(g, 0, 500), 10); }

RsiScore random_score(std::mt19937_64& g) {
  return compute_rsi(review_points(random_scores(g)), random_points(g));
}

}  // namespace

TEST(RsiProperty, RaisingAnyInputNeverLowersTheScore) {
  auto g = testing_support::rng(101);
  for (int i = 0; i < kCases; ++i) {
    auto scores = random_scores(g);
    const auto p = random_points(g);
    const auto base = compute_rsi(review_points(scores), p);

    auto raised = scores;
    const auto cat = kReviewCategories[static_cast<std::size_t>(pick(g, 0, 7))];
    raised[cat] = std::min(kMaxCategoryScore, raised[cat] + pick(g, 0, 5));
    const auto up_review = compute_rsi(review_points(raised), p);
    ASSERT_GE(up_review.value_10, base.value_10);
    ASSERT_TRUE(!base.pass || up_review.pass);

    const auto p2 = std::min(Rational(50), p + Rational(pick(g, 0, 100), 10));
    const auto up_prod = compute_rsi(review_points(scores), p2);
    ASSERT_GE(up_prod.value_10, base.value_10);
    ASSERT_TRUE(!base.pass || up_prod.pass);
  }
}

TEST(RsiProperty, ScaleIdentityAndPassRule) {
  auto g = testing_support::rng(102);
  for (int i = 0; i < kCases; ++i) {
    const auto s = random_score(g);
    ASSERT_EQ(s.value_10 * Rational(10), s.total_100);
    ASSERT_EQ(s.total_100, s.review_points + s.productivity_points);
    ASSERT_EQ(s.pass, s.value_10 >= kPassMark);
    ASSERT_GE(s.value_10, Rational(0));
    ASSERT_LE(s.value_10, Rational(10));
  }
}

TEST(RsiProperty, ExactBoundaryPassesAndAnythingBelowFails) {
  auto g = testing_support::rng(103);
  for (int i = 0; i < kCases; ++i) {
    // review in [15, 50], productivity fills the rest up to exactly 65.
    const Rational review(pick(g, 150, 500), 10);
    const Rational productivity = Rational(65) - review;
    const auto on = compute_rsi(review, productivity);
    ASSERT_EQ(on.value_10, kPassMark);
    ASSERT_TRUE(on.pass);
    const Rational eps(1, pick(g, 1, 1000000));
    if (productivity - eps >= Rational(0)) {
      const auto below = compute_rsi(review, productivity - eps);
      ASSERT_FALSE(below.pass) << review << " " << productivity - eps;
    }
  }
}

TEST(RsiProperty, ClassificationIsPermutationInvariant) {
  auto g = testing_support::rng(104);
  for (int i = 0; i < kCases; ++i) {
    std::vector<RsiScore> hist;
    const int n = pick(g, 1, 12);
    for (int k = 0; k < n; ++k) hist.push_back(random_score(g));
    const auto a = classify_participant(hist, std::nullopt);
    std::shuffle(hist.begin(), hist.end(), g);
    const auto b = classify_participant(hist, std::nullopt);
    ASSERT_EQ(a.classification, b.classification);
    ASSERT_EQ(a.mean_rsi, b.mean_rsi);
    ASSERT_EQ(a.pass_rate, b.pass_rate);
  }
}

TEST(RsiProperty, HigherScoresNeverDemote) {
  auto g = testing_support::rng(105);
  for (int i = 0; i < kCases; ++i) {
    std::vector<RsiScore> hist;
    const int n = pick(g, 1, 10);
    for (int k = 0; k < n; ++k) {
      // Bias towards the thresholds so every class shows up.
      const int tenths = coin(g, 50) ? pick(g, 60, 100) : pick(g, 0, 100);
      hist.push_back(compute_rsi(Rational(tenths * 5, 10), Rational(tenths * 5, 10)));
    }
    const auto before = classify_participant(hist, std::nullopt);
    auto better = hist;
    const auto idx = static_cast<std::size_t>(pick(g, 0, n - 1));
    const Rational total = std::min(Rational(100), better[idx].total_100 + Rational(pick(g, 0, 40)));
    better[idx] = compute_rsi(total / Rational(2), total / Rational(2));
    const auto after = classify_participant(better, std::nullopt);
    ASSERT_GE(rank(after.classification), rank(before.classification));
  }
}

TEST(RsiProperty, ProductivityPointsStayInRangeAndAreMonotone) {
  auto g = testing_support::rng(106);
  const ProductivityBenchmarks b{Rational(4), Rational(400), Rational(3), Rational(6), Rational(5)};
  for (int i = 0; i < kCases; ++i) {
    auto maybe = [&](int lo, int hi) -> std::optional<Rational> {
      if (coin(g, 15)) return std::nullopt;
      return Rational(pick(g, lo, hi));
    };
    ProductivityInputs in{maybe(0, 10), maybe(0, 1000), maybe(1, 8), maybe(1, 20), maybe(1, 15)};
    const auto p = productivity_points(in, b);
    ASSERT_GE(p, Rational(0));
    ASSERT_LE(p, Rational(50));
    auto more = in;
    more.deliverable_throughput = in.deliverable_throughput.value_or(0) + Rational(pick(g, 0, 3));
    ASSERT_GE(productivity_points(more, b), p);
    auto cheaper = in;
    if (in.lead_time_days && *in.lead_time_days > Rational(1)) {
      cheaper.lead_time_days = *in.lead_time_days - Rational(1);
      ASSERT_GE(productivity_points(cheaper, b), p);
    }
  }
}
