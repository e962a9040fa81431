#include <random>

#include <gtest/gtest.h>

#include "depshift/aggregate.hpp"
#include "depshift/oracle.hpp"

using namespace depshift;

namespace {

std::vector<SlotChange> slots_with(const std::vector<double>& jsds) {
  std::vector<SlotChange> out;
  for (std::size_t i = 0; i < jsds.size(); ++i) {
    SlotChange sc;
    sc.slot = "chi_s" + std::to_string(i);
    sc.jsd = jsds[i];
    out.push_back(sc);
  }
  return out;
}

std::vector<LemmaScore> lemma_scores(const std::vector<double>& values) {
  std::vector<LemmaScore> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    LemmaScore s;
    s.target_id = "t" + std::to_string(1000 + i);
    s.score = values[i];
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Aggregate, MeanOfSlotsAboveThreshold) {
  const auto s = aggregate_lemma_score(slots_with({0.6, 0.7, 0.4}), 0.5);
  EXPECT_NEAR(s.score, 0.65, 1e-12);
  EXPECT_EQ(s.slots_used.size(), 2u);
  EXPECT_EQ(s.slots_total, 3u);
}

TEST(Aggregate, NoQualifyingSlotGivesZero) {
  EXPECT_EQ(aggregate_lemma_score(slots_with({0.2, 0.3}), 0.5).score, 0.0);
  EXPECT_EQ(aggregate_lemma_score({}, 0.5).score, 0.0);
}

TEST(Aggregate, BoundaryIsExcludedUnlessInclusive) {
  EXPECT_EQ(aggregate_lemma_score(slots_with({0.5}), 0.5).score, 0.0);
  EXPECT_EQ(aggregate_lemma_score(slots_with({0.5}), 0.5, ThresholdMode::inclusive).score, 0.5);
}

TEST(Aggregate, ThresholdOutOfRange) {
  EXPECT_THROW(aggregate_lemma_score({}, 1.5), AggregateError);
  EXPECT_THROW(aggregate_lemma_score({}, -0.1), AggregateError);
}

TEST(Rank, ScoreDescendingThenId) {
  auto scores = lemma_scores({0.2, 0.9, 0.2});
  scores[0].target_id = "b";
  scores[1].target_id = "c";
  scores[2].target_id = "a";
  const auto r = rank_lemmas(scores);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(r.entries[0].target_id, "c");
  EXPECT_EQ(r.entries[1].target_id, "a");
  EXPECT_EQ(r.entries[2].target_id, "b");
  EXPECT_EQ(r.entries[2].rank, 3);
  EXPECT_THROW(rank_lemmas(std::vector<LemmaScore>{}), AggregateError);
}

TEST(Percentile, Counts) {
  EXPECT_EQ(percentile_positives(37, 0.43), 16u);
  EXPECT_EQ(percentile_positives(2, 0.43), 1u);
  EXPECT_EQ(percentile_positives(20, 0.43), 9u);
  EXPECT_EQ(percentile_positives(50, 0.43), 22u);
  for (std::size_t n = 2; n <= 100; ++n) {
    EXPECT_EQ(percentile_positives(n, 0.43), (43 * n + 50) / 100) << n;
  }
  EXPECT_THROW(percentile_positives(10, 0.0), AggregateError);
  EXPECT_THROW(percentile_positives(10, 1.0), AggregateError);
}

TEST(Percentile, TopOfRankingIsPositive) {
  const auto scores = lemma_scores({0.1, 0.9, 0.5, 0.0});
  const auto labels = classify_percentile(rank_lemmas(scores), 0.5);
  EXPECT_EQ(labels.at("t1001"), 1);
  EXPECT_EQ(labels.at("t1002"), 1);
  EXPECT_EQ(labels.at("t1000"), 0);
  EXPECT_EQ(labels.at("t1003"), 0);
}

TEST(ChangePoint, Examples) {
  const std::vector<double> a = {1, 1, 1, 0, 0, 0};
  EXPECT_EQ(best_split(a), 3u);
  const std::vector<double> b = {1, 1, 0, 0};
  EXPECT_EQ(best_split(b), 2u);
  const std::vector<double> flat = {0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(best_split(flat), 1u);
  const std::vector<double> one = {0.5};
  EXPECT_THROW(best_split(one), AggregateError);
  const auto cp = classify_changepoint(lemma_scores({0.0, 0.9, 0.8, 0.1}));
  EXPECT_EQ(cp.split, 2u);
  EXPECT_EQ(cp.labels.at("t1001"), 1);
  EXPECT_EQ(cp.labels.at("t1002"), 1);
  EXPECT_EQ(cp.labels.at("t1000"), 0);
  EXPECT_THROW(classify_changepoint(lemma_scores({0.3})), AggregateError);
}

TEST(Property, AggregateIgnoresSlotOrder) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> j(1 + rng() % 10);
    for (auto& x : j) x = u(rng);
    auto slots = slots_with(j);
    const auto a = aggregate_lemma_score(slots, 0.5);
    std::shuffle(slots.begin(), slots.end(), rng);
    const auto b = aggregate_lemma_score(slots, 0.5);
    EXPECT_EQ(a.score, b.score);
    EXPECT_EQ(a.slots_used, b.slots_used);
    EXPECT_GE(a.score, 0.0);
    EXPECT_LE(a.score, 1.0);
    if (a.score > 0) {
      EXPECT_GT(a.score, 0.5);
    }
  }
}

TEST(Property, RankingInvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + rng() % 30);
    for (auto& x : v) x = std::round(u(rng) * 20) / 20;  // plenty of ties
    auto scores = lemma_scores(v);
    const auto r1 = rank_lemmas(scores);
    for (auto& s : scores) s.score = std::sqrt(s.score) * 3 + 1;
    std::shuffle(scores.begin(), scores.end(), rng);
    const auto r2 = rank_lemmas(scores);
    for (std::size_t i = 0; i < r1.entries.size(); ++i) {
      EXPECT_EQ(r1.entries[i].target_id, r2.entries[i].target_id);
    }
  }
}

TEST(Property, ChangePointMatchesBruteForce) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> y(2 + rng() % 60);
    const int style = static_cast<int>(trial % 3);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = style == 0 ? u(rng) : style == 1 ? 0.25 : (i < y.size() / 2 ? 0.9 : 0.1);
    }
    std::sort(y.begin(), y.end(), std::greater<>());
    const std::size_t k = best_split(y);
    EXPECT_EQ(k, oracle::oracle_split(y));
    EXPECT_GE(k, 1u);
    EXPECT_LE(k, y.size() - 1);
  }
}
