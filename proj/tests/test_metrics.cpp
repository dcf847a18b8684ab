#include "seqbirds/metrics.hpp"
#include "seqbirds/synth.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace seqbirds;

namespace {

long long brute_distinct(const std::vector<Sentence>& corpus, int n) {
  std::vector<std::vector<int>> seen;
  for (const auto& s : corpus)
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i) {
      std::vector<int> gram(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i) + n);
      if (std::find(seen.begin(), seen.end(), gram) == seen.end()) seen.push_back(gram);
    }
  return static_cast<long long>(seen.size());
}

}  // namespace

TEST(Distinct, Examples) {
  const std::vector<Sentence> corpus{{1, 2, 3}, {1, 2, 2}};
  EXPECT_EQ(distinct_n(corpus, 1), 3);
  EXPECT_EQ(distinct_n(corpus, 2), 3);  // (1,2) (2,3) (2,2)
  EXPECT_EQ(distinct_n({}, 1), 0);
  EXPECT_EQ(distinct_n({{7}}, 2), 0);
  EXPECT_EQ(distinct_n({{4, 4, 4, 4}}, 2), 1);
  EXPECT_THROW(distinct_n(corpus, 3), std::invalid_argument);
  const auto r = diversity(corpus);
  EXPECT_EQ(r.n_levels, 2);
  EXPECT_EQ(r.distinct_1, 3);
  EXPECT_EQ(format_diversity_csv(r, 1), "n_levels,distinct_1,distinct_2,skipped\n2,3,3,1\n");
}

TEST(Distinct, BigramsDoNotCrossSentences) {
  EXPECT_EQ(distinct_n({{1, 2}, {3, 4}}, 2), 2);
}

TEST(Distinct, MatchesBruteForce) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> n_sent(0, 50), len(0, 30), word(0, 1 + trial * 10);
    std::vector<Sentence> corpus(static_cast<std::size_t>(n_sent(rng)));
    for (auto& s : corpus) {
      s.resize(static_cast<std::size_t>(len(rng)));
      for (auto& w : s) w = word(rng);
    }
    EXPECT_EQ(distinct_n(corpus, 1), brute_distinct(corpus, 1));
    EXPECT_EQ(distinct_n(corpus, 2), brute_distinct(corpus, 2));
    auto shuffled = corpus;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(distinct_n(shuffled, 2), distinct_n(corpus, 2));
  }
}

TEST(StabilityRate, SyntheticCorpusIsStable) {
  const auto catalog = default_catalog();
  SynthConfig cfg;
  cfg.n_levels = 40;
  cfg.seed = 3;
  const auto levels = synth_dataset(catalog, cfg);
  const auto r = stability_report(catalog, levels);
  EXPECT_EQ(r.n_levels, 40);
  EXPECT_EQ(r.n_stable, 40);
  EXPECT_EQ(r.rate, 1.0);
  EXPECT_EQ(format_stability_csv(r), "n_levels,n_stable,stability_rate\n40,40,1\n");
}

TEST(StabilityRate, FloatingObjectsLowerTheRate) {
  const auto catalog = testutil::toy_catalog();
  Level grounded, floating;
  grounded.objects = {{1, 0, -3.25, 0}};
  floating.objects = {{1, 0, 0.0, 0}};
  EXPECT_DOUBLE_EQ(stability_rate(catalog, {grounded, floating, grounded, grounded}), 0.75);
  EXPECT_THROW(stability_report(catalog, {}), std::invalid_argument);
}
