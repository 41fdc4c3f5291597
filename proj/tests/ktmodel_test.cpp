#include <algorithm>
#include <cmath>
#include <map>
#include <vector>
#include <random>

#include <gtest/gtest.h>

#include "etac/ktmodel.hpp"
#include "etac/threshold.hpp"

namespace etac {
namespace {

TEST(KtModel, WorkedPrefix) {
    CountTable t;
    for (Symbol x : {5, 1, 3}) t.record(x);
    const KtWeights w = t.predictive(3);
    EXPECT_EQ(w.alphabet_size(), 4u);
    EXPECT_EQ(w.weight(0), 1u);
    EXPECT_EQ(w.weight(1), 3u);
    EXPECT_EQ(w.weight(2), 1u);
    EXPECT_EQ(w.weight(3), 3u);
    EXPECT_EQ(w.total(), 8u);
    // P(next = 2) = 1/8, above the sub-normalized (0 + 1/2) / (3 + 2) = 1/10.
    const double ours = static_cast<double>(w.weight(2)) / static_cast<double>(w.total());
    EXPECT_DOUBLE_EQ(ours, 0.125);
    EXPECT_GE(ours, 0.5 / (3.0 + 2.0));
}

TEST(KtModel, EmptyPrefix) {
    CountTable t;
    const KtWeights w = t.predictive(0);
    EXPECT_EQ(w.alphabet_size(), 1u);
    EXPECT_EQ(w.total(), 1u);
    EXPECT_EQ(w.find(0), 0u);
}

TEST(KtModel, Record) {
    CountTable t;
    t.record(5);
    t.record(5);
    EXPECT_EQ(t.count(5), 2u);
    EXPECT_EQ(t.observed(), 2u);
    EXPECT_THROW(t.record(0), std::invalid_argument);
}

TEST(KtModel, CensoredHistoryEntersAlphabetLater) {
    CountTable t;
    t.record(5);
    EXPECT_EQ(t.predictive(3).total(), 4u);
    for (Symbol x : {1, 2, 3, 4}) t.record(x);
    const KtWeights w = t.predictive(5);
    EXPECT_EQ(w.weight(5), 3u);
    EXPECT_EQ(w.total(), 2 * 5 + 5 + 1u);
}

// Compare the Fenwick-backed and map-walk views against a dense recount.
void check_against_recount(CountTable& t, std::uint64_t limit) {
    const KtWeights w = t.predictive(limit);
    std::uint64_t s = 0;
    for (const auto& [k, n] : t.counts()) {
        if (k <= limit) s += n;
    }
    ASSERT_EQ(t.in_alphabet_total(limit), s);
    ASSERT_EQ(w.total(), 2 * s + limit + 1);
    ASSERT_EQ(w.total() % 2, (limit + 1) % 2);
    std::uint64_t cum = 0;
    for (std::uint64_t j = 0; j <= std::min<std::uint64_t>(limit, 300); ++j) {
        ASSERT_EQ(w.cumulative(j), cum);
        ASSERT_EQ(w.weight(j) % 2, 1u);
        for (std::uint64_t t0 = cum; t0 < cum + w.weight(j); ++t0) ASSERT_EQ(w.find(t0), j);
        cum += w.weight(j);
    }
}

TEST(KtModelProperty, DenseViewsMatchRecount) {
    std::mt19937_64 rng(3);
    CountTable t;
    for (int i = 0; i < 2000; ++i) {
        t.record(1 + rng() % 150);
        if (i % 97 == 0) check_against_recount(t, rng() % 200);
    }
    EXPECT_EQ(t.observed(), 2000u);
}

TEST(KtModelProperty, SparseViewMatchesRecount) {
    std::mt19937_64 rng(4);
    CountTable t;
    for (int i = 0; i < 300; ++i) t.record(1 + rng() % 200);
    t.record(1'000'000'000);
    const std::uint64_t limit = 999'999'999;
    const KtWeights w = t.predictive(limit);
    check_against_recount(t, limit);
    // Spot-check the far end of the alphabet.
    EXPECT_EQ(w.find(w.total() - 1), limit);
    EXPECT_EQ(w.cumulative(limit), w.total() - 1);
}

TEST(KtModelProperty, RunProbabilityIsExchangeable) {
    // With a fixed alphabet and no escapes, the product of predictive
    // probabilities over a run depends only on its multiset.
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Symbol> run(20);
        for (auto& x : run) x = 1 + rng() % 4;
        auto log_prob = [](const std::vector<Symbol>& xs) {
            CountTable t;
            long double lp = 0;
            for (Symbol x : xs) {
                const KtWeights w = t.predictive(4);
                lp += std::log2(static_cast<long double>(w.weight(x))) -
                      std::log2(static_cast<long double>(w.total()));
                t.record(x);
            }
            return lp;
        };
        auto shuffled = run;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_NEAR(static_cast<double>(log_prob(run)), static_cast<double>(log_prob(shuffled)), 1e-9);
    }
}

TEST(KtModelProperty, DominatesSubNormalizedRatio) {
    std::mt19937_64 rng(12);
    CountTable t;
    ThresholdState th;
    for (int i = 1; i <= 3000; ++i) {
        const Symbol x = 1 + static_cast<Symbol>(rng() % (rng() % 2 ? 20 : 400));
        t.record(x);
        th.observe(x);
        const std::uint64_t m = th.size();
        const KtWeights w = t.predictive(m);
        for (std::uint64_t j = 0; j <= m; j += 1 + m / 16) {
            const double ours = static_cast<double>(w.weight(j)) / static_cast<double>(w.total());
            const double n_j = j == 0 ? 0.0 : static_cast<double>(t.count(j));
            const double subnormalized = (n_j + 0.5) / (i + (static_cast<double>(m) + 1) / 2);
            ASSERT_GE(ours, subnormalized * (1 - 1e-12));
        }
    }
}

}  // namespace
}  // namespace etac
