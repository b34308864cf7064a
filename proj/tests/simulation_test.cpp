#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tvor/engine.hpp"
#include "tvor/random.hpp"
#include "tvor/simulation.hpp"

using tvor::Count;
using tvor::DiscreteDistribution;

TEST(Random, SplitMixReferenceValues) {
    std::uint64_t s = 0;
    EXPECT_EQ(tvor::splitmix64(s), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(tvor::splitmix64(s), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(tvor::splitmix64(s), 0x06c45d188009454fULL);
}

TEST(Random, XoshiroReferenceValues) {
    tvor::Xoshiro256 rng(42);
    EXPECT_EQ(rng(), 0x15780b2e0c2ec716ULL);
    EXPECT_EQ(rng(), 0x6104d9866d113a7eULL);
    EXPECT_EQ(rng(), 0xae17533239e499a1ULL);
    EXPECT_EQ(rng(), 0xecb8ad4703b360a1ULL);
}

TEST(Random, DerivedSeedReferenceValues) {
    EXPECT_EQ(tvor::derive_seed(20211, 0), 0x19cf86ccfaea38a4ULL);
    EXPECT_EQ(tvor::derive_seed(20211, 7), 0x5d1dd6c43cfb65e4ULL);
    EXPECT_NE(tvor::derive_seed(1, 0), tvor::derive_seed(1, 1));
    EXPECT_NE(tvor::derive_seed(1, 0), tvor::derive_seed(2, 0));
}

TEST(Random, UniformAndBelowRanges) {
    tvor::Xoshiro256 rng(3);
    std::array<int, 7> hits{};
    for (int i = 0; i < 70'000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto k = rng.below(7);
        ASSERT_LT(k, 7u);
        ++hits[k];
    }
    for (int h : hits) EXPECT_NEAR(h, 10'000, 400);
}

TEST(Distribution, Validation) {
    EXPECT_THROW(DiscreteDistribution({0.5, 0.6}), tvor::InvalidArgument);
    EXPECT_THROW(DiscreteDistribution({-0.1, 1.1}), tvor::InvalidArgument);
    EXPECT_THROW(DiscreteDistribution(std::vector<double>{}), tvor::InvalidArgument);
    EXPECT_NO_THROW(DiscreteDistribution({0.25, 0.75}));
    const auto w = DiscreteDistribution::from_weights({1, 3, 4});
    EXPECT_DOUBLE_EQ(w.probabilities()[2], 0.5);
}

TEST(TheoreticalDtv, Examples) {
    EXPECT_EQ(tvor::theoretical_dtv(DiscreteDistribution::uniform(17)), 0.0);
    EXPECT_NEAR(tvor::theoretical_dtv(DiscreteDistribution({0.1, 0.3, 0.6})), 0.5, 1e-15);
}

TEST(TheoreticalDtv, BetaMatchesQuadrature) {
    const auto d = tvor::discretize_beta(2.0, 3.0, 100);
    const auto ref = oracle::beta_bin_masses(2.0, 3.0, 100);
    double v = 0;
    for (std::size_t i = 1; i < ref.size(); ++i) v += std::abs(ref[i] - ref[i - 1]);
    EXPECT_NEAR(tvor::theoretical_dtv(d), v, 1e-12);
}

TEST(DiscretizeBeta, UniformCase) {
    const auto d = tvor::discretize_beta(1.0, 1.0, 8);
    for (double p : d.probabilities()) EXPECT_NEAR(p, 0.125, 1e-15);
}

TEST(DiscretizeBeta, Symmetric) {
    const auto d = tvor::discretize_beta(2.0, 2.0, 31);
    const auto p = d.probabilities();
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], p[p.size() - 1 - i], 1e-12);
}

TEST(DiscretizeBeta, MatchesQuadratureAndBoost) {
    for (auto [a, b] : {std::pair{2.0, 3.0}, std::pair{0.7, 1.9}, std::pair{5.0, 2.0}}) {
        const auto d = tvor::discretize_beta(a, b, 40);
        const auto ref = oracle::beta_bin_masses(a, b, 40);
        double sum = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            EXPECT_NEAR(d.probabilities()[i], ref[i], 1e-11) << a << ',' << b << " bin " << i;
            sum += d.probabilities()[i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(DiscretizeBeta, MatchesRejectionSampling) {
    // Rejection sampler under the beta(2,3) density (max 16/9 at x = 1/3) with an unrelated RNG.
    const std::size_t bins = 50;
    const auto d = tvor::discretize_beta(2.0, 3.0, bins);
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Count> tally(bins, 0);
    const Count draws = 10'000'000;
    for (Count k = 0; k < draws;) {
        const double x = unif(gen);
        const double y = unif(gen) * (16.0 / 9.0);
        if (y < 12.0 * x * (1 - x) * (1 - x)) {
            ++tally[std::min(bins - 1, static_cast<std::size_t>(x * bins))];
            ++k;
        }
    }
    for (std::size_t i = 0; i < bins; ++i) {
        const double p = d.probabilities()[i];
        const double sigma = std::sqrt(static_cast<double>(draws) * p * (1 - p));
        EXPECT_LE(std::abs(static_cast<double>(tally[i]) - static_cast<double>(draws) * p), 4.0 * sigma + 1.0)
            << "bin " << i;
    }
}

TEST(DiscretizeBeta, InvalidShape) {
    EXPECT_THROW(tvor::discretize_beta(0.0, 1.0, 10), tvor::InvalidArgument);
    EXPECT_THROW(tvor::discretize_beta(1.0, -2.0, 10), tvor::InvalidArgument);
    EXPECT_THROW(tvor::discretize_beta(1.0, 1.0, 1), tvor::InvalidArgument);
}

TEST(SampleHistogram, PointMass) {
    const auto interior = tvor::sample_histogram(DiscreteDistribution({0.0, 1.0, 0.0}), 500, 1);
    EXPECT_EQ(std::vector<Count>(interior.counts().begin(), interior.counts().end()), (std::vector<Count>{0, 500, 0}));
    EXPECT_EQ(tvor::dtv(interior), 1000u);
    const auto alone = tvor::sample_histogram(DiscreteDistribution({1.0}), 500, 1);
    EXPECT_EQ(tvor::dtv(alone), 0u);
    EXPECT_EQ(alone.total(), 500u);
}

TEST(SampleHistogram, Deterministic) {
    const auto d = tvor::discretize_beta(2.0, 3.0, 30, 1900);
    const auto a = tvor::sample_histogram(d, 5000, 77);
    const auto b = tvor::sample_histogram(d, 5000, 77);
    const auto c = tvor::sample_histogram(d, 5000, 78);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a.origin(), 1900);
    EXPECT_EQ(a.total(), 5000u);
}

TEST(SampleHistogram, LawOfLargeNumbers) {
    const auto d = tvor::discretize_beta(2.0, 3.0, 50);
    const Count n = 1'000'000;
    const auto h = tvor::sample_histogram(d, n, 2024);
    for (std::size_t i = 0; i < d.bins(); ++i) {
        const double p = d.probabilities()[i];
        const double expected = p * static_cast<double>(n);
        const double sigma = std::sqrt(expected * (1 - p));
        EXPECT_LE(std::abs(static_cast<double>(h.counts()[i]) - expected), 4.0 * sigma + 1.0) << "bin " << i;
    }
}

TEST(SampleHistogram, ZeroSizeRejected) {
    EXPECT_THROW(tvor::sample_histogram(DiscreteDistribution::uniform(3), 0, 1), tvor::InvalidArgument);
}

TEST(Heaping, TargetsNearestHeapKey) {
    // Keys 1900..1909 each with equal probability; with fraction 1 every draw moves.
    const auto d = DiscreteDistribution::uniform(10, 1900);
    const auto h = tvor::sample_heaped_histogram(d, 100'000, 1.0, tvor::default_heaping_digits(), 5);
    for (int key = 1900; key <= 1909; ++key) {
        const int last = key % 10;
        if (last != 0 && last != 2 && last != 5) {
            EXPECT_EQ(h.count_at(key), 0u) << key;
        }
    }
    // 1900 <- {0, 1}, 1902 <- {2, 3}, 1905 <- {4, 5, 6, 7, 8, 9}; 1910 lies outside the range.
    const double per_key = 10'000.0;
    EXPECT_NEAR(static_cast<double>(h.count_at(1900)), 2 * per_key, 600);
    EXPECT_NEAR(static_cast<double>(h.count_at(1902)), 2 * per_key, 600);
    EXPECT_NEAR(static_cast<double>(h.count_at(1905)), 6 * per_key, 900);
}

TEST(Heaping, ZeroFractionIsPlainSampling) {
    const auto d = tvor::discretize_beta(2.0, 2.0, 40, 1880);
    const auto plain = tvor::sample_histogram(d, 3000, 9, "x");
    const auto heaped = tvor::sample_heaped_histogram(d, 3000, 0.0, tvor::default_heaping_digits(), 9, "x");
    EXPECT_EQ(plain, heaped);
}

TEST(Heaping, InvalidFraction) {
    const auto d = DiscreteDistribution::uniform(5);
    EXPECT_THROW(tvor::sample_heaped_histogram(d, 10, 1.5, tvor::default_heaping_digits(), 1), tvor::InvalidArgument);
}

TEST(Shift, IdentityAndInvariance) {
    const auto d = tvor::discretize_beta(2.0, 3.0, 25, 10);
    EXPECT_EQ(tvor::shift_distribution(d, 0), d);
    for (int off : {1, 7, 300}) {
        const auto s = tvor::shift_distribution(d, off);
        EXPECT_EQ(tvor::theoretical_dtv(s), tvor::theoretical_dtv(d));
        EXPECT_EQ(s.origin(), d.origin() + off);
        const auto hs = tvor::sample_histogram(s, 4000, 31);
        const auto hd = tvor::sample_histogram(d, 4000, 31);
        EXPECT_EQ(tvor::dtv(hs), tvor::dtv(hd));
    }
    EXPECT_THROW(tvor::shift_distribution(d, -1), tvor::InvalidArgument);
}

TEST(Shift, EmbeddingPreservesTheoreticalDtvWhenEdgesAreZero) {
    const DiscreteDistribution d({0.0, 0.2, 0.5, 0.3, 0.0}, 3);
    const auto e = tvor::embed(d, 0, 12);
    EXPECT_EQ(e.bins(), 13u);
    EXPECT_EQ(e.probabilities()[4], 0.2);
    EXPECT_DOUBLE_EQ(tvor::theoretical_dtv(e), tvor::theoretical_dtv(d));
    EXPECT_THROW(tvor::embed(d, 4, 12), tvor::InvalidArgument);
}

TEST(ExpectedDtv, SingleDrawFromStorageConvention) {
    // One draw from 5 equal bins: dtv is 1 at either edge and 2 inside, so E = 0.4*1 + 0.6*2 = 1.6.
    const auto est = tvor::estimate_expected_dtv(DiscreteDistribution::uniform(5), 1, 20'000, 8);
    EXPECT_NEAR(est.mean, 1.6, 4.0 * est.std_error);
    EXPECT_LE(est.mean, 2.0);
    EXPECT_GT(est.std_error, 0.0);
}

TEST(ExpectedDtv, BoundedByLinearPlusRootTerm) {
    const auto d = tvor::discretize_beta(2.0, 3.0, 50);
    const double v = tvor::theoretical_dtv(d);
    double c = 0;
    for (Count n : {100u, 1000u, 10'000u}) {
        const auto est = tvor::estimate_expected_dtv(d, n, 30, n);
        c = std::max(c, (est.mean - v * static_cast<double>(n)) / std::sqrt(static_cast<double>(n)));
        EXPECT_LE(est.mean, 2.0 * static_cast<double>(n));
    }
    const Count held_out = 30'000;
    const auto est = tvor::estimate_expected_dtv(d, held_out, 30, 99);
    EXPECT_LE(est.mean, v * static_cast<double>(held_out) + c * std::sqrt(static_cast<double>(held_out)));
}

TEST(ExpectedDtv, UniformScalesWithRootN) {
    const auto d = DiscreteDistribution::uniform(20);
    std::vector<double> ratios;
    for (Count n : {1000u, 10'000u, 100'000u}) {
        const auto est = tvor::estimate_expected_dtv(d, n, 40, 17);
        ratios.push_back(est.mean / std::sqrt(static_cast<double>(n)));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    EXPECT_LT((*hi - *lo) / *lo, 0.2);
}

TEST(ExpectedDtv, NeedsTwoTrials) {
    EXPECT_THROW(tvor::estimate_expected_dtv(DiscreteDistribution::uniform(3), 10, 1, 1), tvor::InvalidArgument);
}

TEST(Convergence, BetaDeviationDecreases) {
    const auto d = tvor::discretize_beta(2.0, 3.0, 50);
    const std::vector<Count> sizes{10, 100, 1000, 10'000, 100'000};
    const auto curve = tvor::glivenko_cantelli_curve(d, sizes, 50, 2);
    ASSERT_EQ(curve.size(), sizes.size());
    for (std::size_t i = 1; i < curve.size(); ++i) {
        EXPECT_LT(curve[i].mean_abs_deviation, curve[i - 1].mean_abs_deviation) << sizes[i];
    }
}

TEST(Convergence, FlatDistributionGoesToZero) {
    const auto d = DiscreteDistribution::uniform(10);
    const std::vector<Count> sizes{100, 10'000, 1'000'000};
    const auto curve = tvor::glivenko_cantelli_curve(d, sizes, 10, 4);
    EXPECT_LT(curve.back().mean_abs_deviation, 0.01);
    EXPECT_LT(curve.back().mean_abs_deviation, curve.front().mean_abs_deviation);
}

TEST(Convergence, SingleSizeAndOrdering) {
    const auto d = DiscreteDistribution::uniform(4);
    EXPECT_EQ(tvor::glivenko_cantelli_curve(d, std::vector<Count>{50}, 5, 1).size(), 1u);
    EXPECT_THROW(tvor::glivenko_cantelli_curve(d, std::vector<Count>{50, 10}, 5, 1), tvor::InvalidArgument);
}

TEST(Synthetic, PlainSpecMatchesDirectSampling) {
    const auto d = tvor::discretize_beta(2.0, 3.0, 30, 1900);
    tvor::SyntheticSpec spec;
    spec.histograms = {{"a", d, 300, 0.0}, {"b", d, 500, 0.0}};
    const auto ds = tvor::make_synthetic_dataset(spec, 10);
    EXPECT_EQ(ds.histograms()[0], tvor::sample_histogram(d, 300, tvor::derive_seed(10, 0), "a"));
    EXPECT_EQ(ds.histograms()[1], tvor::sample_histogram(d, 500, tvor::derive_seed(10, 1), "b"));
}

TEST(Synthetic, RejectsBadSpecs) {
    const auto d = DiscreteDistribution::uniform(5);
    tvor::SyntheticSpec dup;
    dup.histograms = {{"a", d, 10, 0.0}, {"a", d, 10, 0.0}};
    EXPECT_THROW(tvor::make_synthetic_dataset(dup, 1), tvor::InvalidArgument);
    tvor::SyntheticSpec zero;
    zero.histograms = {{"a", d, 0, 0.0}};
    EXPECT_THROW(tvor::make_synthetic_dataset(zero, 1), tvor::InvalidArgument);
    tvor::SyntheticSpec digits;
    digits.histograms = {{"a", d, 10, 0.1}};
    digits.heaping_digits = {12};
    EXPECT_THROW(tvor::make_synthetic_dataset(digits, 1), tvor::InvalidArgument);
}

TEST(Synthetic, HeapedHistogramHasLargestScore) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto ds = tvor::make_synthetic_dataset(tvor::planted_outlier_spec({}, seed), seed);
        EXPECT_EQ(ds.size(), 61u);
        const auto r = tvor::run_tvor(ds);
        EXPECT_EQ(r.top().label, "planted") << "seed " << seed;
    }
}

TEST(Synthetic, SameSmoothnessSizesAndLabels) {
    tvor::SameSmoothnessConfig cfg;
    const auto spec = tvor::same_smoothness_spec(cfg, 6);
    ASSERT_EQ(spec.histograms.size(), cfg.count);
    EXPECT_EQ(spec.histograms.front().label, "list_0000");
    for (const auto& h : spec.histograms) {
        EXPECT_GE(h.size, cfg.min_size);
        EXPECT_LE(h.size, cfg.max_size);
        EXPECT_EQ(h.distribution.bins(), cfg.plateaus * cfg.plateau_width);
    }
    cfg.max_size = 10;
    EXPECT_THROW(tvor::same_smoothness_spec(cfg, 6), tvor::InvalidArgument);
}
