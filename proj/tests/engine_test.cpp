#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tvor/engine.hpp"
#include "tvor/random.hpp"
#include "tvor/simulation.hpp"

using tvor::Count;
using tvor::FitMode;
using tvor::Histogram;

namespace {

std::vector<tvor::Observation> noiseless(double a, double b, std::size_t count) {
    std::vector<tvor::Observation> obs;
    for (std::size_t i = 0; i < count; ++i) {
        const double n = 100.0 + 9900.0 * static_cast<double>(i) / static_cast<double>(count - 1);
        obs.push_back({n, a * n + b * std::sqrt(n)});
    }
    return obs;
}

tvor::Dataset smooth_dataset(std::uint64_t seed, std::size_t count = 120) {
    tvor::SameSmoothnessConfig cfg;
    cfg.count = count;
    return tvor::make_synthetic_dataset(tvor::same_smoothness_spec(cfg, seed), seed);
}

}  // namespace

TEST(Dataset, RejectsDuplicateLabels) {
    std::vector<Histogram> hs{Histogram("a", 0, {100}), Histogram("a", 0, {200})};
    EXPECT_THROW(tvor::Dataset{hs}, tvor::InvalidArgument);
}

TEST(Dataset, SizeFilter) {
    std::vector<Histogram> hs{Histogram("a", 0, {99}), Histogram("b", 0, {100}), Histogram("c", 0, {50, 60})};
    const tvor::Dataset ds(hs);
    EXPECT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.filtered_out(), 1u);
    EXPECT_EQ(ds.find("a"), nullptr);
    ASSERT_NE(ds.find("c"), nullptr);
    EXPECT_EQ(tvor::Dataset(hs, 1).size(), 3u);
}

TEST(FitMode, Parse) {
    EXPECT_EQ(tvor::parse_fit_mode("raw_ols"), FitMode::raw_ols);
    EXPECT_EQ(tvor::parse_fit_mode("normalized"), FitMode::normalized_ols);
    EXPECT_FALSE(tvor::parse_fit_mode("robust").has_value());
}

TEST(FitModel, NoiselessRecoveryBothModes) {
    const auto obs = noiseless(0.3, 1.7, 100);
    for (auto mode : {FitMode::raw_ols, FitMode::normalized_ols}) {
        const auto m = tvor::fit_model(obs, mode);
        EXPECT_NEAR(m.a, 0.3, 1e-9);
        EXPECT_NEAR(m.b, 1.7, 1e-9);
        EXPECT_EQ(m.n_fitted, 100u);
        EXPECT_EQ(m.fit_mode, mode);
    }
}

TEST(FitModel, NoisyRecoveryWithinOracleBounds) {
    tvor::Xoshiro256 rng(2024);
    std::vector<tvor::Observation> obs;
    std::vector<double> ns, vs;
    for (int i = 0; i < 500; ++i) {
        const double n = std::round(100.0 + 9900.0 * rng.uniform());
        const double v = 0.3 * n + 1.7 * std::sqrt(n) + (10.0 * rng.uniform() - 5.0);
        obs.push_back({n, v});
        ns.push_back(n);
        vs.push_back(v);
    }
    for (bool normalized : {false, true}) {
        const auto m = tvor::fit_model(obs, normalized ? FitMode::normalized_ols : FitMode::raw_ols);
        const auto ref = oracle::model_fit(ns, vs, normalized);
        EXPECT_NEAR(m.a, ref.a, 1e-9 * std::max(1.0, std::abs(ref.a)));
        EXPECT_NEAR(m.b, ref.b, 1e-8 * std::max(1.0, std::abs(ref.b)));
        EXPECT_LT(std::abs(m.a - 0.3), 4.0 * ref.se_a);
        EXPECT_LT(std::abs(m.b - 1.7), 4.0 * ref.se_b);
    }
}

TEST(FitModel, MatchesQrOracleOnSampledData) {
    const auto ds = smooth_dataset(99);
    std::vector<double> ns, vs;
    for (const auto& h : ds.histograms()) {
        ns.push_back(static_cast<double>(h.total()));
        vs.push_back(static_cast<double>(tvor::dtv(h)));
    }
    for (bool normalized : {false, true}) {
        const auto m = tvor::fit_model(ds, normalized ? FitMode::normalized_ols : FitMode::raw_ols);
        const auto ref = oracle::model_fit(ns, vs, normalized);
        EXPECT_NEAR(m.a, ref.a, 1e-9 * std::max(1.0, std::abs(ref.a)));
        EXPECT_NEAR(m.b, ref.b, 1e-8 * std::max(1.0, std::abs(ref.b)));
    }
}

TEST(FitModel, SingularInputs) {
    EXPECT_THROW(tvor::fit_model(std::vector<tvor::Observation>{{100, 5}}), tvor::SingularFit);
    EXPECT_THROW(tvor::fit_model(std::vector<tvor::Observation>{{100, 5}, {100, 7}, {100, 9}}), tvor::SingularFit);
    EXPECT_THROW(tvor::fit_model(std::vector<tvor::Observation>{}), tvor::SingularFit);
}

TEST(FitModel, BitReproducible) {
    const auto ds = smooth_dataset(5);
    const auto m1 = tvor::fit_model(ds);
    const auto m2 = tvor::fit_model(ds);
    EXPECT_EQ(m1.a, m2.a);
    EXPECT_EQ(m1.b, m2.b);
}

TEST(Score, ArithmeticIdentity) {
    const tvor::TvorModel zero{0.0, 0.0, FitMode::raw_ols, 2};
    const Histogram h("h", 0, {0, 25, 25, 50});
    ASSERT_EQ(h.total(), 100u);
    ASSERT_EQ(tvor::dtv(h), 50u);
    const auto s = tvor::score(zero, h);
    EXPECT_DOUBLE_EQ(s.d_signed, 5.0);
    EXPECT_DOUBLE_EQ(s.d_abs, 5.0);

    const tvor::TvorModel m{0.1, 2.0, FitMode::raw_ols, 2};
    EXPECT_DOUBLE_EQ(tvor::score(m, h).d_signed, (50.0 - 10.0 - 20.0) / 10.0);
}

TEST(Score, OnModelPointIsZero) {
    const Histogram h1("h1", 0, {0, 50, 0, 50}), h2("h2", 0, {0, 200, 0, 200});
    const std::vector<tvor::Observation> obs{{100, 150}, {400, 600}};
    ASSERT_EQ(tvor::dtv(h1), 150u);
    ASSERT_EQ(tvor::dtv(h2), 600u);
    const auto m = tvor::fit_model(obs);
    EXPECT_NEAR(tvor::score(m, h1).d_signed, 0.0, 1e-12);
    EXPECT_NEAR(tvor::score(m, h2).d_signed, 0.0, 1e-12);
}

TEST(Score, EmptyHistogramIsAnError) {
    const tvor::TvorModel m{0.1, 1.0, FitMode::raw_ols, 2};
    EXPECT_THROW(tvor::score(m, Histogram("z", 0, {0, 0})), tvor::InvalidArgument);
}

TEST(Score, FieldsConsistent) {
    const auto ds = smooth_dataset(8);
    const auto r = tvor::run_tvor(ds);
    for (const auto& s : r.scores) {
        EXPECT_EQ(s.d_abs, std::abs(s.d_signed));
        EXPECT_EQ(s.expected, r.model.a * static_cast<double>(s.size) + r.model.b * std::sqrt(static_cast<double>(s.size)));
    }
}

TEST(Score, InvariantUnderRelabelingBins) {
    const auto ds = smooth_dataset(13, 30);
    const auto m = tvor::fit_model(ds);
    for (const auto& h : ds.histograms()) {
        EXPECT_EQ(tvor::score(m, h).d_abs, tvor::score(m, h.with_origin(h.origin() - 400)).d_abs);
    }
}

TEST(Rank, PermutationAndOrder) {
    const auto ds = smooth_dataset(21);
    const auto r = tvor::run_tvor(ds);
    ASSERT_EQ(r.scores.size(), ds.size());
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
        EXPECT_EQ(r.scores[i].rank, i + 1);
        if (i > 0) {
            EXPECT_GE(r.scores[i - 1].d_abs, r.scores[i].d_abs);
        }
    }
    std::vector<std::string> labels;
    for (const auto& s : r.scores) labels.push_back(s.label);
    std::sort(labels.begin(), labels.end());
    EXPECT_EQ(std::adjacent_find(labels.begin(), labels.end()), labels.end());
}

TEST(Rank, IdenticalHistogramsUseTieBreak) {
    std::vector<Histogram> hs;
    for (const char* l : {"c", "a", "b"}) hs.emplace_back(l, 0, std::vector<Count>{50, 80, 20});
    hs.emplace_back("d", 0, std::vector<Count>{100, 160, 40});
    const tvor::Dataset ds(hs);
    const tvor::TvorModel m{0.0, 0.0, FitMode::raw_ols, 4};
    const auto r = tvor::rank(ds, m);
    // d has a larger d_abs (dtv/sqrt N grows); the three equal ones order by label.
    ASSERT_EQ(r.size(), 4u);
    EXPECT_EQ(r[0].label, "d");
    EXPECT_EQ(r[1].label, "a");
    EXPECT_EQ(r[2].label, "b");
    EXPECT_EQ(r[3].label, "c");
}

TEST(Rank, TieBreakPrefersLargerSize) {
    tvor::ScoreRecord x{"x", 100, 0, 0, 1.0, 1.0, 0}, y{"y", 200, 0, 0, -1.0, 1.0, 0};
    EXPECT_TRUE(tvor::ranks_before(y, x));
    EXPECT_FALSE(tvor::ranks_before(x, y));
}

TEST(Rank, InvariantUnderInputPermutation) {
    const auto ds = smooth_dataset(34, 60);
    std::vector<Histogram> hs(ds.histograms().begin(), ds.histograms().end());
    std::reverse(hs.begin(), hs.end());
    std::rotate(hs.begin(), hs.begin() + 17, hs.end());
    const auto a = tvor::run_tvor(ds).scores;
    const auto b = tvor::run_tvor(tvor::Dataset(hs)).scores;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].label, b[i].label);
        EXPECT_NEAR(a[i].d_abs, b[i].d_abs, 1e-9);
    }
}

TEST(Rank, PlantedSpikyHistogramFirst) {
    tvor::PlantedOutlierConfig cfg;
    cfg.smooth.count = 50;
    const auto ds = tvor::make_synthetic_dataset(tvor::planted_outlier_spec(cfg, 77), 77);
    const auto r = tvor::run_tvor(ds);
    EXPECT_EQ(r.top().label, "planted");
    EXPECT_GT(r.scores[0].d_abs, r.scores[1].d_abs);
}

TEST(NormalizedFit, SignedScoresAreOrthogonal) {
    const auto ds = smooth_dataset(55);
    const auto r = tvor::run_tvor(ds, FitMode::normalized_ols);
    long double s0 = 0, s1 = 0, scale0 = 0, scale1 = 0;
    for (const auto& s : r.scores) {
        const double root = std::sqrt(static_cast<double>(s.size));
        s0 += s.d_signed;
        s1 += s.d_signed * root;
        scale0 += std::abs(s.d_signed);
        scale1 += std::abs(s.d_signed) * root;
    }
    EXPECT_LT(std::abs(static_cast<double>(s0)), 1e-8 * static_cast<double>(scale0));
    EXPECT_LT(std::abs(static_cast<double>(s1)), 1e-8 * static_cast<double>(scale1));
}

TEST(Debias, NormalizedFitFirstPassIsNegligible) {
    const auto r = tvor::run_tvor(smooth_dataset(56), FitMode::normalized_ols);
    const auto d = tvor::debias_iterative(r.scores);
    ASSERT_FALSE(d.passes.empty());
    EXPECT_LT(std::abs(d.passes[0].a1), 1e-9);
    EXPECT_LT(std::abs(d.passes[0].b1), 1e-9);
    EXPECT_TRUE(d.converged);
}

TEST(Debias, RawFitSecondPassIsNegligible) {
    const auto r = tvor::run_tvor(smooth_dataset(57), FitMode::raw_ols);
    const auto d = tvor::debias_iterative(r.scores);
    ASSERT_GE(d.passes.size(), 2u);
    EXPECT_LT(std::abs(d.passes[1].a1), 1e-9);
    EXPECT_LT(std::abs(d.passes[1].b1), 1e-9);
    EXPECT_TRUE(d.converged);
    EXPECT_NEAR(d.a1, d.passes[0].a1 + d.passes[1].a1, 1e-15);
}

TEST(Debias, AlreadyZero) {
    std::vector<tvor::ScoreRecord> scores{{"a", 100, 0, 0, 0, 0, 1}, {"b", 400, 0, 0, 0, 0, 2}, {"c", 900, 0, 0, 0, 0, 3}};
    const auto d = tvor::debias_iterative(scores);
    EXPECT_EQ(d.a1, 0.0);
    EXPECT_EQ(d.b1, 0.0);
    EXPECT_EQ(d.passes.size(), 1u);
}

TEST(Debias, SubtractsExactLine) {
    std::vector<tvor::ScoreRecord> scores;
    for (Count n : {100u, 400u, 900u, 1600u}) {
        const double v = 0.5 * std::sqrt(static_cast<double>(n)) - 2.0;
        scores.push_back({"n" + std::to_string(n), n, 0, 0, v, std::abs(v), 0});
    }
    const auto d = tvor::debias_iterative(scores);
    EXPECT_NEAR(d.a1, 0.5, 1e-12);
    EXPECT_NEAR(d.b1, -2.0, 1e-12);
    for (const auto& s : d.adjusted_scores) EXPECT_NEAR(s.d_signed, 0.0, 1e-12);
}

TEST(Debias, DegenerateInputs) {
    std::vector<tvor::ScoreRecord> one{{"a", 100, 0, 0, 1, 1, 1}};
    EXPECT_THROW(tvor::debias_iterative(one), tvor::SingularFit);
    std::vector<tvor::ScoreRecord> same{{"a", 100, 0, 0, 1, 1, 1}, {"b", 100, 0, 0, 2, 2, 2}};
    EXPECT_THROW(tvor::debias_iterative(same), tvor::SingularFit);
}

TEST(Debias, TopLabelStableWithClearMargin) {
    tvor::PlantedOutlierConfig cfg;
    const auto ds = tvor::make_synthetic_dataset(tvor::planted_outlier_spec(cfg, 3), 3);
    const auto r = tvor::run_tvor(ds);
    const auto d = tvor::debias_iterative(r.scores);
    ASSERT_GT(r.scores[0].d_abs - r.scores[1].d_abs,
              2.0 * (std::abs(d.a1) * std::sqrt(6e4) + std::abs(d.b1)));
    EXPECT_EQ(d.adjusted_scores.front().label, r.top().label);
}
