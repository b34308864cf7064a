#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tvor/engine.hpp"
#include "tvor/error.hpp"
#include "tvor/histogram.hpp"
#include "tvor/random.hpp"
#include "tvor/special_functions.hpp"

namespace tvor {

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

/// Bin probabilities p_1..p_n placed on the keys origin..origin+n-1.
class DiscreteDistribution {
public:
    static constexpr double sum_tolerance = 1e-12;

    explicit DiscreteDistribution(std::vector<double> probabilities, int origin = 0)
        : p_(std::move(probabilities)), origin_(origin) {
        if (p_.empty()) throw InvalidArgument("distribution needs at least one bin");
        long double sum = 0;
        for (double p : p_) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("bin probabilities must be finite and >= 0");
            sum += p;
        }
        if (std::abs(static_cast<double>(sum) - 1.0) > sum_tolerance) {
            throw InvalidArgument("bin probabilities sum to " + std::to_string(static_cast<double>(sum)) +
                                  ", not 1");
        }
    }

    /// Normalises non-negative weights.
    static DiscreteDistribution from_weights(std::vector<double> weights, int origin = 0) {
        long double sum = 0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and >= 0");
            sum += w;
        }
        if (!(sum > 0)) throw InvalidArgument("weights must not all be zero");
        for (double& w : weights) w = static_cast<double>(w / sum);
        return DiscreteDistribution(std::move(weights), origin);
    }

    static DiscreteDistribution uniform(std::size_t bins, int origin = 0) {
        if (bins == 0) throw InvalidArgument("distribution needs at least one bin");
        return DiscreteDistribution(std::vector<double>(bins, 1.0 / static_cast<double>(bins)), origin);
    }

    std::span<const double> probabilities() const noexcept { return p_; }
    std::size_t bins() const noexcept { return p_.size(); }
    int origin() const noexcept { return origin_; }
    int last_key() const noexcept { return origin_ + static_cast<int>(p_.size()) - 1; }

    friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
    std::vector<double> p_;
    int origin_;
};

/// Total variation of the bin probabilities, the asymptotic DTV per element.
inline double theoretical_dtv(const DiscreteDistribution& d) noexcept {
    const auto p = d.probabilities();
    long double total = 0;
    for (std::size_t i = 1; i < p.size(); ++i) total += std::abs(static_cast<long double>(p[i]) - p[i - 1]);
    return static_cast<double>(total);
}

/// Beta(alpha, beta) mass of each of `bins` equal-width subintervals of [0, 1].
inline DiscreteDistribution discretize_beta(double alpha, double beta, std::size_t bins, int origin = 0) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("beta shape parameters must be positive");
    if (bins < 2) throw InvalidArgument("beta discretization needs at least 2 bins");
    std::vector<double> p(bins);
    double prev = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        const double x = i + 1 == bins ? 1.0 : static_cast<double>(i + 1) / static_cast<double>(bins);
        const double cdf = special::incomplete_beta(alpha, beta, x);
        p[i] = std::max(0.0, cdf - prev);
        prev = cdf;
    }
    return DiscreteDistribution(std::move(p), origin);
}

/// Moves the distribution `offset` keys to the right. Probabilities are
/// untouched, so the theoretical DTV is identical.
inline DiscreteDistribution shift_distribution(const DiscreteDistribution& d, int offset) {
    if (offset < 0) throw InvalidArgument("shift offset must be non-negative");
    return DiscreteDistribution(std::vector<double>(d.probabilities().begin(), d.probabilities().end()),
                                d.origin() + offset);
}

/// Zero-pads the distribution to the key window [first_key, last_key].
inline DiscreteDistribution embed(const DiscreteDistribution& d, int first_key, int last_key) {
    if (first_key > d.origin() || last_key < d.last_key()) {
        throw InvalidArgument("embedding window must contain the distribution's support");
    }
    std::vector<double> p(static_cast<std::size_t>(last_key - first_key + 1), 0.0);
    std::copy(d.probabilities().begin(), d.probabilities().end(), p.begin() + (d.origin() - first_key));
    return DiscreteDistribution(std::move(p), first_key);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Inverse-CDF categorical sampler over a distribution's bins.
class CategoricalSampler {
public:
    explicit CategoricalSampler(const DiscreteDistribution& d) {
        const auto p = d.probabilities();
        cumulative_.reserve(p.size());
        long double acc = 0;
        for (double pi : p) {
            acc += pi;
            cumulative_.push_back(static_cast<double>(acc));
        }
        // Last non-empty bin absorbs rounding so no draw falls off the end.
        last_positive_ = p.size() - 1;
        while (last_positive_ > 0 && p[last_positive_] == 0.0) --last_positive_;
        for (std::size_t i = last_positive_; i < cumulative_.size(); ++i) cumulative_[i] = 2.0;
    }

    std::size_t operator()(Xoshiro256& rng) const noexcept {
        const double u = rng.uniform();
        return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                        cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
    std::size_t last_positive_ = 0;
};

/// N categorical draws tallied over the distribution's full key range.
inline Histogram sample_histogram(const DiscreteDistribution& d, Count size, std::uint64_t seed,
                                  std::string label = "sample") {
    if (size == 0) throw InvalidArgument("sample size must be at least 1");
    const CategoricalSampler sampler(d);
    Xoshiro256 rng(seed);
    std::vector<Count> counts(d.bins(), 0);
    for (Count i = 0; i < size; ++i) ++counts[sampler(rng)];
    return {std::move(label), d.origin(), std::move(counts)};
}

inline const std::vector<int>& default_heaping_digits() {
    static const std::vector<int> digits{0, 2, 5};
    return digits;
}

/// Like sample_histogram, but each draw is moved with probability `fraction`
/// to the nearest key whose last digit is in `digits` (ties go to the smaller key).
inline Histogram sample_heaped_histogram(const DiscreteDistribution& d, Count size, double fraction,
                                         std::span<const int> digits, std::uint64_t seed,
                                         std::string label = "sample") {
    if (size == 0) throw InvalidArgument("sample size must be at least 1");
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidArgument("heaping fraction must lie in [0, 1]");
    const auto is_heap_key = [&](int key) {
        const int r = ((key % 10) + 10) % 10;
        return std::find(digits.begin(), digits.end(), r) != digits.end();
    };
    // target[i]: bin index a heaped draw from bin i lands in.
    std::vector<std::size_t> target(d.bins());
    for (std::size_t i = 0; i < d.bins(); ++i) {
        target[i] = i;
        for (std::size_t dist = 0; dist < d.bins(); ++dist) {
            if (dist <= i && is_heap_key(d.origin() + static_cast<int>(i - dist))) {
                target[i] = i - dist;
                break;
            }
            if (i + dist < d.bins() && is_heap_key(d.origin() + static_cast<int>(i + dist))) {
                target[i] = i + dist;
                break;
            }
        }
    }
    const CategoricalSampler sampler(d);
    Xoshiro256 rng(seed);
    std::vector<Count> counts(d.bins(), 0);
    for (Count k = 0; k < size; ++k) {
        std::size_t bin = sampler(rng);
        if (fraction > 0.0 && rng.uniform() < fraction) bin = target[bin];
        ++counts[bin];
    }
    return {std::move(label), d.origin(), std::move(counts)};
}

// ---------------------------------------------------------------------------
// Monte Carlo estimates
// ---------------------------------------------------------------------------

struct DtvEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    Count size = 0;
};

inline DtvEstimate estimate_expected_dtv(const DiscreteDistribution& d, Count size, std::size_t trials,
                                         std::uint64_t seed) {
    if (trials < 2) throw InvalidArgument("expected-DTV estimate needs at least 2 trials");
    std::vector<double> values;
    values.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        values.push_back(static_cast<double>(dtv(sample_histogram(d, size, derive_seed(seed, t)))));
    }
    long double mean = 0;
    for (double v : values) mean += v;
    mean /= trials;
    long double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const long double var = ss / (trials - 1);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / trials)), trials, size};
}

struct ConvergencePoint {
    Count size = 0;
    double mean_abs_deviation = 0.0;  ///< mean over trials of |dtv/N - theoretical DTV|
    double std_error = 0.0;
};

/// Per-size mean |dtv/N - ||D||_V| over `trials` independent samples.
inline std::vector<ConvergencePoint> glivenko_cantelli_curve(const DiscreteDistribution& d,
                                                             std::span<const Count> sizes, std::size_t trials,
                                                             std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("convergence curve needs at least 1 trial");
    if (!std::is_sorted(sizes.begin(), sizes.end())) throw InvalidArgument("sizes must be ascending");
    const double target = theoretical_dtv(d);
    std::vector<ConvergencePoint> curve;
    curve.reserve(sizes.size());
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        std::vector<double> dev;
        dev.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            const auto h = sample_histogram(d, sizes[s], derive_seed(derive_seed(seed, s), t));
            dev.push_back(std::abs(static_cast<double>(dtv(h)) / static_cast<double>(sizes[s]) - target));
        }
        long double mean = 0;
        for (double v : dev) mean += v;
        mean /= trials;
        long double ss = 0;
        for (double v : dev) ss += (v - mean) * (v - mean);
        const double se = trials > 1 ? static_cast<double>(std::sqrt(ss / (trials - 1) / trials)) : 0.0;
        curve.push_back({sizes[s], static_cast<double>(mean), se});
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Synthetic datasets
// ---------------------------------------------------------------------------

struct HistogramSpec {
    std::string label;
    DiscreteDistribution distribution;
    Count size = 0;
    double heaping_fraction = 0.0;
};

struct SyntheticSpec {
    std::vector<HistogramSpec> histograms;
    std::vector<int> heaping_digits = default_heaping_digits();
    Count min_size_filter = 1;
};

/// Histogram i is drawn with seed derive_seed(seed, i).
inline Dataset make_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
    std::set<std::string> labels;
    for (const auto& h : spec.histograms) {
        if (h.label.empty()) throw InvalidArgument("synthetic histogram label must not be empty");
        if (!labels.insert(h.label).second) throw InvalidArgument("duplicate synthetic label '" + h.label + "'");
        if (h.size == 0) throw InvalidArgument("synthetic histogram '" + h.label + "' has size 0");
    }
    for (int digit : spec.heaping_digits) {
        if (digit < 0 || digit > 9) throw InvalidArgument("heaping digits must lie in 0..9");
    }
    std::vector<Histogram> out;
    out.reserve(spec.histograms.size());
    for (std::size_t i = 0; i < spec.histograms.size(); ++i) {
        const auto& h = spec.histograms[i];
        const auto s = derive_seed(seed, i);
        out.push_back(h.heaping_fraction > 0.0
                          ? sample_heaped_histogram(h.distribution, h.size, h.heaping_fraction,
                                                    spec.heaping_digits, s, h.label)
                          : sample_histogram(h.distribution, h.size, s, h.label));
    }
    return Dataset(std::move(out), spec.min_size_filter);
}

/// Histograms with similar but not identical smoothness: each is a discretized
/// beta with shape parameters drawn from [shape_lo, shape_hi], and sizes are
/// log-uniform in [min_size, max_size].
/// Histograms sharing one step-shaped profile: `plateaus` blocks of `plateau_width`
/// equal bins, alternating between relative heights `low` and `high`. Each block
/// height is scaled by an independent factor in [1 - jitter, 1 + jitter]. Sizes are
/// log-uniform in [min_size, max_size].
struct SameSmoothnessConfig {
    std::size_t count = 200;
    Count min_size = 100;
    Count max_size = 100'000;
    std::size_t plateaus = 4;
    std::size_t plateau_width = 5;
    double low = 1.0;
    double high = 2.5;
    double jitter = 0.1;
    int origin = 1900;
    std::string label_prefix = "list_";
};

/// Step profile with the given block heights (before normalisation).
inline DiscreteDistribution plateau_distribution(std::span<const double> heights, std::size_t width, int origin) {
    if (heights.empty() || width == 0) throw InvalidArgument("plateau profile needs blocks of positive width");
    std::vector<double> w;
    w.reserve(heights.size() * width);
    for (double h : heights) w.insert(w.end(), width, h);
    return DiscreteDistribution::from_weights(w, origin);
}

inline std::vector<double> plateau_heights(const SameSmoothnessConfig& cfg) {
    std::vector<double> h(cfg.plateaus);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = k % 2 == 0 ? cfg.low : cfg.high;
    return h;
}

inline SyntheticSpec same_smoothness_spec(const SameSmoothnessConfig& cfg, std::uint64_t seed) {
    if (cfg.min_size == 0 || cfg.max_size < cfg.min_size) throw InvalidArgument("invalid size range");
    if (!(cfg.low > 0.0) || !(cfg.high > 0.0)) throw InvalidArgument("plateau heights must be positive");
    if (!(cfg.jitter >= 0.0 && cfg.jitter < 1.0)) throw InvalidArgument("jitter must be in [0, 1)");
    Xoshiro256 rng(seed);
    SyntheticSpec spec;
    const double lo = std::log(static_cast<double>(cfg.min_size));
    const double hi = std::log(static_cast<double>(cfg.max_size));
    const auto base = plateau_heights(cfg);
    for (std::size_t i = 0; i < cfg.count; ++i) {
        auto heights = base;
        for (double& h : heights) h *= 1.0 + cfg.jitter * (2.0 * rng.uniform() - 1.0);
        const auto size = static_cast<Count>(std::llround(std::exp(lo + (hi - lo) * rng.uniform())));
        char name[32];
        std::snprintf(name, sizeof name, "%04zu", i);
        spec.histograms.push_back(
            {cfg.label_prefix + name, plateau_distribution(heights, cfg.plateau_width, cfg.origin), size, 0.0});
    }
    return spec;
}

/// Smooth histograms plus one heaped histogram with the unjittered profile.
struct PlantedOutlierConfig {
    SameSmoothnessConfig smooth{60, 200, 60'000, 4, 5, 1.0, 2.5, 0.1, 1900, "smooth_"};
    Count planted_size = 5'000;
    double heaping_fraction = 0.3;
    std::string planted_label = "planted";
};

inline SyntheticSpec planted_outlier_spec(const PlantedOutlierConfig& cfg, std::uint64_t seed) {
    auto spec = same_smoothness_spec(cfg.smooth, seed);
    const auto heights = plateau_heights(cfg.smooth);
    spec.histograms.push_back({cfg.planted_label,
                               plateau_distribution(heights, cfg.smooth.plateau_width, cfg.smooth.origin),
                               cfg.planted_size, cfg.heaping_fraction});
    return spec;
}

}  // namespace tvor
