#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvor/engine.hpp"
#include "tvor/error.hpp"
#include "tvor/histogram.hpp"
#include "tvor/least_squares.hpp"
#include "tvor/special_functions.hpp"

namespace tvor {

// ---------------------------------------------------------------------------
// Correlation and regression
// ---------------------------------------------------------------------------

inline double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("correlation inputs differ in length");
    if (xs.size() < 2) throw InvalidArgument("correlation needs at least 2 points");
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    long double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const long double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0) throw InvalidArgument("correlation is undefined for zero-variance input");
    const long double r = sxy / std::sqrt(sxx * syy);
    return static_cast<double>(std::clamp(r, -1.0L, 1.0L));
}

struct RegressionLine {
    double slope = 0.0;
    double intercept = 0.0;
    double r = 0.0;  ///< Pearson correlation of the fitted inputs
    std::size_t n = 0;

    double operator()(double x) const noexcept { return slope * x + intercept; }
};

/// Ordinary least-squares line y = slope*x + intercept.
inline RegressionLine fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("fit_line inputs differ in length");
    if (xs.size() < 2) throw SingularFit("fit_line needs at least 2 points");
    // Centre x so the normal equations stay well conditioned for large sizes.
    long double mean = 0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    const auto shift = static_cast<double>(mean);

    NormalEquations2 eq;
    for (std::size_t i = 0; i < xs.size(); ++i) eq.add(xs[i] - shift, 1.0, ys[i]);
    const auto [slope, centred_intercept] = eq.solve();

    RegressionLine line;
    line.slope = slope;
    line.intercept = centred_intercept - slope * shift;
    line.n = xs.size();
    const bool constant_y = std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });
    line.r = constant_y ? 0.0 : pearson_correlation(xs, ys);
    return line;
}

enum class ScoreConvention { signed_score, absolute_score };

inline std::string_view to_string(ScoreConvention c) noexcept {
    return c == ScoreConvention::signed_score ? "signed" : "absolute";
}

struct BiasReport {
    ScoreConvention convention = ScoreConvention::signed_score;
    RegressionLine line;
    double correlation = 0.0;
};

inline std::vector<double> sizes_of(std::span<const ScoreRecord> scores) {
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& s : scores) out.push_back(static_cast<double>(s.size));
    return out;
}

inline std::vector<double> values_of(std::span<const ScoreRecord> scores, ScoreConvention c) {
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& s : scores) out.push_back(c == ScoreConvention::signed_score ? s.d_signed : s.d_abs);
    return out;
}

/// Correlation and regression line of the score against histogram size.
inline BiasReport bias_report(std::span<const ScoreRecord> scores, ScoreConvention convention) {
    if (scores.size() < 2) throw InvalidArgument("bias report needs at least 2 scores");
    const auto xs = sizes_of(scores);
    const auto ys = values_of(scores, convention);
    BiasReport rep;
    rep.convention = convention;
    rep.line = fit_line(xs, ys);
    rep.correlation = rep.line.r;
    return rep;
}

/// Line of d_abs against N over the k largest histograms only.
inline RegressionLine largest_subset_slope(std::span<const ScoreRecord> scores, std::size_t k) {
    if (k < 2 || k > scores.size()) {
        throw InvalidArgument("largest_subset_slope needs 2 <= k <= " + std::to_string(scores.size()));
    }
    std::vector<ScoreRecord> sorted(scores.begin(), scores.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const ScoreRecord& x, const ScoreRecord& y) {
        if (x.size != y.size) return x.size > y.size;
        return x.label < y.label;
    });
    sorted.resize(k);
    const auto xs = sizes_of(sorted);
    const auto ys = values_of(sorted, ScoreConvention::absolute_score);
    return fit_line(xs, ys);
}

// ---------------------------------------------------------------------------
// Division "renormalization"
// ---------------------------------------------------------------------------

struct RenormalizedScores {
    // The transform divides |d'| by a linear function of N. It is only here to
    // reproduce and inspect that procedure, not as a scoring method.
    static constexpr bool endorsed = false;
    RegressionLine line;
    std::vector<ScoreRecord> scores;  ///< d_abs replaced by d_abs / (slope*N + intercept), re-ranked
};

inline RenormalizedScores renormalize_demo(std::span<const ScoreRecord> scores, const RegressionLine& line) {
    RenormalizedScores out;
    out.line = line;
    out.scores.assign(scores.begin(), scores.end());
    for (auto& s : out.scores) {
        const double denom = line(static_cast<double>(s.size));
        if (!(denom > 0.0)) {
            throw InvalidArgument("renormalization denominator is not positive for histogram '" + s.label +
                                  "' (N = " + std::to_string(s.size) + ")");
        }
        s.d_abs /= denom;
        s.d_signed /= denom;
    }
    assign_ranks(out.scores);
    return out;
}

// ---------------------------------------------------------------------------
// IQR outliers
// ---------------------------------------------------------------------------

/// Quantile by linear interpolation at zero-based position p*(n-1) of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InvalidArgument("quantile of empty data");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct LabeledValue {
    std::string label;
    double value = 0.0;
};

struct IqrVerdict {
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double multiplier = 1.5;
    double upper_fence = 0.0;
    std::vector<std::string> outlier_labels;  ///< in input order
};

/// Flags values strictly above q3 + k*iqr.
inline IqrVerdict iqr_outliers(std::span<const LabeledValue> values, double k = 1.5) {
    if (values.size() < 4) throw InvalidArgument("IQR outlier test needs at least 4 values");
    if (!(k >= 0.0)) throw InvalidArgument("IQR multiplier must be non-negative");
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (const auto& v : values) sorted.push_back(v.value);
    std::sort(sorted.begin(), sorted.end());

    IqrVerdict v;
    v.multiplier = k;
    v.q1 = quantile_sorted(sorted, 0.25);
    v.q3 = quantile_sorted(sorted, 0.75);
    v.iqr = v.q3 - v.q1;
    v.upper_fence = v.q3 + k * v.iqr;
    for (const auto& lv : values) {
        if (lv.value > v.upper_fence) v.outlier_labels.push_back(lv.label);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Pearson chi-square against the uniform distribution
// ---------------------------------------------------------------------------

struct ChiSquareResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t dof = 0;
    Count total = 0;
};

/// Statistic sum (x_i - N/n)^2 / (N/n), evaluated as (n*sum x_i^2 - N^2) / N with
/// an exact integer numerator, so scaling the counts by c scales it by c.
inline ChiSquareResult chi_square_uniform(const Histogram& h) {
    if (h.total() == 0) throw InvalidArgument("chi-square test of empty histogram '" + h.label() + "'");
    if (h.bins() < 2) throw InvalidArgument("chi-square test needs at least 2 bins");
    using Wide = unsigned __int128;
    Wide sum_sq = 0;
    for (Count c : h.counts()) sum_sq += static_cast<Wide>(c) * c;
    const Wide n = h.bins();
    const Wide total = h.total();
    const Wide numerator = n * sum_sq - total * total;  // >= 0 by Cauchy-Schwarz

    ChiSquareResult r;
    r.total = h.total();
    r.dof = h.bins() - 1;
    r.statistic = static_cast<double>(static_cast<long double>(numerator) / static_cast<long double>(total));
    r.p_value = special::chi_square_sf(r.statistic, static_cast<double>(r.dof));
    return r;
}

/// Near-uniform 10-bin shape totalling 5000: every bin is 500 plus a fixed
/// alternating ripple of at most 3%. Its chi-square statistic is exactly 2.5.
inline Histogram near_uniform_fixture(std::string label = "near_uniform") {
    return {std::move(label), 1, {515, 485, 514, 486, 510, 490, 510, 490, 502, 498}};
}

// ---------------------------------------------------------------------------
// Threshold sweep
// ---------------------------------------------------------------------------

struct SweepEntry {
    Count threshold = 0;
    std::size_t included_count = 0;
    std::optional<std::string> top_label;  ///< empty when skipped
    double top_d_abs = 0.0;
    std::string skip_reason;

    bool skipped() const noexcept { return !top_label.has_value(); }
};

struct SweepReport {
    std::vector<SweepEntry> entries;  ///< ascending threshold

    std::size_t count_top(std::string_view label) const noexcept {
        return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const SweepEntry& e) {
            return e.top_label && *e.top_label == label;
        }));
    }
};

/// For each unique size, keep histograms with N >= size, refit and record the top label.
inline SweepReport threshold_sweep(const Dataset& ds, FitMode mode = FitMode::raw_ols) {
    if (ds.empty()) throw NoData("threshold sweep over an empty dataset");
    // DTV is computed once; each threshold refits over the surviving (N, DTV) pairs.
    const auto all_obs = observations(ds);
    const auto histograms = ds.histograms();
    std::set<Count> unique_sizes;
    for (const auto& h : histograms) unique_sizes.insert(h.total());

    SweepReport report;
    report.entries.reserve(unique_sizes.size());
    std::vector<Observation> kept;
    std::vector<std::size_t> kept_index;
    for (Count threshold : unique_sizes) {
        kept.clear();
        kept_index.clear();
        for (std::size_t i = 0; i < histograms.size(); ++i) {
            if (histograms[i].total() >= threshold) {
                kept.push_back(all_obs[i]);
                kept_index.push_back(i);
            }
        }
        SweepEntry e;
        e.threshold = threshold;
        e.included_count = kept.size();
        if (kept.size() < 2) {
            e.skip_reason = "fewer than 2 histograms";
        } else {
            try {
                const auto model = fit_model(kept, mode);
                std::optional<ScoreRecord> best;
                for (std::size_t i : kept_index) {
                    auto s = score(model, histograms[i]);
                    if (!best || ranks_before(s, *best)) best = std::move(s);
                }
                e.top_label = best->label;
                e.top_d_abs = best->d_abs;
            } catch (const SingularFit& ex) {
                e.skip_reason = ex.what();
            }
        }
        report.entries.push_back(std::move(e));
    }
    return report;
}

}  // namespace tvor
