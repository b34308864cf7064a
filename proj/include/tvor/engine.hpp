#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tvor/error.hpp"
#include "tvor/histogram.hpp"
#include "tvor/least_squares.hpp"

namespace tvor {

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// Histograms with unique labels, filtered to N >= min_size_filter at construction.
class Dataset {
public:
    static constexpr Count default_min_size = 100;

    explicit Dataset(std::vector<Histogram> histograms, Count min_size_filter = default_min_size)
        : min_size_filter_(min_size_filter) {
        std::set<std::string_view> seen;
        for (const auto& h : histograms) {
            if (!seen.insert(h.label()).second) {
                throw InvalidArgument("duplicate histogram label '" + h.label() + "'");
            }
        }
        histograms_.reserve(histograms.size());
        for (auto& h : histograms) {
            if (h.total() >= min_size_filter_) {
                histograms_.push_back(std::move(h));
            } else {
                ++filtered_out_;
            }
        }
    }

    std::span<const Histogram> histograms() const noexcept { return histograms_; }
    std::size_t size() const noexcept { return histograms_.size(); }
    bool empty() const noexcept { return histograms_.empty(); }
    Count min_size_filter() const noexcept { return min_size_filter_; }
    /// Histograms dropped by the size filter.
    std::size_t filtered_out() const noexcept { return filtered_out_; }

    const Histogram* find(std::string_view label) const noexcept {
        for (const auto& h : histograms_) {
            if (h.label() == label) return &h;
        }
        return nullptr;
    }

private:
    std::vector<Histogram> histograms_;
    Count min_size_filter_;
    std::size_t filtered_out_ = 0;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

enum class FitMode {
    raw_ols,         ///< minimise sum (V - aN - b sqrt(N))^2
    normalized_ols,  ///< minimise sum ((V - aN - b sqrt(N)) / sqrt(N))^2
};

inline std::string_view to_string(FitMode m) noexcept {
    return m == FitMode::raw_ols ? "raw_ols" : "normalized_ols";
}

inline std::optional<FitMode> parse_fit_mode(std::string_view s) noexcept {
    if (s == "raw_ols" || s == "raw") return FitMode::raw_ols;
    if (s == "normalized_ols" || s == "normalized") return FitMode::normalized_ols;
    return std::nullopt;
}

/// Expected DTV model m = a*N + b*sqrt(N).
struct TvorModel {
    double a = 0.0;
    double b = 0.0;
    FitMode fit_mode = FitMode::raw_ols;
    std::size_t n_fitted = 0;

    double expected(double size) const noexcept { return a * size + b * std::sqrt(size); }
};

/// One (N, DTV) pair fed to the fit.
struct Observation {
    double size = 0.0;
    double dtv = 0.0;
};

inline std::vector<Observation> observations(const Dataset& ds) {
    std::vector<Observation> obs;
    obs.reserve(ds.size());
    for (const auto& h : ds.histograms()) {
        obs.push_back({static_cast<double>(h.total()), static_cast<double>(dtv(h))});
    }
    return obs;
}

inline TvorModel fit_model(std::span<const Observation> obs, FitMode mode = FitMode::raw_ols) {
    if (obs.size() < 2) {
        throw SingularFit("model fit needs at least 2 histograms, got " + std::to_string(obs.size()));
    }
    const bool distinct = std::any_of(obs.begin(), obs.end(), [&](const Observation& o) {
        return o.size != obs.front().size;
    });
    if (!distinct) throw SingularFit("model fit needs at least 2 distinct histogram sizes");

    NormalEquations2 eq;
    for (const auto& o : obs) {
        if (!(o.size > 0.0)) throw InvalidArgument("model fit requires every histogram size to be positive");
        const double root = std::sqrt(o.size);
        if (mode == FitMode::raw_ols) {
            eq.add(o.size, root, o.dtv);
        } else {
            // V/sqrt(N) regressed on (sqrt(N), 1)
            eq.add(root, 1.0, o.dtv / root);
        }
    }
    const auto [a, b] = eq.solve();
    return {a, b, mode, obs.size()};
}

inline TvorModel fit_model(const Dataset& ds, FitMode mode = FitMode::raw_ols) {
    return fit_model(observations(ds), mode);
}

// ---------------------------------------------------------------------------
// Scoring and ranking
// ---------------------------------------------------------------------------

struct ScoreRecord {
    std::string label;
    Count size = 0;
    Count dtv = 0;
    double expected = 0.0;
    double d_signed = 0.0;
    double d_abs = 0.0;
    std::size_t rank = 0;
};

/// d' = (DTV - m) / sqrt(N), kept with its sign; d_abs is its magnitude.
inline ScoreRecord score(const TvorModel& model, const Histogram& h) {
    if (h.total() == 0) throw InvalidArgument("cannot score empty histogram '" + h.label() + "'");
    ScoreRecord r;
    r.label = h.label();
    r.size = h.total();
    r.dtv = dtv(h);
    const double n = static_cast<double>(r.size);
    r.expected = model.expected(n);
    r.d_signed = (static_cast<double>(r.dtv) - r.expected) / std::sqrt(n);
    r.d_abs = std::abs(r.d_signed);
    return r;
}

/// Ranking order: descending d_abs, then descending N, then label.
inline bool ranks_before(const ScoreRecord& x, const ScoreRecord& y) noexcept {
    if (x.d_abs != y.d_abs) return x.d_abs > y.d_abs;
    if (x.size != y.size) return x.size > y.size;
    return x.label < y.label;
}

inline void assign_ranks(std::vector<ScoreRecord>& scores) {
    std::sort(scores.begin(), scores.end(), ranks_before);
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = i + 1;
}

inline std::vector<ScoreRecord> rank(const Dataset& ds, const TvorModel& model) {
    std::vector<ScoreRecord> scores;
    scores.reserve(ds.size());
    for (const auto& h : ds.histograms()) scores.push_back(score(model, h));
    assign_ranks(scores);
    return scores;
}

struct Ranking {
    TvorModel model;
    std::vector<ScoreRecord> scores;

    const ScoreRecord& top() const { return scores.front(); }

    const ScoreRecord* find(std::string_view label) const noexcept {
        for (const auto& s : scores) {
            if (s.label == label) return &s;
        }
        return nullptr;
    }
};

/// Fit on the whole dataset and rank it.
inline Ranking run_tvor(const Dataset& ds, FitMode mode = FitMode::raw_ols) {
    Ranking r{fit_model(ds, mode), {}};
    r.scores = rank(ds, r.model);
    return r;
}

// ---------------------------------------------------------------------------
// Iterative additive debias
// ---------------------------------------------------------------------------

struct DebiasPass {
    double a1 = 0.0;
    double b1 = 0.0;
};

struct DebiasResult {
    double a1 = 0.0;  ///< cumulative coefficient of sqrt(N) removed
    double b1 = 0.0;  ///< cumulative constant removed
    std::vector<DebiasPass> passes;
    bool converged = false;
    std::vector<ScoreRecord> adjusted_scores;
};

/// Repeatedly regress d_signed on (sqrt(N), 1) and subtract a1*sqrt(N) + b1
/// until both coefficients of a pass are below tol.
inline DebiasResult debias_iterative(std::vector<ScoreRecord> scores, int max_iter = 10, double tol = 1e-9) {
    if (scores.size() < 2) throw SingularFit("debias needs at least 2 scores");
    if (max_iter < 1) throw InvalidArgument("debias max_iter must be at least 1");

    DebiasResult result;
    for (int iter = 0; iter < max_iter; ++iter) {
        NormalEquations2 eq;
        for (const auto& s : scores) eq.add(std::sqrt(static_cast<double>(s.size)), 1.0, s.d_signed);
        const auto [a1, b1] = eq.solve();
        result.passes.push_back({a1, b1});
        result.a1 += a1;
        result.b1 += b1;
        for (auto& s : scores) {
            s.d_signed -= a1 * std::sqrt(static_cast<double>(s.size)) + b1;
            s.d_abs = std::abs(s.d_signed);
        }
        if (std::abs(a1) < tol && std::abs(b1) < tol) {
            result.converged = true;
            break;
        }
    }
    assign_ranks(scores);
    result.adjusted_scores = std::move(scores);
    return result;
}

}  // namespace tvor
