#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvor/error.hpp"

namespace tvor {

using Count = std::uint64_t;

/// Integer-keyed histogram over the consecutive keys origin..origin+bins()-1.
///
/// Empty interior bins are stored explicitly as zero, so adjacent entries of
/// counts() are always adjacent keys.
class Histogram {
public:
    Histogram(std::string label, int origin, std::vector<Count> counts)
        : label_(std::move(label)), origin_(origin), counts_(std::move(counts)) {
        if (counts_.empty()) {
            throw InvalidArgument("histogram '" + label_ + "' must have at least one bin");
        }
        for (Count c : counts_) total_ += c;
    }

    const std::string& label() const noexcept { return label_; }
    int origin() const noexcept { return origin_; }
    int last_key() const noexcept { return origin_ + static_cast<int>(counts_.size()) - 1; }
    std::span<const Count> counts() const noexcept { return counts_; }
    std::size_t bins() const noexcept { return counts_.size(); }
    Count total() const noexcept { return total_; }

    Count count_at(int key) const noexcept {
        if (key < origin_ || key > last_key()) return 0;
        return counts_[static_cast<std::size_t>(key - origin_)];
    }

    Histogram with_label(std::string label) const { return {std::move(label), origin_, counts_}; }
    Histogram with_origin(int origin) const { return {label_, origin, counts_}; }

    Histogram scaled(Count factor) const {
        std::vector<Count> out(counts_);
        for (Count& c : out) c *= factor;
        return {label_, origin_, std::move(out)};
    }

    Histogram reversed() const {
        return {label_, origin_, std::vector<Count>(counts_.rbegin(), counts_.rend())};
    }

    friend bool operator==(const Histogram&, const Histogram&) = default;

private:
    std::string label_;
    int origin_;
    std::vector<Count> counts_;
    Count total_ = 0;
};

/// Discrete total variation: sum of |x_i - x_{i-1}| over adjacent bins.
inline Count dtv(std::span<const Count> counts) noexcept {
    Count total = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        total += counts[i] > counts[i - 1] ? counts[i] - counts[i - 1] : counts[i - 1] - counts[i];
    }
    return total;
}

inline Count dtv(const Histogram& h) noexcept { return dtv(h.counts()); }

// Largest key span histogram_from_years will allocate.
inline constexpr std::int64_t max_histogram_span = 1'000'000;

/// Tallies years into a histogram covering min(years)..max(years).
inline Histogram histogram_from_years(std::span<const int> years, std::string label) {
    if (years.empty()) {
        throw NoData("cannot build histogram '" + label + "' from an empty year list");
    }
    const auto [lo, hi] = std::minmax_element(years.begin(), years.end());
    const std::int64_t span = static_cast<std::int64_t>(*hi) - *lo + 1;
    if (span > max_histogram_span) {
        throw InvalidArgument("year range of '" + label + "' spans " + std::to_string(span) +
                              " bins, more than the supported maximum");
    }
    std::vector<Count> counts(static_cast<std::size_t>(span), 0);
    for (int y : years) ++counts[static_cast<std::size_t>(y - *lo)];
    return {std::move(label), *lo, std::move(counts)};
}

/// Inverse of histogram_from_years: the sorted multiset of keys.
inline std::vector<int> expand_to_years(const Histogram& h) {
    std::vector<int> years;
    years.reserve(static_cast<std::size_t>(h.total()));
    for (std::size_t i = 0; i < h.bins(); ++i) {
        years.insert(years.end(), static_cast<std::size_t>(h.counts()[i]),
                     h.origin() + static_cast<int>(i));
    }
    return years;
}

}  // namespace tvor
