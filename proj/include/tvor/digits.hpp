#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvor/error.hpp"
#include "tvor/histogram.hpp"

namespace tvor {

/// Tally of terminal digits 0-9.
struct DigitProfile {
    std::array<Count, 10> counts_by_last_digit{};

    Count total() const noexcept {
        Count t = 0;
        for (Count c : counts_by_last_digit) t += c;
        return t;
    }

    Count operator[](std::size_t digit) const noexcept { return counts_by_last_digit[digit]; }

    friend bool operator==(const DigitProfile&, const DigitProfile&) = default;
};

// Non-negative remainder, so -1901 ends in 9 rather than -1.
inline int last_digit(std::int64_t value) noexcept {
    const auto r = static_cast<int>(value % 10);
    return r < 0 ? r + 10 : r;
}

inline DigitProfile last_digit_profile(std::span<const int> years) noexcept {
    DigitProfile p;
    for (int y : years) ++p.counts_by_last_digit[static_cast<std::size_t>(last_digit(y))];
    return p;
}

inline DigitProfile last_digit_profile(const Histogram& h) noexcept {
    DigitProfile p;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        p.counts_by_last_digit[static_cast<std::size_t>(last_digit(h.origin() + static_cast<std::int64_t>(i)))] +=
            h.counts()[i];
    }
    return p;
}

// ---------------------------------------------------------------------------
// Whipple's index
// ---------------------------------------------------------------------------

enum class WhippleClass { highly_accurate, fairly_accurate, approximate, rough, very_rough_bad };

inline std::string_view to_string(WhippleClass c) noexcept {
    switch (c) {
    case WhippleClass::highly_accurate: return "highly_accurate";
    case WhippleClass::fairly_accurate: return "fairly_accurate";
    case WhippleClass::approximate: return "approximate";
    case WhippleClass::rough: return "rough";
    case WhippleClass::very_rough_bad: return "very_rough_bad";
    }
    return "unknown";
}

/// UN banding of the index (percentage scale).
inline WhippleClass classify_whipple(double index) noexcept {
    if (index < 105.0) return WhippleClass::highly_accurate;
    if (index < 110.0) return WhippleClass::fairly_accurate;
    if (index < 125.0) return WhippleClass::approximate;
    if (index < 175.0) return WhippleClass::rough;
    return WhippleClass::very_rough_bad;
}

/// Inclusive age range; its length must be a multiple of five.
struct AgeWindow {
    int first = 23;
    int last = 62;

    std::int64_t length() const noexcept { return static_cast<std::int64_t>(last) - first + 1; }
    bool contains(std::int64_t age) const noexcept { return age >= first && age <= last; }
};

struct WhippleResult {
    double index = 0.0;
    WhippleClass classification = WhippleClass::highly_accurate;
    Count ages_in_window = 0;
    Count ages_ending_0_or_5 = 0;
};

/// W = 500 * (in-window ages ending in 0 or 5) / (in-window ages).
inline WhippleResult whipple_index(std::span<const int> ages, AgeWindow window = {}) {
    if (window.length() <= 0 || window.length() % 5 != 0) {
        throw InvalidArgument("Whipple window [" + std::to_string(window.first) + ", " +
                              std::to_string(window.last) + "] must be non-empty with a length divisible by 5");
    }
    WhippleResult r;
    for (int age : ages) {
        if (!window.contains(age)) continue;
        ++r.ages_in_window;
        const int d = last_digit(age);
        if (d == 0 || d == 5) ++r.ages_ending_0_or_5;
    }
    if (r.ages_in_window == 0) {
        throw NoData("no ages inside the Whipple window [" + std::to_string(window.first) + ", " +
                     std::to_string(window.last) + "]");
    }
    r.index = 500.0 * static_cast<double>(r.ages_ending_0_or_5) / static_cast<double>(r.ages_in_window);
    r.classification = classify_whipple(r.index);
    return r;
}

/// Birth years are converted to ages as reference_year - birth_year.
inline WhippleResult whipple_index_from_birth_years(std::span<const int> birth_years, int reference_year,
                                                    AgeWindow window = {}) {
    std::vector<int> ages;
    ages.reserve(birth_years.size());
    for (int y : birth_years) ages.push_back(reference_year - y);
    return whipple_index(ages, window);
}

}  // namespace tvor
