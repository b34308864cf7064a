#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tvor/digits.hpp"
#include "tvor/engine.hpp"
#include "tvor/error.hpp"
#include "tvor/histogram.hpp"

namespace tvor {

struct PersonRecord {
    std::string id;
    std::string list_id;
    std::optional<int> birth_year;
    std::vector<int> alternative_years;  ///< sorted, unique, never contains birth_year
    std::map<std::string, std::string> attributes;

    const std::string* attribute(const std::string& key) const {
        const auto it = attributes.find(key);
        return it == attributes.end() ? nullptr : &it->second;
    }

    friend bool operator==(const PersonRecord&, const PersonRecord&) = default;
};

/// Sorts and deduplicates alternatives and drops the stated year from them.
inline void normalize(PersonRecord& r) {
    auto& alts = r.alternative_years;
    std::sort(alts.begin(), alts.end());
    alts.erase(std::unique(alts.begin(), alts.end()), alts.end());
    if (r.birth_year) alts.erase(std::remove(alts.begin(), alts.end(), *r.birth_year), alts.end());
}

/// Records with unique ids, plus the attribute keys the source schema declares.
class RecordSet {
public:
    RecordSet() = default;

    explicit RecordSet(std::vector<PersonRecord> records, std::set<std::string> attribute_keys = {})
        : records_(std::move(records)), attribute_keys_(std::move(attribute_keys)) {
        std::set<std::string> ids;
        for (auto& r : records_) {
            if (!ids.insert(r.id).second) throw InvalidArgument("duplicate record id '" + r.id + "'");
            normalize(r);
            for (const auto& [key, value] : r.attributes) attribute_keys_.insert(key);
        }
    }

    std::span<const PersonRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    const std::set<std::string>& attribute_keys() const noexcept { return attribute_keys_; }

    std::vector<int> birth_years() const {
        std::vector<int> years;
        for (const auto& r : records_) {
            if (r.birth_year) years.push_back(*r.birth_year);
        }
        return years;
    }

    std::size_t missing_birth_years() const noexcept {
        return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(),
                                                      [](const PersonRecord& r) { return !r.birth_year; }));
    }

    /// Records of one list; an empty list_id keeps everything.
    RecordSet filter_list(const std::string& list_id) const {
        if (list_id.empty()) return *this;
        std::vector<PersonRecord> kept;
        for (const auto& r : records_) {
            if (r.list_id == list_id) kept.push_back(r);
        }
        return RecordSet(std::move(kept), attribute_keys_);
    }

    /// One histogram per list_id with at least one birth year, in first-appearance order.
    std::vector<Histogram> histograms_by_list() const {
        std::vector<std::string> order;
        std::map<std::string, std::vector<int>> years;
        for (const auto& r : records_) {
            if (!r.birth_year) continue;
            auto [it, inserted] = years.try_emplace(r.list_id);
            if (inserted) order.push_back(r.list_id);
            it->second.push_back(*r.birth_year);
        }
        std::vector<Histogram> out;
        out.reserve(order.size());
        for (const auto& id : order) out.push_back(histogram_from_years(years[id], id));
        return out;
    }

private:
    std::vector<PersonRecord> records_;
    std::set<std::string> attribute_keys_;
};

// ---------------------------------------------------------------------------
// Closest-alternative substitution
// ---------------------------------------------------------------------------

struct SubstitutionReport {
    std::size_t substituted_count = 0;
    std::size_t skipped_without_birth_year = 0;  ///< had alternatives but no stated year
    std::vector<std::string> tie_flagged_ids;    ///< equidistant alternatives, smaller year chosen
    DigitProfile digit_profile_before;
    DigitProfile digit_profile_after;
    Histogram abs_diff_histogram{"abs_diff", 0, {0}};  ///< keys are |alternative - stated|
};

struct SubstitutionResult {
    RecordSet records;
    SubstitutionReport report;
};

/// Alternative closest to `stated`; equidistant candidates resolve to the smaller year.
/// `tie` is set when more than one alternative attains the minimum distance.
inline int closest_alternative(int stated, std::span<const int> alternatives, bool& tie) {
    const auto distance = [stated](int y) { return std::labs(static_cast<long>(y) - stated); };
    long best_diff = distance(alternatives.front());
    for (int y : alternatives) best_diff = std::min(best_diff, distance(y));
    std::optional<int> best;
    std::size_t hits = 0;
    for (int y : alternatives) {
        if (distance(y) != best_diff) continue;
        ++hits;
        if (!best || y < *best) best = y;
    }
    tie = hits > 1;
    return *best;
}

/// Replaces each stated birth year that has alternatives by the closest one.
/// The replaced year becomes an alternative of the new record.
inline SubstitutionResult substitute_closest(const RecordSet& rs) {
    SubstitutionReport rep;
    std::vector<PersonRecord> out;
    out.reserve(rs.size());
    std::vector<int> before, after, diffs;
    for (const auto& r : rs.records()) {
        PersonRecord nr = r;
        if (r.birth_year) before.push_back(*r.birth_year);
        if (!r.alternative_years.empty()) {
            if (!r.birth_year) {
                ++rep.skipped_without_birth_year;
            } else {
                bool tie = false;
                const int chosen = closest_alternative(*r.birth_year, r.alternative_years, tie);
                if (tie) rep.tie_flagged_ids.push_back(r.id);
                nr.birth_year = chosen;
                nr.alternative_years.erase(
                    std::remove(nr.alternative_years.begin(), nr.alternative_years.end(), chosen),
                    nr.alternative_years.end());
                nr.alternative_years.push_back(*r.birth_year);
                diffs.push_back(std::abs(chosen - *r.birth_year));
                ++rep.substituted_count;
            }
        }
        if (nr.birth_year) after.push_back(*nr.birth_year);
        out.push_back(std::move(nr));
    }
    rep.digit_profile_before = last_digit_profile(before);
    rep.digit_profile_after = last_digit_profile(after);
    if (!diffs.empty()) {
        // Differences start at key 0 so the histogram always covers 0..max.
        const int max_diff = *std::max_element(diffs.begin(), diffs.end());
        std::vector<Count> counts(static_cast<std::size_t>(max_diff) + 1, 0);
        for (int d : diffs) ++counts[static_cast<std::size_t>(d)];
        rep.abs_diff_histogram = Histogram("abs_diff", 0, std::move(counts));
    }
    return {RecordSet(std::move(out), rs.attribute_keys()), std::move(rep)};
}

// ---------------------------------------------------------------------------
// Attribute split
// ---------------------------------------------------------------------------

struct SplitResult {
    std::string key;
    std::string value;
    std::optional<Histogram> match_histogram;
    std::optional<Histogram> rest_histogram;
    std::size_t match_records = 0;
    std::size_t rest_records = 0;
    std::size_t missing_attribute = 0;  ///< records without the key; counted on the rest side
    std::size_t without_birth_year = 0;

    const Histogram& match() const {
        if (!match_histogram) throw NoData("no birth years on the " + key + "=" + value + " side of the split");
        return *match_histogram;
    }

    const Histogram& rest() const {
        if (!rest_histogram) throw NoData("no birth years on the " + key + "!=" + value + " side of the split");
        return *rest_histogram;
    }
};

inline SplitResult split_by_attribute(const RecordSet& rs, const std::string& key, const std::string& value,
                                      const std::string& label_prefix = "") {
    if (!rs.attribute_keys().contains(key)) throw InvalidArgument("unknown attribute key '" + key + "'");
    SplitResult res{key, value, std::nullopt, std::nullopt, 0, 0, 0, 0};
    std::vector<int> match_years, rest_years;
    for (const auto& r : rs.records()) {
        const std::string* v = r.attribute(key);
        const bool matches = v && *v == value;
        if (!v) ++res.missing_attribute;
        (matches ? res.match_records : res.rest_records)++;
        if (!r.birth_year) {
            ++res.without_birth_year;
            continue;
        }
        (matches ? match_years : rest_years).push_back(*r.birth_year);
    }
    if (match_years.empty() && rest_years.empty()) {
        throw NoData("neither side of the " + key + "=" + value + " split has birth years");
    }
    if (!match_years.empty()) {
        res.match_histogram = histogram_from_years(match_years, label_prefix + key + "=" + value);
    }
    if (!rest_years.empty()) {
        res.rest_histogram = histogram_from_years(rest_years, label_prefix + key + "!=" + value);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Dataset edits
// ---------------------------------------------------------------------------

/// Adds `extra` to the dataset (bypassing its size filter), refits and reranks.
inline Ranking augment_and_rank(const Dataset& ds, std::span<const Histogram> extra, FitMode mode = FitMode::raw_ols) {
    std::vector<Histogram> all(ds.histograms().begin(), ds.histograms().end());
    for (const auto& h : extra) {
        if (ds.find(h.label())) throw InvalidArgument("label '" + h.label() + "' already exists in the dataset");
        all.push_back(h);
    }
    // Duplicates among `extra` themselves are rejected by Dataset.
    return run_tvor(Dataset(std::move(all), 0), mode);
}

struct ExclusionResult {
    Dataset dataset;
    std::size_t removed_count = 0;
};

inline ExclusionResult exclude_lists(const Dataset& ds, const std::set<std::string>& labels) {
    std::vector<std::string> unknown;
    for (const auto& l : labels) {
        if (!ds.find(l)) unknown.push_back(l);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown list label(s):";
        for (const auto& u : unknown) msg += " '" + u + "'";
        throw InvalidArgument(msg);
    }
    std::vector<Histogram> kept;
    for (const auto& h : ds.histograms()) {
        if (!labels.contains(h.label())) kept.push_back(h);
    }
    return {Dataset(std::move(kept), ds.min_size_filter()), labels.size()};
}

}  // namespace tvor
