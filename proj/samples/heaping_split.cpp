// Splits a small record set on an attribute, adds both halves to a synthetic
// dataset and shows where each half ranks.

#include <cstdio>
#include <string>
#include <vector>

#include "tvor/tvor.hpp"

int main() {
    tvor::Xoshiro256 rng(9);
    std::vector<tvor::PersonRecord> records;
    for (int i = 0; i < 4000; ++i) {
        tvor::PersonRecord r;
        r.id = "r" + std::to_string(i);
        r.list_id = "camp";
        const bool marked = i % 4 == 0;
        int year = 1900 + static_cast<int>(rng.below(20));
        // Marked records round half of their years down to a multiple of five.
        if (marked && rng.uniform() < 0.5) year -= year % 5;
        r.birth_year = year;
        r.attributes["death_year"] = marked ? "1942" : "1943";
        records.push_back(std::move(r));
    }
    const tvor::RecordSet rs(std::move(records));
    const auto split = tvor::split_by_attribute(rs, "death_year", "1942");
    const std::vector<tvor::Histogram> sides{split.match(), split.rest()};

    tvor::SameSmoothnessConfig cfg;
    cfg.count = 40;
    cfg.origin = 1900;
    const auto base = tvor::make_synthetic_dataset(tvor::same_smoothness_spec(cfg, 9), 9);
    const auto ranking = tvor::augment_and_rank(base, sides);
    for (const auto& h : sides) {
        const auto* s = ranking.find(h.label());
        std::printf("%-18s N=%-5llu rank %zu of %zu, |d'| = %.3f\n", h.label().c_str(),
                    static_cast<unsigned long long>(h.total()), s->rank, ranking.scores.size(), s->d_abs);
    }
}
