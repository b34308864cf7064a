// Builds a synthetic dataset with one heaped histogram, ranks it and prints
// the five highest scores.

#include <cstdio>

#include "tvor/tvor.hpp"

int main() {
    const std::uint64_t seed = 42;
    const auto ds = tvor::make_synthetic_dataset(tvor::planted_outlier_spec({}, seed), seed);
    const auto ranking = tvor::run_tvor(ds);

    std::printf("model: m = %.6f N + %.6f sqrt(N)\n", ranking.model.a, ranking.model.b);
    for (std::size_t i = 0; i < 5 && i < ranking.scores.size(); ++i) {
        const auto& s = ranking.scores[i];
        std::printf("%2zu  %-12s N=%-6llu dtv=%-6llu d'=%+.3f\n", s.rank, s.label.c_str(),
                    static_cast<unsigned long long>(s.size), static_cast<unsigned long long>(s.dtv), s.d_signed);
    }
}
