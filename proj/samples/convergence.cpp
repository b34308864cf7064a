// Mean |dtv/N - ||D||_V| for samples of a discretized beta(2, 3) at growing sizes.

#include <cstdio>
#include <vector>

#include "tvor/tvor.hpp"

int main() {
    const auto d = tvor::discretize_beta(2.0, 3.0, 50);
    const std::vector<tvor::Count> sizes{100, 1'000, 10'000, 100'000};
    std::printf("||D||_V = %.6f\n", tvor::theoretical_dtv(d));
    for (const auto& p : tvor::glivenko_cantelli_curve(d, sizes, 20, 7)) {
        std::printf("N=%-7llu deviation=%.6f (se %.6f)\n", static_cast<unsigned long long>(p.size),
                    p.mean_abs_deviation, p.std_error);
    }
}
