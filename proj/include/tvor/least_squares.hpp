#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "tvor/error.hpp"

namespace tvor {

/// Accumulates the 2x2 normal equations of y ~ c1*f1 + c2*f2.
///
/// Sums are kept in long double and filled strictly in insertion order so a
/// refit over the same points is bit-reproducible.
class NormalEquations2 {
public:
    void add(double f1, double f2, double y) noexcept {
        const long double lf1 = f1, lf2 = f2, ly = y;
        s11_ += lf1 * lf1;
        s12_ += lf1 * lf2;
        s22_ += lf2 * lf2;
        r1_ += lf1 * ly;
        r2_ += lf2 * ly;
        ++count_;
    }

    std::size_t count() const noexcept { return count_; }

    /// Returns {c1, c2}. Throws SingularFit when the features are collinear.
    std::array<double, 2> solve() const {
        if (count_ < 2) {
            throw SingularFit("least-squares fit needs at least 2 points, got " + std::to_string(count_));
        }
        const long double det = s11_ * s22_ - s12_ * s12_;
        // Relative test: det / (s11*s22) is sin^2 of the angle between the feature columns.
        if (!(det > relative_singularity_threshold * s11_ * s22_)) {
            throw SingularFit("degenerate design matrix: features are collinear");
        }
        const long double c1 = (r1_ * s22_ - r2_ * s12_) / det;
        const long double c2 = (s11_ * r2_ - s12_ * r1_) / det;
        return {static_cast<double>(c1), static_cast<double>(c2)};
    }

    static constexpr long double relative_singularity_threshold = 1e-14L;

private:
    long double s11_ = 0, s12_ = 0, s22_ = 0, r1_ = 0, r2_ = 0;
    std::size_t count_ = 0;
};

}  // namespace tvor
