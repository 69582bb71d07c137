#pragma once

#include "ctrig/core.hpp"

#include <span>

namespace ctrig {

/// Split of [0, T) into I1 = [0, t1) and I2 = [t1, T).
struct SplitResult {
    Eigen::Index t1 = 0;
    Eigen::Index length = 0;
    double mean_I1 = 0.0;
    double mean_I2 = 0.0;
    double delta = 0.0; // criterion value at t1 (mean_I2 - mean_I1 unless absolute)
    bool accepted = false;

    Interval I1() const { return {0, t1}; }
    Interval I2() const { return {t1, length}; }
};

struct SplitOptions {
    Eigen::Index min_size_I2 = 30;
    /// Smallest admissible |I1|.
    Eigen::Index min_size_I1 = 2;
    double threshold_y = 0.0;
    /// Compare |mean| of the halves instead of the signed means.
    bool absolute_means = false;
};

/// Scans every t1 with |I1| >= min_size_I1 and |I2| >= min_size_I2 and keeps
/// the one maximizing mean(I2) - mean(I1); earlier t1 wins ties.
/// Throws SeriesTooShort when no admissible split exists.
SplitResult find_split(std::span<const double> series, const SplitOptions& options);
SplitResult find_split(std::span<const double> series, Eigen::Index min_size_I2,
                       double threshold_y);

/// mean(series over I2) - mean(series over I1). Throws EmptyRange.
double mean_shift(std::span<const double> series, Interval I1, Interval I2);

} // namespace ctrig
