#include "ctrig/changepoint.hpp"

#include "ctrig/error.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace ctrig {

namespace {

double range_mean(std::span<const double> x, Interval r) {
    const auto first = x.begin() + r.begin;
    return std::accumulate(first, first + r.size(), 0.0) / static_cast<double>(r.size());
}

void check_range(std::span<const double> x, Interval r) {
    if (r.size() <= 0 || r.begin < 0 || r.end > static_cast<Eigen::Index>(x.size())) {
        throw Error(ErrorCode::EmptyRange, "range [" + std::to_string(r.begin) + ", " +
                                               std::to_string(r.end) + ") is empty or out of bounds");
    }
}

} // namespace

double mean_shift(std::span<const double> series, Interval I1, Interval I2) {
    check_range(series, I1);
    check_range(series, I2);
    if (I1.end > I2.begin) {
        throw Error(ErrorCode::InvalidArgument, "ranges must be disjoint and ordered");
    }
    return range_mean(series, I2) - range_mean(series, I1);
}

SplitResult find_split(std::span<const double> series, const SplitOptions& options) {
    const auto n = static_cast<Eigen::Index>(series.size());
    const Eigen::Index min_i1 = std::max<Eigen::Index>(options.min_size_I1, 1);
    const Eigen::Index min_i2 = std::max<Eigen::Index>(options.min_size_I2, 1);
    if (n < min_i2 + std::max<Eigen::Index>(min_i1, 2)) {
        throw Error(ErrorCode::SeriesTooShort,
                    "series of length " + std::to_string(n) + " cannot hold |I2| >= " +
                        std::to_string(min_i2) + " and |I1| >= " + std::to_string(min_i1));
    }

    // Work relative to the first sample so a constant series gives exact zeros.
    const double origin = series[0];
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] +
                                                  (series[static_cast<std::size_t>(i)] - origin);
    }
    const double total = prefix.back();

    Eigen::Index best_t1 = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t1 = min_i1; t1 <= n - min_i2; ++t1) {
        const double left = prefix[static_cast<std::size_t>(t1)];
        double m1 = left / static_cast<double>(t1);
        double m2 = (total - left) / static_cast<double>(n - t1);
        if (options.absolute_means) {
            m1 = std::abs(m1 + origin);
            m2 = std::abs(m2 + origin);
        }
        const double crit = m2 - m1;
        if (crit > best) {
            best = crit;
            best_t1 = t1;
        }
    }

    SplitResult out;
    out.t1 = best_t1;
    out.length = n;
    out.mean_I1 = range_mean(series, out.I1());
    out.mean_I2 = range_mean(series, out.I2());
    if (options.absolute_means) {
        out.delta = std::abs(out.mean_I2) - std::abs(out.mean_I1);
    } else {
        out.delta = out.mean_I2 - out.mean_I1;
    }
    // A constant series is flat by construction even if the raw means round apart.
    if (best == 0.0 && !options.absolute_means) {
        out.delta = 0.0;
    }
    out.accepted = out.delta > options.threshold_y;
    return out;
}

SplitResult find_split(std::span<const double> series, Eigen::Index min_size_I2,
                       double threshold_y) {
    SplitOptions options;
    options.min_size_I2 = min_size_I2;
    options.threshold_y = threshold_y;
    return find_split(series, options);
}

} // namespace ctrig
