#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Independent reference computations shared by the unit and acceptance tests.
namespace ctrig::testing {

inline Eigen::VectorXd normal_vector(std::mt19937_64& rng, Eigen::Index n, double sd = 1.0) {
    std::normal_distribution<double> dist(0.0, sd);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Independent O(n^2) split scan with plain loops.
struct BruteSplit {
    Eigen::Index t1 = 0;
    double delta = 0.0;
    bool found = false;
};

inline double range_mean(const std::vector<double>& x, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += x[i];
    return s / static_cast<double>(e - b);
}

inline BruteSplit brute_force_split(const std::vector<double>& x, std::size_t min_i2,
                                    std::size_t min_i1) {
    BruteSplit best;
    const std::size_t n = x.size();
    for (std::size_t t1 = min_i1; t1 + min_i2 <= n; ++t1) {
        const double d = range_mean(x, t1, n) - range_mean(x, 0, t1);
        if (!best.found || d > best.delta) {
            best = {static_cast<Eigen::Index>(t1), d, true};
        }
    }
    return best;
}

/// Regularized incomplete beta I_x(a, 1/2) by quadrature after t = 1 - w^2,
/// which removes the endpoint singularity. Needs a >= 1.
inline double incomplete_beta_half(double x, double a) {
    const double lo = std::sqrt(1.0 - x);
    const int panels = 4000; // composite Simpson, even count
    const double h = (1.0 - lo) / panels;
    auto f = [&](double w) { return 2.0 * std::pow(1.0 - w * w, a - 1.0); };
    double s = f(lo) + f(1.0);
    for (int i = 1; i < panels; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    const double integral = s * h / 3.0;
    const double log_beta = std::lgamma(a) + std::lgamma(0.5) - std::lgamma(a + 0.5);
    return integral / std::exp(log_beta);
}

/// P(F(1, df2) > s) from the oracle above.
inline double f_tail_oracle(double s, double df2) {
    return incomplete_beta_half(df2 / (df2 + s), df2 / 2.0);
}

} // namespace ctrig::testing
