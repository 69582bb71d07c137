#pragma once

#include "ctrig/core.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace ctrig {

/// Response families supported by the regression and distribution fitting.
/// Gaussian uses the identity link; the others use the log link.
enum class Family { Gaussian, Gamma, Poisson, Lognormal };

std::string_view to_string(Family family);
/// Throws InvalidArgument for unknown names.
Family family_from_string(std::string_view name);

struct FittedDistribution {
    Family family = Family::Gaussian;
    /// gaussian: (mean, sd); gamma: (shape, scale); lognormal: (meanlog, sdlog); poisson: (lambda)
    std::vector<double> params;
    double ks_statistic = 0.0;
    double ks_pvalue = 1.0;

    /// Gaussian placeholder used when a sample is too short to fit.
    static FittedDistribution gaussian();
};

struct RegressionFit {
    Eigen::VectorXd coefficients; // intercept first
    Eigen::VectorXd fitted;       // response scale
    double rss = 0.0;
    double loglik = 0.0;
    Eigen::Index n_obs = 0;
    Eigen::Index n_params = 0;
    Family family = Family::Gaussian;
};

struct FTestResult {
    double statistic = 0.0; // may be +inf
    int df1 = 1;
    int df2 = 0;
    double p_value = 1.0;
    bool reject_h0 = false;
    double alpha = 0.05;
};

inline constexpr std::size_t kMinDistributionSamples = 20;
/// Diagonal ridge applied to near-singular normal equations.
inline constexpr double kRidge = 1e-8;

/// Fits every eligible family by maximum likelihood and keeps the one with
/// the smallest Kolmogorov-Smirnov distance. Positive-support families are
/// only eligible for positive data; the count family only for nonnegative
/// integers. Throws TooFewSamples (< 20 values) or ConstantSeries.
FittedDistribution fit_distribution_ks(std::span<const double> series);

/// sup |F_n - F| for a fitted distribution.
double ks_statistic(std::span<const double> series, const FittedDistribution& dist);
/// Asymptotic Kolmogorov upper tail P(K > sqrt(n) * d).
double ks_pvalue(double statistic, std::size_t n);

/// VAR order minimizing AIC over 1..d_max, fitted on the common sample
/// t = d_max..T-1 so the candidates are comparable. Ties go to the smaller
/// order. Throws LagTooLarge unless d_max < T / 3.
int select_lag_aic(const StandardizedPanel& panel, int d_max);
/// AIC of a VAR(d) on the common sample defined by d_max.
double var_aic(const TimeSeriesPanel& panel, int d, int d_max);

/// Maximum-likelihood GLM fit of `response` on an intercept plus `columns`.
/// Gaussian reduces to least squares through the normal equations.
/// Throws SingularDesign, DegreesOfFreedom (r <= k + 1) or InvalidArgument
/// (response outside the family's support).
RegressionFit fit_regression(const Eigen::VectorXd& response, const Eigen::MatrixXd& columns,
                             const FittedDistribution& distribution);
RegressionFit fit_regression(const Eigen::VectorXd& response,
                             std::span<const Eigen::VectorXd> design_columns,
                             const FittedDistribution& distribution);

/// F statistic ((RSS1 - RSS2) / 1) / (RSS2 / df2) with the degenerate
/// conventions: RSS2 ~ 0 < RSS1 gives +inf, both ~ 0 give 0.
double f_statistic(double rss_reduced, double rss_full, int df2);
/// P(F(df1, df2) > s).
double f_upper_tail(double s, double df1, double df2);

/// Nested-model F test of one added parameter, df = (1, n_obs - n_params_full).
/// Throws DegreesOfFreedom when df2 <= 0, InvalidArgument when the models are
/// not nested by exactly one parameter on the same observations.
FTestResult f_test_nested(const RegressionFit& reduced, const RegressionFit& full, double alpha);

} // namespace ctrig
