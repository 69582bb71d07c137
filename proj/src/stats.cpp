#include "ctrig/stats.hpp"

#include "ctrig/error.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ctrig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateRss = 1e-12;

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double family_cdf(const FittedDistribution& dist, double x) {
    const auto& p = dist.params;
    switch (dist.family) {
    case Family::Gaussian:
        return normal_cdf(x, p[0], p[1]);
    case Family::Lognormal:
        return x <= 0.0 ? 0.0 : normal_cdf(std::log(x), p[0], p[1]);
    case Family::Gamma:
        return x <= 0.0 ? 0.0 : boost::math::gamma_p(p[0], x / p[1]);
    case Family::Poisson:
        return x < 0.0 ? 0.0 : boost::math::gamma_q(std::floor(x) + 1.0, p[0]);
    }
    return 0.0;
}

// Solves log(k) - digamma(k) = s for the gamma shape k (s > 0).
double gamma_shape_mle(double s) {
    s = std::max(s, 1e-12);
    // Minka's closed-form start, then Newton on log(k).
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int it = 0; it < 100; ++it) {
        const double f = std::log(k) - boost::math::digamma(k) - s;
        const double df = 1.0 / k - boost::math::trigamma(k);
        const double next = k - f / df;
        const double bounded = next > 0.0 ? next : k / 2.0;
        if (std::abs(bounded - k) <= 1e-12 * k) {
            return bounded;
        }
        k = bounded;
    }
    return k;
}

bool all_positive(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; });
}

bool all_counts(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(),
                       [](double v) { return v >= 0.0 && std::abs(v - std::round(v)) <= 1e-9; });
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double pop_sd(std::span<const double> x, double mean) {
    double s = 0.0;
    for (double v : x) s += (v - mean) * (v - mean);
    return std::sqrt(s / static_cast<double>(x.size()));
}

// Least squares with intercept-augmented design via the normal equations.
// Near-singular systems receive a small diagonal ridge; if that still leaves
// the system numerically singular the design is rejected.
Eigen::VectorXd solve_normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd* weights = nullptr) {
    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    if (weights != nullptr) {
        const Eigen::MatrixXd wx = weights->asDiagonal() * x;
        gram = x.transpose() * wx;
        rhs = wx.transpose() * y;
    } else {
        gram = x.transpose() * x;
        rhs = x.transpose() * y;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || !std::isfinite(lmax)) {
        throw Error(ErrorCode::SingularDesign, "design matrix has no variation");
    }
    if (lmin <= 1e-12 * lmax) {
        if ((lmin + kRidge) / (lmax + kRidge) < 1e-10) {
            throw Error(ErrorCode::SingularDesign,
                        "design matrix is rank deficient beyond the ridge tolerance");
        }
        gram.diagonal().array() += kRidge;
    }
    return gram.ldlt().solve(rhs);
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& columns) {
    Eigen::MatrixXd x(columns.rows(), columns.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(columns.cols()) = columns;
    return x;
}

double gaussian_loglik(double rss, Eigen::Index r) {
    const double n = static_cast<double>(r);
    const double sigma2 = std::max(rss / n, 1e-300);
    return -0.5 * n * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

RegressionFit fit_gaussian(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    RegressionFit fit;
    fit.family = Family::Gaussian;
    fit.coefficients = solve_normal_equations(x, y);
    fit.fitted = x * fit.coefficients;
    fit.rss = (y - fit.fitted).squaredNorm();
    fit.loglik = gaussian_loglik(fit.rss, y.size());
    return fit;
}

RegressionFit fit_lognormal(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Eigen::VectorXd logy = y.array().log().matrix();
    RegressionFit fit;
    fit.family = Family::Lognormal;
    fit.coefficients = solve_normal_equations(x, logy);
    const Eigen::VectorXd eta = x * fit.coefficients;
    const double n = static_cast<double>(y.size());
    const double rss_log = (logy - eta).squaredNorm();
    const double sigma2 = std::max(rss_log / n, 1e-300);
    fit.fitted = (eta.array() + 0.5 * sigma2).exp().matrix();
    fit.rss = (y - fit.fitted).squaredNorm();
    fit.loglik = gaussian_loglik(rss_log, y.size()) - logy.sum();
    return fit;
}

double glm_deviance(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (family == Family::Gamma) {
            dev += 2.0 * (-std::log(y(i) / mu(i)) + (y(i) - mu(i)) / mu(i));
        } else {
            const double term = y(i) > 0.0 ? y(i) * std::log(y(i) / mu(i)) : 0.0;
            dev += 2.0 * (term - (y(i) - mu(i)));
        }
    }
    return dev;
}

// Fisher scoring (IRLS) for the log-link gamma and Poisson models.
RegressionFit fit_log_link_glm(Family family, const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Eigen::Index r = y.size();
    Eigen::VectorXd mu = family == Family::Poisson ? (y.array() + 0.1).matrix() : y;
    Eigen::VectorXd eta = mu.array().log().matrix();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    double deviance = kInf;
    for (int it = 0; it < 100; ++it) {
        const Eigen::VectorXd z = eta + ((y - mu).array() / mu.array()).matrix();
        const Eigen::VectorXd w = family == Family::Poisson ? mu : Eigen::VectorXd::Ones(r);
        Eigen::VectorXd candidate = solve_normal_equations(x, z, &w);
        Eigen::VectorXd eta_new = x * candidate;
        Eigen::VectorXd mu_new = eta_new.array().exp().matrix();
        double dev_new = glm_deviance(family, y, mu_new);
        // Step halving keeps the deviance monotone.
        for (int half = 0; half < 30 && it > 0 && !(dev_new <= deviance); ++half) {
            candidate = 0.5 * (candidate + beta);
            eta_new = x * candidate;
            mu_new = eta_new.array().exp().matrix();
            dev_new = glm_deviance(family, y, mu_new);
        }
        const double change = std::abs(dev_new - deviance);
        beta = candidate;
        eta = eta_new;
        mu = mu_new;
        const bool converged = change <= 1e-10 * (std::abs(dev_new) + 0.1);
        deviance = dev_new;
        if (converged) {
            break;
        }
    }

    RegressionFit fit;
    fit.family = family;
    fit.coefficients = beta;
    fit.fitted = mu;
    fit.rss = (y - mu).squaredNorm();
    const double n = static_cast<double>(r);
    if (family == Family::Poisson) {
        double ll = 0.0;
        for (Eigen::Index i = 0; i < r; ++i) {
            ll += y(i) * std::log(mu(i)) - mu(i) - std::lgamma(y(i) + 1.0);
        }
        fit.loglik = ll;
    } else {
        const double shape = gamma_shape_mle(deviance / (2.0 * n));
        double ll = 0.0;
        for (Eigen::Index i = 0; i < r; ++i) {
            const double ratio = y(i) / mu(i);
            ll += shape * std::log(shape * ratio) - shape * ratio - std::log(y(i)) -
                  std::lgamma(shape);
        }
        fit.loglik = ll;
    }
    return fit;
}

} // namespace

std::string_view to_string(Family family) {
    switch (family) {
    case Family::Gaussian: return "gaussian";
    case Family::Gamma: return "gamma";
    case Family::Poisson: return "poisson";
    case Family::Lognormal: return "lognormal";
    }
    return "gaussian";
}

Family family_from_string(std::string_view name) {
    for (Family f : {Family::Gaussian, Family::Gamma, Family::Poisson, Family::Lognormal}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown distribution family '" + std::string(name) + "'");
}

FittedDistribution FittedDistribution::gaussian() {
    FittedDistribution d;
    d.family = Family::Gaussian;
    d.params = {0.0, 1.0};
    return d;
}

double ks_pvalue(double statistic, std::size_t n) {
    const double lambda = std::sqrt(static_cast<double>(n)) * statistic;
    if (lambda < 1e-3) {
        return 1.0;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) {
            break;
        }
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> series, const FittedDistribution& dist) {
    std::vector<double> x(series.begin(), series.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    if (dist.family == Family::Poisson) {
        // Step CDFs on the integers: compare at every support point up to max.
        const auto top = static_cast<long>(std::llround(x.back()));
        std::size_t idx = 0;
        for (long k = 0; k <= top; ++k) {
            while (idx < x.size() && std::llround(x[idx]) <= k) ++idx;
            const double emp = static_cast<double>(idx) / n;
            d = std::max(d, std::abs(emp - family_cdf(dist, static_cast<double>(k))));
        }
        return d;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = family_cdf(dist, x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

FittedDistribution fit_distribution_ks(std::span<const double> series) {
    if (series.size() < kMinDistributionSamples) {
        throw Error(ErrorCode::TooFewSamples, "distribution fitting needs at least " +
                                                  std::to_string(kMinDistributionSamples) +
                                                  " samples, got " + std::to_string(series.size()));
    }
    const double mean = mean_of(series);
    const double sd = pop_sd(series, mean);
    if (!(sd > kConstantSeriesTolerance)) {
        throw Error(ErrorCode::ConstantSeries, "cannot fit a distribution to a constant series");
    }

    std::vector<FittedDistribution> candidates;
    candidates.push_back({Family::Gaussian, {mean, sd}, 0.0, 1.0});
    if (all_positive(series)) {
        double mean_log = 0.0;
        for (double v : series) mean_log += std::log(v);
        mean_log /= static_cast<double>(series.size());
        const double shape = gamma_shape_mle(std::log(mean) - mean_log);
        candidates.push_back({Family::Gamma, {shape, mean / shape}, 0.0, 1.0});

        double sd_log = 0.0;
        for (double v : series) sd_log += (std::log(v) - mean_log) * (std::log(v) - mean_log);
        sd_log = std::sqrt(sd_log / static_cast<double>(series.size()));
        if (sd_log > kConstantSeriesTolerance) {
            candidates.push_back({Family::Lognormal, {mean_log, sd_log}, 0.0, 1.0});
        }
    }
    if (all_counts(series)) {
        candidates.push_back({Family::Poisson, {mean}, 0.0, 1.0});
    }

    const FittedDistribution* best = nullptr;
    for (auto& c : candidates) {
        c.ks_statistic = ks_statistic(series, c);
        c.ks_pvalue = ks_pvalue(c.ks_statistic, series.size());
        if (best == nullptr || c.ks_statistic < best->ks_statistic) {
            best = &c;
        }
    }
    return *best;
}

double var_aic(const TimeSeriesPanel& panel, int d, int d_max) {
    const Eigen::Index t_len = panel.length();
    const Eigen::Index p = panel.width();
    const Eigen::Index n = t_len - d_max;
    const auto& v = panel.values();

    Eigen::MatrixXd z(n, 1 + p * d);
    z.col(0).setOnes();
    for (Eigen::Index j = 0; j < p; ++j) {
        for (int lag = 1; lag <= d; ++lag) {
            z.col(1 + j * d + lag - 1) = v.col(j).segment(d_max - lag, n);
        }
    }
    const Eigen::MatrixXd y = v.bottomRows(n);
    const Eigen::MatrixXd coef = z.colPivHouseholderQr().solve(y);
    const Eigen::MatrixXd resid = y - z * coef;
    const Eigen::MatrixXd sigma = resid.transpose() * resid / static_cast<double>(n);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
        throw Error(ErrorCode::SingularDesign, "VAR residual covariance is singular");
    }
    const double log_det = ldlt.vectorD().array().log().sum();
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(p);
    const double loglik = -0.5 * nd * (pd * std::log(2.0 * std::numbers::pi) + log_det + pd);
    const double k = pd * (pd * d + 1.0);
    return -2.0 * loglik + 2.0 * k;
}

int select_lag_aic(const StandardizedPanel& panel, int d_max) {
    const Eigen::Index t_len = panel.panel().length();
    if (d_max < 1 || 3 * static_cast<Eigen::Index>(d_max) >= t_len) {
        throw Error(ErrorCode::LagTooLarge, "maximum lag " + std::to_string(d_max) +
                                                " must be positive and below T/3 = " +
                                                std::to_string(t_len / 3.0));
    }
    int best = 1;
    double best_aic = kInf;
    for (int d = 1; d <= d_max; ++d) {
        const double aic = var_aic(panel.panel(), d, d_max);
        if (aic < best_aic) {
            best_aic = aic;
            best = d;
        }
    }
    return best;
}

RegressionFit fit_regression(const Eigen::VectorXd& response, const Eigen::MatrixXd& columns,
                             const FittedDistribution& distribution) {
    const Eigen::Index r = response.size();
    if (columns.rows() != r) {
        throw Error(ErrorCode::DimensionMismatch, "design has " + std::to_string(columns.rows()) +
                                                      " rows, response has " + std::to_string(r));
    }
    if (r <= columns.cols() + 1) {
        throw Error(ErrorCode::DegreesOfFreedom,
                    "regression needs more observations than parameters + 1");
    }
    const Eigen::MatrixXd x = with_intercept(columns);
    std::span<const double> values(response.data(), static_cast<std::size_t>(r));

    RegressionFit fit;
    switch (distribution.family) {
    case Family::Gaussian:
        fit = fit_gaussian(response, x);
        break;
    case Family::Lognormal:
    case Family::Gamma:
        if (!all_positive(values)) {
            throw Error(ErrorCode::InvalidArgument,
                        std::string(to_string(distribution.family)) + " response must be positive");
        }
        fit = distribution.family == Family::Gamma ? fit_log_link_glm(Family::Gamma, response, x)
                                                   : fit_lognormal(response, x);
        break;
    case Family::Poisson:
        if (!all_counts(values)) {
            throw Error(ErrorCode::InvalidArgument, "poisson response must be nonnegative counts");
        }
        fit = fit_log_link_glm(Family::Poisson, response, x);
        break;
    }
    fit.n_obs = r;
    fit.n_params = x.cols();
    return fit;
}

RegressionFit fit_regression(const Eigen::VectorXd& response,
                             std::span<const Eigen::VectorXd> design_columns,
                             const FittedDistribution& distribution) {
    Eigen::MatrixXd columns(response.size(), static_cast<Eigen::Index>(design_columns.size()));
    for (std::size_t j = 0; j < design_columns.size(); ++j) {
        if (design_columns[j].size() != response.size()) {
            throw Error(ErrorCode::DimensionMismatch, "design column length mismatch");
        }
        columns.col(static_cast<Eigen::Index>(j)) = design_columns[j];
    }
    return fit_regression(response, columns, distribution);
}

double f_statistic(double rss_reduced, double rss_full, int df2) {
    if (rss_full < kDegenerateRss) {
        return rss_reduced < kDegenerateRss ? 0.0 : kInf;
    }
    const double s = ((rss_reduced - rss_full) / 1.0) / (rss_full / static_cast<double>(df2));
    return std::max(s, 0.0);
}

double f_upper_tail(double s, double df1, double df2) {
    if (std::isinf(s)) {
        return 0.0;
    }
    if (s <= 0.0) {
        return 1.0;
    }
    return boost::math::ibeta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * s));
}

FTestResult f_test_nested(const RegressionFit& reduced, const RegressionFit& full, double alpha) {
    if (full.n_obs != reduced.n_obs || full.n_params != reduced.n_params + 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "F test needs nested fits on the same data differing by one parameter");
    }
    const Eigen::Index df2 = full.n_obs - full.n_params;
    if (df2 <= 0) {
        throw Error(ErrorCode::DegreesOfFreedom, "F test needs r > " +
                                                     std::to_string(full.n_params) +
                                                     " observations, got " +
                                                     std::to_string(full.n_obs));
    }
    FTestResult out;
    out.df1 = 1;
    out.df2 = static_cast<int>(df2);
    out.alpha = alpha;
    out.statistic = f_statistic(reduced.rss, full.rss, out.df2);
    out.p_value = f_upper_tail(out.statistic, 1.0, static_cast<double>(out.df2));
    out.reject_h0 = std::isinf(out.statistic) || out.p_value < alpha;
    return out;
}

} // namespace ctrig
