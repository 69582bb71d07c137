#include "ctrig/synth.hpp"

#include "ctrig/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace ctrig {

namespace {

// Zero-mean innovation with standard deviation `sigma`.
class InnovationSource {
public:
    InnovationSource(Innovation kind, double sigma, std::mt19937_64& rng)
        : kind_(kind), sigma_(sigma), rng_(rng), normal_(0.0, 1.0), gamma_(2.0, 1.0) {}

    double operator()() {
        if (sigma_ == 0.0) return 0.0;
        if (kind_ == Innovation::Gaussian) return sigma_ * normal_(rng_);
        // gamma(2, 1) has mean 2 and variance 2.
        return sigma_ * (gamma_(rng_) - 2.0) / std::sqrt(2.0);
    }

private:
    Innovation kind_;
    double sigma_;
    std::mt19937_64& rng_;
    std::normal_distribution<double> normal_;
    std::gamma_distribution<double> gamma_;
};

std::string var_name(int index) { return "x" + std::to_string(index); }

} // namespace

std::string_view to_string(Innovation innovation) {
    return innovation == Innovation::Gaussian ? "gaussian" : "gamma";
}

Innovation innovation_from_string(std::string_view name) {
    if (name == "gaussian") return Innovation::Gaussian;
    if (name == "gamma") return Innovation::Gamma;
    throw Error(ErrorCode::InvalidArgument, "unknown innovation '" + std::string(name) + "'");
}

TimeSeriesPanel gen_var_panel(int p, Eigen::Index length, int d_true,
                              const std::vector<Eigen::MatrixXd>& coefficients,
                              double noise_sigma, std::uint64_t seed, Innovation innovation) {
    if (p < 1 || d_true < 1 || length < 2 || noise_sigma < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "invalid VAR dimensions");
    }
    if (static_cast<int>(coefficients.size()) != d_true) {
        throw Error(ErrorCode::DimensionMismatch, "expected one coefficient matrix per lag");
    }
    for (const auto& a : coefficients) {
        if (a.rows() != p || a.cols() != p) {
            throw Error(ErrorCode::DimensionMismatch, "coefficient matrices must be p x p");
        }
    }

    const Eigen::Index pd = static_cast<Eigen::Index>(p) * d_true;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(pd, pd);
    for (int l = 0; l < d_true; ++l) {
        companion.block(0, static_cast<Eigen::Index>(l) * p, p, p) = coefficients[static_cast<std::size_t>(l)];
    }
    if (d_true > 1) {
        companion.block(p, 0, pd - p, pd - p).setIdentity();
    }
    const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false)
                              .eigenvalues()
                              .cwiseAbs()
                              .maxCoeff();
    if (!(radius < 1.0)) {
        throw Error(ErrorCode::UnstableSystem,
                    "companion spectral radius " + std::to_string(radius) + " is not below 1");
    }

    std::mt19937_64 rng(seed);
    InnovationSource noise(innovation, noise_sigma, rng);
    const Eigen::Index burn = 10 * d_true;
    const Eigen::Index total = length + burn;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total + d_true, p);
    for (Eigen::Index t = d_true; t < total + d_true; ++t) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(p);
        for (int l = 1; l <= d_true; ++l) {
            next += coefficients[static_cast<std::size_t>(l - 1)] * x.row(t - l).transpose();
        }
        for (Eigen::Index j = 0; j < p; ++j) next(j) += noise();
        x.row(t) = next.transpose();
    }

    std::vector<std::string> names;
    for (int j = 1; j <= p; ++j) names.push_back(var_name(j));
    return TimeSeriesPanel(std::move(names), x.bottomRows(length));
}

void ScenarioSpec::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidScenario, what); };
    if (p < 2) fail("scenario needs at least two candidate variables");
    if (d_true < 1) fail("d_true must be positive");
    if (cause_index < 1 || cause_index > p || trigger_index < 1 || trigger_index > p) {
        fail("cause and trigger indices must lie in 1..p");
    }
    if (cause_index == trigger_index) fail("cause and trigger must differ");
    if (!(t1_true > d_true && t1_true < length - 30)) {
        fail("t1_true must lie in (d_true, T - 30)");
    }
    if (noise_sigma < 0.0 || cause_sd < 0.0 || trigger_noise < 0.0 || trigger_width <= 0.0) {
        fail("noise scales must be nonnegative");
    }
    if (!(std::abs(cause_ar) < 1.0)) fail("cause_ar must lie in (-1, 1)");
}

std::pair<TimeSeriesPanel, ScenarioTruth> gen_trigger_scenario(const ScenarioSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    InnovationSource eps(spec.innovation, spec.noise_sigma, rng);

    const Eigen::Index n = spec.length;
    const Eigen::Index lead = spec.d_true;
    const Eigen::Index burn = 10 * spec.d_true + 50;

    // Cause: stationary AR(1) around its mean, started from the stationary law.
    const double innov_sd = spec.cause_sd * std::sqrt(1.0 - spec.cause_ar * spec.cause_ar);
    Eigen::VectorXd cause(n + lead);
    double dev = spec.cause_sd * unit(rng);
    for (Eigen::Index t = 0; t < burn; ++t) dev = spec.cause_ar * dev + innov_sd * unit(rng);
    for (Eigen::Index t = 0; t < n + lead; ++t) {
        dev = spec.cause_ar * dev + innov_sd * unit(rng);
        cause(t) = spec.cause_mean + dev;
    }

    // Trigger: smoothed step, index t of the panel is t + lead here.
    Eigen::VectorXd trigger(n + lead);
    for (Eigen::Index t = 0; t < n + lead; ++t) {
        const double u = static_cast<double>(t - lead) - (static_cast<double>(spec.t1_true) - 0.5);
        trigger(t) = 1.0 / (1.0 + std::exp(-u / spec.trigger_width)) + spec.trigger_noise * unit(rng);
    }

    Eigen::MatrixXd values(n, spec.p + 1);
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index src = t + lead - spec.d_true; // value at t - d_true
        values(t, 0) = spec.cause_coefficient * cause(src) +
                       spec.gamma_interaction * trigger(src) * cause(src) + eps();
    }
    for (int j = 1; j <= spec.p; ++j) {
        if (j == spec.cause_index) {
            values.col(j) = cause.tail(n);
        } else if (j == spec.trigger_index) {
            values.col(j) = trigger.tail(n);
        } else {
            for (Eigen::Index t = 0; t < n; ++t) values(t, j) = unit(rng);
        }
    }

    std::vector<std::string> names{"y"};
    for (int j = 1; j <= spec.p; ++j) names.push_back(var_name(j));
    ScenarioTruth truth{var_name(spec.cause_index), var_name(spec.trigger_index), spec.t1_true};
    return {TimeSeriesPanel(std::move(names), std::move(values)), truth};
}

} // namespace ctrig
