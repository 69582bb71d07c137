#pragma once

#include "ctrig/core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ctrig {

enum class Innovation { Gaussian, Gamma };

std::string_view to_string(Innovation innovation);
Innovation innovation_from_string(std::string_view name);

/// Simulates x^t = sum_l A_l x^{t-l} + e^t for `coefficients` = {A_1..A_d}
/// (each p x p), discarding a burn-in of 10*d steps. Columns are x1..xp.
/// Throws UnstableSystem when the companion matrix has spectral radius >= 1.
TimeSeriesPanel gen_var_panel(int p, Eigen::Index length, int d_true,
                              const std::vector<Eigen::MatrixXd>& coefficients,
                              double noise_sigma, std::uint64_t seed,
                              Innovation innovation = Innovation::Gaussian);

/// Planted cause/trigger scenario. Variables are y and x1..xp:
///   x_cause   AR(1) around cause_mean with stationary sd cause_sd
///   x_trigger logistic step from 0 to 1 at t1_true plus N(0, trigger_noise^2)
///   y^t = a x_cause^{t-d} + g x_trigger^{t-d} x_cause^{t-d} + e^t, d = d_true
/// and every other x is white noise.
struct ScenarioSpec {
    Eigen::Index length = 300;
    int p = 5;
    int d_true = 1;
    int cause_index = 1;   // 1-based, names x<index>
    int trigger_index = 2;
    Eigen::Index t1_true = 150;
    double gamma_interaction = 0.8;
    double noise_sigma = 0.1;
    std::uint64_t seed = 0;

    double cause_coefficient = 0.8;
    double cause_mean = 1.0;
    double cause_ar = 0.6;
    double cause_sd = 0.5;
    double trigger_noise = 0.5;
    /// Logistic scale of the trigger onset; 0.68 spreads 10%-90% over ~3 samples.
    double trigger_width = 0.68;
    Innovation innovation = Innovation::Gaussian;

    /// Throws InvalidScenario.
    void validate() const;
};

struct ScenarioTruth {
    std::string cause;
    std::string trigger;
    Eigen::Index t1_true = 0;
};

std::pair<TimeSeriesPanel, ScenarioTruth> gen_trigger_scenario(const ScenarioSpec& spec);

} // namespace ctrig
