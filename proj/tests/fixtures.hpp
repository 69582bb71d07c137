#pragma once

#include "ctrig/cause_trigger.hpp"
#include "ctrig/pipeline.hpp"
#include "ctrig/synth.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ctrig::testing {

/// y^t = 1 + 0.5 V^t + g V^t s^{t-1} + e^t with V^t = u^{t-1}, u and s standard
/// normal, e ~ N(0, sigma^2); B2 = {s, u} on the whole window with d = 1, so the
/// moderation regressions see r = rows observations.
struct ModerationFixture {
    StandardizedPanel panel;
    CausalParents parents;
};

inline ModerationFixture moderation_fixture(std::uint64_t seed, double g, double sigma,
                                            Eigen::Index rows = 200) {
    std::mt19937_64 rng(seed);
    const Eigen::Index n = rows + 1;
    const Eigen::VectorXd u = normal_vector(rng, n);
    const Eigen::VectorXd s = normal_vector(rng, n);
    const Eigen::VectorXd e = normal_vector(rng, n, sigma);
    Eigen::MatrixXd m(n, 3);
    m.col(1) = u;
    m.col(2) = s;
    m(0, 0) = 1.0 + e(0);
    for (Eigen::Index t = 1; t < n; ++t) {
        const double v = u(t - 1);
        m(t, 0) = 1.0 + 0.5 * v + g * v * s(t - 1) + e(t);
    }
    StandardizedPanel panel = standardize(TimeSeriesPanel({"y", "u", "s"}, m));
    CausalParents b2;
    b2.target = "y";
    b2.parents = {"s", "u"};
    b2.coefficients = {{"s", {0.1}}, {"u", {0.5}}};
    b2.d = 1;
    b2.interval = {0, n};
    return {std::move(panel), std::move(b2)};
}

/// Planted scenario used by the end-to-end checks: T = 300, lag d = 2 in the
/// algorithm, interaction 0.8 (or 0 for the null), noise 0.1.
inline std::pair<TimeSeriesPanel, ScenarioTruth> planted_scenario(std::uint64_t seed, double g = 0.8) {
    ScenarioSpec spec;
    spec.length = 300;
    spec.gamma_interaction = g;
    spec.noise_sigma = 0.1;
    spec.seed = seed;
    return gen_trigger_scenario(spec);
}

inline AlgorithmConfig e2e_config() {
    AlgorithmConfig c;
    c.lag = 2;
    return c;
}

inline bool has_pair(const AlgorithmOutput& out, const std::string& cause, const std::string& trigger) {
    for (const auto& p : out.pairs) {
        if (p.cause == cause && p.trigger == trigger) return true;
    }
    return false;
}

/// Grid of synthetic cells; even indices carry a planted trigger.
inline std::vector<GridCell> synthetic_grid(std::size_t count, std::uint64_t seed) {
    std::vector<GridCell> cells;
    const int levels[] = {500, 700, 975};
    for (std::size_t i = 0; i < count; ++i) {
        GridCellKey key{55.0 + 0.25 * static_cast<double>(i % 4), -12.5 - 0.25 * static_cast<double>(i / 4 % 3),
                        levels[i % 3]};
        auto [panel, truth] = planted_scenario(seed + i, i % 2 == 0 ? 0.8 : 0.0);
        cells.push_back({key, TimeSeriesPanel(panel.names(), panel.values(), {}, key.meta())});
    }
    return cells;
}

/// Gridded CSV with hourly rows starting 2023-02-20T00:00Z.
inline std::string grid_csv(const std::vector<GridCell>& cells) {
    std::ostringstream out;
    const auto& names = cells.front().panel.names();
    out << "time,longitude,latitude,pressure_level";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (const auto& cell : cells) {
        for (Eigen::Index t = 0; t < cell.panel.length(); ++t) {
            char stamp[64];
            const long long day = t / 24, hour = t % 24;
            std::snprintf(stamp, sizeof stamp, "2023-%02lld-%02lldT%02lld:00:00Z", 2 + (19 + day) / 28,
                          (19 + day) % 28 + 1, hour);
            out << stamp << ',' << format_double(cell.key.longitude) << ','
                << format_double(cell.key.latitude) << ',' << cell.key.pressure_level;
            for (Eigen::Index j = 0; j < cell.panel.width(); ++j) {
                out << ',' << format_double(cell.panel.values()(t, j));
            }
            out << '\n';
        }
    }
    return out.str();
}

} // namespace ctrig::testing
