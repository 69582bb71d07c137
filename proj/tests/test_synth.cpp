#include "ctrig/synth.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ctrig;
using ctrig::testing::code_of;

namespace {

double lag1_autocorrelation(const Eigen::VectorXd& x) {
    const Eigen::VectorXd c = x.array() - x.mean();
    return c.head(c.size() - 1).dot(c.tail(c.size() - 1)) / c.squaredNorm();
}

double mean_of(const Eigen::VectorXd& x, Eigen::Index b, Eigen::Index e) { return x.segment(b, e - b).mean(); }

} // namespace

TEST(VarPanel, WhiteNoise) {
    const Eigen::Index n = 1000;
    const auto p = gen_var_panel(3, n, 1, {Eigen::MatrixXd::Zero(3, 3)}, 1.0, 4);
    EXPECT_EQ(p.names(), (std::vector<std::string>{"x1", "x2", "x3"}));
    EXPECT_EQ(p.length(), n);
    for (Eigen::Index j = 0; j < 3; ++j) {
        EXPECT_LT(std::abs(lag1_autocorrelation(p.values().col(j))), 2.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST(VarPanel, ScalarAr1) {
    Eigen::MatrixXd a(1, 1);
    a << 0.8;
    const auto p = gen_var_panel(1, 2000, 1, {a}, 1.0, 12);
    EXPECT_NEAR(lag1_autocorrelation(p.values().col(0)), 0.8, 0.1);
}

TEST(VarPanel, UnstableAndDeterministic) {
    Eigen::MatrixXd a(1, 1);
    a << 1.01;
    EXPECT_EQ(code_of([&] { gen_var_panel(1, 100, 1, {a}, 1.0, 0); }), ErrorCode::UnstableSystem);
    const auto p1 = gen_var_panel(2, 50, 1, {Eigen::MatrixXd::Identity(2, 2) * 0.3}, 1.0, 77);
    const auto p2 = gen_var_panel(2, 50, 1, {Eigen::MatrixXd::Identity(2, 2) * 0.3}, 1.0, 77);
    EXPECT_EQ(p1.values(), p2.values());
    const auto g = gen_var_panel(2, 500, 1, {Eigen::MatrixXd::Zero(2, 2)}, 1.0, 1, Innovation::Gamma);
    EXPECT_NEAR(g.values().col(0).mean(), 0.0, 0.15);
}

TEST(Scenario, NullInteractionLeavesMeanFlat) {
    int within = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        ScenarioSpec s;
        s.seed = seed;
        s.gamma_interaction = 0.0;
        const auto [panel, truth] = gen_trigger_scenario(s);
        const Eigen::VectorXd y = panel.column("y");
        const auto t1 = truth.t1_true;
        const Eigen::VectorXd a = y.head(t1), b = y.tail(y.size() - t1);
        const auto var = [](const Eigen::VectorXd& v) { return (v.array() - v.mean()).square().sum() / (v.size() - 1); };
        const double se = std::sqrt(var(a) / a.size() + var(b) / b.size());
        within += std::abs(b.mean() - a.mean()) < 3.0 * se;
    }
    // the cause is autocorrelated, so allow a few excursions
    EXPECT_GE(within, 36);
}

TEST(Scenario, InteractionRaisesTarget) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ScenarioSpec s;
        s.seed = seed;
        s.gamma_interaction = 0.8;
        s.cause_coefficient = 0.8;
        const auto [panel, truth] = gen_trigger_scenario(s);
        const Eigen::VectorXd y = panel.column("y");
        EXPECT_GT(mean_of(y, truth.t1_true, y.size()) - mean_of(y, 0, truth.t1_true), 0.3);
        EXPECT_EQ(truth.cause, "x1");
        EXPECT_EQ(truth.trigger, "x2");
        const Eigen::VectorXd s_col = panel.column("x2");
        EXPECT_LT(mean_of(s_col, 0, truth.t1_true - 5), 0.3);
        EXPECT_GT(mean_of(s_col, truth.t1_true + 5, y.size()), 0.7);
    }
}

TEST(Scenario, ValidationAndReproducibility) {
    ScenarioSpec s;
    s.t1_true = 290;
    EXPECT_EQ(code_of([&] { gen_trigger_scenario(s); }), ErrorCode::InvalidScenario);
    s = {};
    s.trigger_index = s.cause_index;
    EXPECT_EQ(code_of([&] { gen_trigger_scenario(s); }), ErrorCode::InvalidScenario);
    s = {};
    s.t1_true = 1;
    EXPECT_EQ(code_of([&] { gen_trigger_scenario(s); }), ErrorCode::InvalidScenario);
    s = {};
    s.seed = 99;
    const auto a = gen_trigger_scenario(s).first;
    const auto b = gen_trigger_scenario(s).first;
    EXPECT_EQ(a.values(), b.values());
    EXPECT_EQ(a.names(), (std::vector<std::string>{"y", "x1", "x2", "x3", "x4", "x5"}));
    s.innovation = Innovation::Gamma;
    EXPECT_NE(gen_trigger_scenario(s).first.values(), a.values());
}
