#include "ctrig/hmml.hpp"
#include "ctrig/synth.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ctrig;
using ctrig::testing::code_of;
using ctrig::testing::names;

namespace {

// x1..x5 white noise except x_cause, which drives `target` at lags 1 and 2 with SNR 5.
TimeSeriesPanel single_parent_panel(std::uint64_t seed, Eigen::Index n, int cause) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd m(n, 5);
    for (int j = 0; j < 5; ++j) m.col(j) = ctrig::testing::normal_vector(rng, n);
    const double b1 = 1.0, b2 = 0.5;
    const double noise_sd = std::sqrt((b1 * b1 + b2 * b2) / 5.0);
    std::normal_distribution<double> e(0.0, noise_sd);
    for (Eigen::Index t = 2; t < n; ++t) {
        m(t, 0) = b1 * m(t - 1, cause) + b2 * m(t - 2, cause) + e(rng);
    }
    return TimeSeriesPanel(names({"x1", "x2", "x3", "x4", "x5"}), m);
}

LagDesign full_design(const StandardizedPanel& s, const std::string& target, int d) {
    return build_lag_design(s, s.panel().names(), target, d);
}

} // namespace

TEST(MmlScore, EmptySubsetIsInterceptModel) {
    std::mt19937_64 rng(1);
    const Eigen::VectorXd y = ctrig::testing::normal_vector(rng, 100);
    Eigen::MatrixXd m(100, 1);
    m.col(0) = y;
    const auto s = standardize(TimeSeriesPanel(names({"y"}), m));
    const auto design = full_design(s, "y", 1);
    const auto score = mml_score(design.target_rows, design, {}, FittedDistribution::gaussian());
    const double r = static_cast<double>(design.rows());
    EXPECT_NEAR(score.codelength, -score.fit.loglik + 0.5 * std::log(r), 1e-9);
    EXPECT_EQ(score.fit.n_params, 1);
}

TEST(MmlScore, DuplicateSubsetIsSingular) {
    const auto s = standardize(single_parent_panel(0, 100, 1));
    const auto design = full_design(s, "x1", 2);
    EXPECT_EQ(code_of([&] {
                  mml_score(design.target_rows, design, names({"x2", "x2"}), FittedDistribution::gaussian());
              }),
              ErrorCode::SingularDesign);
}

TEST(MmlScore, TrueParentsBeatSupersets) {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto s = standardize(single_parent_panel(seed, 302, 1));
        const auto design = full_design(s, "x1", 2);
        const auto truth = mml_score(design.target_rows, design, names({"x2"}), FittedDistribution::gaussian());
        bool best = true;
        for (const char* extra : {"x1", "x3", "x4", "x5"}) {
            std::vector<std::string> sup{"x2", extra};
            const auto other = mml_score(design.target_rows, design, sup, FittedDistribution::gaussian());
            best = best && truth.codelength < other.codelength;
        }
        wins += best;
    }
    EXPECT_GE(wins, 90);
}

TEST(Exhaustive, SingleCandidate) {
    std::mt19937_64 rng(4);
    Eigen::MatrixXd m(120, 1);
    m(0, 0) = 0.0;
    std::normal_distribution<double> e(0.0, 0.3);
    for (Eigen::Index t = 1; t < 120; ++t) m(t, 0) = 0.8 * m(t - 1, 0) + e(rng);
    const auto s = standardize(TimeSeriesPanel(names({"y"}), m));
    const auto design = full_design(s, "y", 1);
    const auto p = search_exhaustive(design.target_rows, design, FittedDistribution::gaussian());
    const auto none = mml_score(design.target_rows, design, {}, FittedDistribution::gaussian());
    const auto one = mml_score(design.target_rows, design, names({"y"}), FittedDistribution::gaussian());
    EXPECT_DOUBLE_EQ(p.codelength, std::min(none.codelength, one.codelength));
    EXPECT_EQ(p.parents, names({"y"}));
}

TEST(Exhaustive, PureNoiseMostlyEmpty) {
    int empty = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto panel = gen_var_panel(5, 300, 1, {Eigen::MatrixXd::Zero(5, 5)}, 1.0, seed);
        const auto s = standardize(panel);
        const auto design = full_design(s, "x1", 2);
        empty += search_exhaustive(design.target_rows, design, FittedDistribution::gaussian()).parents.empty();
    }
    EXPECT_GE(empty, 40);
}

TEST(Exhaustive, TooManyVariables) {
    std::mt19937_64 rng(0);
    Eigen::MatrixXd m(60, 16);
    for (int j = 0; j < 16; ++j) m.col(j) = ctrig::testing::normal_vector(rng, 60);
    std::vector<std::string> vars;
    for (int j = 0; j < 16; ++j) vars.push_back("v" + std::to_string(j));
    const auto s = standardize(TimeSeriesPanel(vars, m));
    const auto design = full_design(s, "v0", 1);
    EXPECT_EQ(code_of([&] { search_exhaustive(design.target_rows, design, FittedDistribution::gaussian()); }),
              ErrorCode::TooManyVariables);
}

TEST(Genetic, DegenerateBudgets) {
    const auto s = standardize(single_parent_panel(3, 200, 1));
    const auto design = full_design(s, "x1", 2);
    GeneticConfig frozen;
    frozen.population = 1;
    frozen.generations = 5;
    frozen.mutation_rate = 0.0;
    frozen.initial_population = {0};
    const auto none = search_genetic(design.target_rows, design, FittedDistribution::gaussian(), frozen);
    EXPECT_TRUE(none.parents.empty());

    GeneticConfig zero;
    zero.generations = 0;
    zero.population = 8;
    zero.seed = 9;
    const auto best = search_genetic(design.target_rows, design, FittedDistribution::gaussian(), zero);
    EXPECT_TRUE(std::isfinite(best.codelength));
}

TEST(Genetic, MatchesExhaustiveOnSmallProblems) {
    int agree = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = standardize(single_parent_panel(seed, 250, 1 + static_cast<int>(seed % 4)));
        const auto design = full_design(s, "x1", 2);
        const auto ex = search_exhaustive(design.target_rows, design, FittedDistribution::gaussian());
        GeneticConfig g;
        g.seed = seed;
        const auto ga = search_genetic(design.target_rows, design, FittedDistribution::gaussian(), g);
        agree += std::abs(ex.codelength - ga.codelength) <= 1e-9;
    }
    EXPECT_GE(agree, 9);
}

TEST(InferParents, AutoregressiveTarget) {
    std::mt19937_64 rng(8);
    const Eigen::Index n = 300;
    Eigen::MatrixXd m(n, 3);
    for (int j = 1; j < 3; ++j) m.col(j) = ctrig::testing::normal_vector(rng, n);
    std::normal_distribution<double> e(0.0, 1.0);
    m(0, 0) = 0.0;
    for (Eigen::Index t = 1; t < n; ++t) m(t, 0) = 0.8 * m(t - 1, 0) + e(rng);
    const auto s = standardize(TimeSeriesPanel(names({"y", "a", "b"}), m));
    const auto p = infer_parents(s, "y", {0, n}, 2, Backend::Exhaustive);
    EXPECT_EQ(p.parents, names({"y"}));
    EXPECT_EQ(p.d, 2);
    ASSERT_EQ(p.coefficients.at("y").size(), 2u);
    EXPECT_GT(p.coefficients.at("y")[0], 0.5);
    EXPECT_TRUE(p.contains("y"));
    EXPECT_FALSE(p.contains("a"));
}

TEST(InferParents, IntervalTooShortAndFinder) {
    const auto s = standardize(single_parent_panel(1, 100, 2));
    EXPECT_EQ(code_of([&] { infer_parents(s, "x1", {0, 5}, 2, Backend::Exhaustive); }),
              ErrorCode::IntervalTooShort);
    const auto finder = make_parent_finder(Backend::Genetic);
    const auto p = finder(s, "x1", {0, 100}, 2);
    EXPECT_EQ(p.parents, names({"x3"}));
    EXPECT_EQ(backend_from_string("genetic"), Backend::Genetic);
    EXPECT_EQ(to_string(Backend::Exhaustive), "exhaustive");
}
