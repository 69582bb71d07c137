#include "ctrig/config.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ctrig;
using ctrig::testing::code_of;

TEST(KeyValues, CommentsAndWhitespace) {
    const auto kv = parse_key_values("# header\n input = data.csv  # trailing\n\nalpha=0.01\nalpha = 0.02\n");
    EXPECT_EQ(kv.at("input"), "data.csv");
    EXPECT_EQ(kv.at("alpha"), "0.02");
    EXPECT_EQ(kv.size(), 2u);
    EXPECT_EQ(code_of([] { parse_key_values("just words\n"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_key_values(" = 3\n"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { read_key_values("/nonexistent/config.txt"); }), ErrorCode::IoError);
}

TEST(RunConfig, AllKeys) {
    const auto rc = run_config_from(parse_key_values(R"(
input = cells.csv
output_dir = out
target = ws
variables = ws, sin_wd ,t
workers = 4
lag = auto
max_lag = 5
min_size_I2 = 40
min_size_I1 = 20
threshold_y = 0.1
threshold_x = 0.2
alpha = 0.01
aggregation = coefficient
backend = genetic
trigger_alignment = contemporaneous
absolute_means = true
emit_all_causes = yes
seed = 17
ga_population = 32
ga_generations = 10
ga_mutation_rate = 0.1
ga_tournament = 2
)"));
    EXPECT_EQ(rc.input->string(), "cells.csv");
    EXPECT_EQ(rc.output_dir, "out");
    EXPECT_EQ(rc.variables, (std::vector<std::string>{"ws", "sin_wd", "t"}));
    EXPECT_EQ(rc.workers, 4);
    const auto& a = rc.algorithm;
    EXPECT_FALSE(a.lag.has_value());
    EXPECT_EQ(a.max_lag, 5);
    EXPECT_EQ(a.min_size_I2, 40);
    EXPECT_EQ(a.min_size_I1, 20);
    EXPECT_DOUBLE_EQ(a.threshold_y, 0.1);
    EXPECT_DOUBLE_EQ(a.threshold_x, 0.2);
    EXPECT_DOUBLE_EQ(a.alpha, 0.01);
    EXPECT_EQ(a.aggregation, Aggregation::Coefficient);
    EXPECT_EQ(a.backend, Backend::Genetic);
    EXPECT_EQ(a.trigger_alignment, TriggerAlignment::Contemporaneous);
    EXPECT_TRUE(a.absolute_means);
    EXPECT_TRUE(a.emit_all_causes);
    EXPECT_EQ(a.seed, 17u);
    EXPECT_EQ(a.genetic.population, 32);
    EXPECT_EQ(a.genetic.generations, 10);
    EXPECT_DOUBLE_EQ(a.genetic.mutation_rate, 0.1);
    EXPECT_EQ(a.genetic.tournament, 2);
}

TEST(RunConfig, Rejections) {
    EXPECT_EQ(code_of([] { run_config_from({{"colour", "red"}}); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { run_config_from({{"alpha", "small"}}); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { run_config_from({{"lag", "2.5"}}); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { run_config_from({{"backend", "lasso"}}); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { run_config_from({{"absolute_means", "maybe"}}); }), ErrorCode::ConfigError);
    EXPECT_FALSE(run_config_from({}).input.has_value());
}

TEST(ScenarioConfig, KeysAndAlgorithmOverrides) {
    AlgorithmConfig algo;
    const auto s = scenario_from(parse_key_values("length = 400\np = 6\nd_true = 2\ncause_index = 3\n"
                                                  "trigger_index = 4\nt1_true = 200\ngamma_interaction = 0\n"
                                                  "noise_sigma = 0.2\nseed = 5\ninnovation = gamma\nlag = 3\n"),
                                 &algo);
    EXPECT_EQ(s.length, 400);
    EXPECT_EQ(s.p, 6);
    EXPECT_EQ(s.d_true, 2);
    EXPECT_EQ(s.cause_index, 3);
    EXPECT_EQ(s.trigger_index, 4);
    EXPECT_EQ(s.t1_true, 200);
    EXPECT_EQ(s.gamma_interaction, 0.0);
    EXPECT_EQ(s.innovation, Innovation::Gamma);
    EXPECT_EQ(algo.lag, 3);
    EXPECT_EQ(code_of([] { scenario_from({{"workers", "2"}}); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { scenario_from({{"innovation", "cauchy"}}); }), ErrorCode::ConfigError);
}
