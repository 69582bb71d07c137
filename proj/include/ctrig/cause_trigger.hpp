#pragma once

#include "ctrig/changepoint.hpp"
#include "ctrig/core.hpp"
#include "ctrig/hmml.hpp"
#include "ctrig/stats.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctrig {

/// Which value of the trigger multiplies V^t in the interaction term.
/// Lagged uses x_s^{t-1} so every regressor precedes the effect.
enum class TriggerAlignment { Lagged, Contemporaneous };

std::string_view to_string(TriggerAlignment alignment);
TriggerAlignment alignment_from_string(std::string_view name);
std::string_view to_string(Aggregation mode);
Aggregation aggregation_from_string(std::string_view name);

struct AlgorithmConfig {
    /// Shared lag d; nullopt selects it by AIC over 1..max_lag.
    std::optional<int> lag = 2;
    int max_lag = 6;
    Eigen::Index min_size_I2 = 30;
    Eigen::Index min_size_I1 = 30;
    double threshold_y = 0.0;
    double threshold_x = 0.0;
    double alpha = 0.05;
    Aggregation aggregation = Aggregation::Unit;
    Backend backend = Backend::Exhaustive;
    GeneticConfig genetic;
    TriggerAlignment trigger_alignment = TriggerAlignment::Lagged;
    bool absolute_means = false;
    /// Emit every eligible cause per trigger, ranked by |mean shift|.
    bool emit_all_causes = false;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
    SplitOptions split_options() const;
};

struct ModerationResult {
    std::string trigger_candidate;
    FTestResult f;
    bool is_moderator = false;
    double rss_reduced = 0.0;
    double rss_full = 0.0;
    Family family = Family::Gaussian;
};

struct CauseTriggerPair {
    std::string cause;
    std::string trigger;
    std::optional<CellMeta> cell_meta;
    ModerationResult moderation;
    double cause_mean_shift = 0.0;
};

enum class StopReason { NoSplit, TooFewParents, Completed };
std::string_view to_string(StopReason reason);

struct AlgorithmOutput {
    std::string target;
    int d = 0;
    std::vector<std::string> causes;   // C, sorted
    std::vector<std::string> triggers; // T, sorted
    std::vector<CauseTriggerPair> pairs;
    SplitResult split;
    CausalParents parents_I1; // B1
    CausalParents parents_I2; // B2
    /// Parents over the whole window; only set when no split was accepted.
    std::optional<CausalParents> parents_full;
    std::vector<ModerationResult> moderation_tests;
    StopReason stop_reason = StopReason::Completed;
    std::optional<CellMeta> cell_meta;
};

/// Members of B2 other than the target whose mean rises by more than threshold_x.
std::vector<std::string> candidate_triggers(const CausalParents& parents_I2,
                                            const StandardizedPanel& panel,
                                            const SplitResult& split, std::string_view target,
                                            double threshold_x);

/// Fits y = g0 + g1 V and y = g0 + g1 V + g2 V x_s on I2 (the interval of
/// parents_I2), where V aggregates the lag design of B2 without x_s, and
/// F-tests g2. Throws IntervalTooShort when |I2| - d <= 4.
ModerationResult moderation_test(const StandardizedPanel& panel, std::string_view target,
                                 const CausalParents& parents_I2, std::string_view trigger,
                                 const AlgorithmConfig& config);

/// Member of B2 \ {trigger} with the largest |mean(I1) - mean(I2)|; ties go to
/// the lexicographically first name. Throws NoEligibleCause.
std::string select_triggered_cause(const StandardizedPanel& panel, const CausalParents& parents_I2,
                                   std::string_view trigger, std::string_view target,
                                   const SplitResult& split);

/// Full cause/trigger analysis of one panel.
AlgorithmOutput run(const TimeSeriesPanel& panel, std::string_view target,
                    const AlgorithmConfig& config);
/// Same, with a caller-supplied causal discovery backend.
AlgorithmOutput run(const TimeSeriesPanel& panel, std::string_view target,
                    const AlgorithmConfig& config, const ParentFinder& finder);

} // namespace ctrig
