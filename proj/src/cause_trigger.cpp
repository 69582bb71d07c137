#include "ctrig/cause_trigger.hpp"

#include "ctrig/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace ctrig {

namespace {

std::span<const double> column_span(const TimeSeriesPanel& panel, std::string_view name) {
    const auto j = panel.index_of(name);
    return {panel.values().col(j).data(), static_cast<std::size_t>(panel.length())};
}

FittedDistribution fit_or_gaussian(const Eigen::VectorXd& y) {
    if (static_cast<std::size_t>(y.size()) < kMinDistributionSamples) {
        return FittedDistribution::gaussian();
    }
    try {
        return fit_distribution_ks({y.data(), static_cast<std::size_t>(y.size())});
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ConstantSeries) throw;
        return FittedDistribution::gaussian();
    }
}

// B2 members in panel column order.
std::vector<std::string> in_panel_order(const TimeSeriesPanel& panel, const CausalParents& parents) {
    std::vector<std::string> out;
    for (const auto& name : panel.names()) {
        if (parents.contains(name)) out.push_back(name);
    }
    return out;
}

double abs_shift(const TimeSeriesPanel& panel, std::string_view name, const SplitResult& split) {
    return std::abs(mean_shift(column_span(panel, name), split.I1(), split.I2()));
}

} // namespace

std::string_view to_string(TriggerAlignment alignment) {
    return alignment == TriggerAlignment::Lagged ? "lagged" : "contemporaneous";
}

TriggerAlignment alignment_from_string(std::string_view name) {
    if (name == "lagged") return TriggerAlignment::Lagged;
    if (name == "contemporaneous") return TriggerAlignment::Contemporaneous;
    throw Error(ErrorCode::InvalidArgument, "unknown trigger alignment '" + std::string(name) + "'");
}

std::string_view to_string(Aggregation mode) {
    return mode == Aggregation::Unit ? "unit" : "coefficient";
}

Aggregation aggregation_from_string(std::string_view name) {
    if (name == "unit") return Aggregation::Unit;
    if (name == "coefficient") return Aggregation::Coefficient;
    throw Error(ErrorCode::InvalidArgument, "unknown aggregation mode '" + std::string(name) + "'");
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
    case StopReason::NoSplit: return "no-split";
    case StopReason::TooFewParents: return "too-few-parents";
    case StopReason::Completed: return "completed";
    }
    return "completed";
}

void AlgorithmConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
    if (lag && *lag < 1) fail("lag must be positive");
    if (max_lag < 1) fail("max_lag must be positive");
    if (min_size_I2 < 1) fail("min_size_I2 must be positive");
    if (min_size_I1 < 1) fail("min_size_I1 must be positive");
    if (!(threshold_y >= 0.0) || !(threshold_x >= 0.0)) fail("thresholds must be nonnegative");
    if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
}

SplitOptions AlgorithmConfig::split_options() const {
    SplitOptions options;
    options.min_size_I2 = min_size_I2;
    options.min_size_I1 = min_size_I1;
    options.threshold_y = threshold_y;
    options.absolute_means = absolute_means;
    return options;
}

std::vector<std::string> candidate_triggers(const CausalParents& parents_I2,
                                            const StandardizedPanel& panel,
                                            const SplitResult& split, std::string_view target,
                                            double threshold_x) {
    std::vector<std::string> out;
    for (const auto& name : parents_I2.parents) {
        if (name == target) continue;
        const double shift = mean_shift(column_span(panel.panel(), name), split.I1(), split.I2());
        if (shift > threshold_x) out.push_back(name);
    }
    return out;
}

ModerationResult moderation_test(const StandardizedPanel& panel, std::string_view target,
                                 const CausalParents& parents_I2, std::string_view trigger,
                                 const AlgorithmConfig& config) {
    if (!parents_I2.contains(trigger)) {
        throw Error(ErrorCode::UnknownVariable,
                    "trigger candidate '" + std::string(trigger) + "' is not in B2");
    }
    const int d = parents_I2.d;
    const Interval i2 = parents_I2.interval;
    if (i2.size() - d <= 4) {
        throw Error(ErrorCode::IntervalTooShort,
                    "I2 of length " + std::to_string(i2.size()) + " is too short for lag " +
                        std::to_string(d));
    }
    const TimeSeriesPanel part = panel.panel().slice(i2);
    const auto variables = in_panel_order(part, parents_I2);
    const LagDesign design = build_lag_design(part, variables, target, d);
    const LagDesign without = remove_variable_block(design, trigger);

    Eigen::VectorXd v;
    if (config.aggregation == Aggregation::Unit) {
        v = aggregate_design(without, Aggregation::Unit);
    } else {
        std::vector<double> beta;
        for (const auto& name : without.variable_order) {
            const auto& c = parents_I2.coefficients.at(name);
            beta.insert(beta.end(), c.begin(), c.end());
        }
        v = aggregate_design(without, Aggregation::Coefficient, beta);
    }

    const Eigen::Index r = design.rows();
    const Eigen::VectorXd xs = config.trigger_alignment == TriggerAlignment::Lagged
                                   ? Eigen::VectorXd(design.block(trigger).col(0))
                                   : Eigen::VectorXd(part.column(trigger).segment(d, r));
    const Eigen::VectorXd interaction = v.cwiseProduct(xs);
    const FittedDistribution dist = fit_or_gaussian(part.column(target));

    Eigen::MatrixXd reduced_cols(r, 1);
    reduced_cols.col(0) = v;
    Eigen::MatrixXd full_cols(r, 2);
    full_cols.col(0) = v;
    full_cols.col(1) = interaction;
    const RegressionFit reduced = fit_regression(design.target_rows, reduced_cols, dist);
    const RegressionFit full = fit_regression(design.target_rows, full_cols, dist);

    ModerationResult out;
    out.trigger_candidate = std::string(trigger);
    out.f = f_test_nested(reduced, full, config.alpha);
    out.is_moderator = out.f.reject_h0;
    out.rss_reduced = reduced.rss;
    out.rss_full = full.rss;
    out.family = dist.family;
    return out;
}

std::string select_triggered_cause(const StandardizedPanel& panel, const CausalParents& parents_I2,
                                   std::string_view trigger, std::string_view /*target*/,
                                   const SplitResult& split) {
    std::string best;
    double best_shift = -1.0;
    // parents are sorted by name, so strict > keeps the lexicographic tie rule.
    for (const auto& name : parents_I2.parents) {
        if (name == trigger) continue;
        const double shift = abs_shift(panel.panel(), name, split);
        if (shift > best_shift) {
            best_shift = shift;
            best = name;
        }
    }
    if (best.empty()) {
        throw Error(ErrorCode::NoEligibleCause,
                    "no cause besides '" + std::string(trigger) + "' in B2");
    }
    return best;
}

AlgorithmOutput run(const TimeSeriesPanel& panel, std::string_view target,
                    const AlgorithmConfig& config) {
    GeneticConfig genetic = config.genetic;
    genetic.seed = config.seed;
    return run(panel, target, config, make_parent_finder(config.backend, genetic));
}

AlgorithmOutput run(const TimeSeriesPanel& panel, std::string_view target,
                    const AlgorithmConfig& config, const ParentFinder& finder) {
    config.validate();
    AlgorithmOutput out;
    out.target = std::string(target);
    out.cell_meta = panel.meta();

    const Eigen::VectorXd raw_y = panel.column(target);
    const double mean_y = raw_y.mean();
    const double sd_y = std::sqrt((raw_y.array() - mean_y).square().mean());
    if (!(sd_y > kConstantSeriesTolerance)) {
        // A flat target has no rise to explain and no causes to find.
        out.d = config.lag.value_or(1);
        out.split = find_split(column_span(panel, target), config.split_options());
        out.split.accepted = false;
        out.parents_full = CausalParents{};
        out.parents_full->target = out.target;
        out.parents_full->d = out.d;
        out.parents_full->interval = {0, panel.length()};
        out.stop_reason = StopReason::NoSplit;
        return out;
    }

    const StandardizedPanel sp = standardize(panel);
    if (config.lag) {
        out.d = *config.lag;
    } else {
        const int d_max = std::min<int>(config.max_lag, static_cast<int>((panel.length() - 1) / 3));
        out.d = select_lag_aic(sp, std::max(d_max, 1));
    }
    const int d = out.d;

    out.split = find_split(column_span(sp.panel(), target), config.split_options());
    if (!out.split.accepted) {
        out.parents_full = finder(sp, target, {0, panel.length()}, d);
        out.causes = out.parents_full->parents;
        out.stop_reason = StopReason::NoSplit;
        return out;
    }

    const Interval i1 = out.split.I1();
    if (i1.size() > d + 3) {
        out.parents_I1 = finder(sp, target, i1, d);
    } else {
        out.parents_I1.target = out.target;
        out.parents_I1.d = d;
        out.parents_I1.interval = i1;
    }
    out.parents_I2 = finder(sp, target, out.split.I2(), d);
    const CausalParents& b2 = out.parents_I2;

    if (b2.size() < 2) {
        out.causes = b2.parents;
        out.stop_reason = StopReason::TooFewParents;
        return out;
    }

    std::set<std::string> selected;
    for (const auto& candidate :
         candidate_triggers(b2, sp, out.split, target, config.threshold_x)) {
        ModerationResult mod;
        try {
            mod = moderation_test(sp, target, b2, candidate, config);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularDesign) throw;
            mod.trigger_candidate = candidate;
            mod.f.alpha = config.alpha;
            mod.f.p_value = 1.0;
        }
        out.moderation_tests.push_back(mod);
        if (!mod.is_moderator) continue;
        out.triggers.push_back(candidate);

        std::vector<std::string> causes;
        if (config.emit_all_causes) {
            for (const auto& name : b2.parents) {
                if (name != candidate) causes.push_back(name);
            }
            std::stable_sort(causes.begin(), causes.end(), [&](const auto& a, const auto& b) {
                return abs_shift(sp.panel(), a, out.split) > abs_shift(sp.panel(), b, out.split);
            });
        } else {
            causes.push_back(select_triggered_cause(sp, b2, candidate, target, out.split));
        }
        for (const auto& cause : causes) {
            selected.insert(cause);
            CauseTriggerPair pair;
            pair.cause = cause;
            pair.trigger = candidate;
            pair.cell_meta = panel.meta();
            pair.moderation = mod;
            pair.cause_mean_shift = abs_shift(sp.panel(), cause, out.split);
            out.pairs.push_back(std::move(pair));
        }
    }

    std::set<std::string> causes(selected.begin(), selected.end());
    for (const auto& name : b2.parents) {
        if (std::find(out.triggers.begin(), out.triggers.end(), name) == out.triggers.end()) {
            causes.insert(name);
        }
    }
    out.causes.assign(causes.begin(), causes.end());
    std::sort(out.triggers.begin(), out.triggers.end());
    out.stop_reason = StopReason::Completed;
    return out;
}

} // namespace ctrig
