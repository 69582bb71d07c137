#pragma once

#include "ctrig/core.hpp"
#include "ctrig/stats.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctrig {

/// A variable is reported as a parent only if one of its lag coefficients
/// exceeds this magnitude.
inline constexpr double kCoefficientTolerance = 1e-6;
inline constexpr Eigen::Index kMaxExhaustiveVariables = 15;

struct SubsetScore {
    std::vector<std::string> subset; // in design order
    double codelength = 0.0;
    RegressionFit fit;
};

/// Granger parents B of a target on one interval.
struct CausalParents {
    std::string target;
    std::vector<std::string> parents;                         // sorted by name
    std::map<std::string, std::vector<double>> coefficients;  // lag 1..d per parent
    int d = 0;
    Interval interval;
    double codelength = 0.0;

    bool contains(std::string_view name) const;
    std::size_t size() const { return parents.size(); }
};

/// Two-part message length of a regressor subset:
///   -loglik(MLE fit on the subset's lag blocks)
///   + 0.5 * (k*d + 1) * ln(r)        parameters (coefficients + intercept)
///   + ln C(m, k)                      which k of the m candidates were chosen
/// This stands in for the full MML87 codelength of the HMML method; it keeps
/// the fit/complexity trade-off and is exact for the gaussian case up to
/// constants shared by all subsets.
SubsetScore mml_score(const Eigen::VectorXd& target_rows, const LagDesign& design,
                      std::span<const std::string> subset, const FittedDistribution& distribution);

/// Scores all 2^m subsets; ties go to the smaller subset, then the
/// lexicographically smaller name list. Throws TooManyVariables when m > 15.
CausalParents search_exhaustive(const Eigen::VectorXd& target_rows, const LagDesign& design,
                                const FittedDistribution& distribution);

struct GeneticConfig {
    int population = 64;
    int generations = 100;
    double mutation_rate = -1.0; // negative means 1/m
    int tournament = 3;
    std::uint64_t seed = 0;
    /// Bitmasks over design.variable_order placed first in the initial population.
    std::vector<std::uint64_t> initial_population;
};

/// Bitmask genetic search (tournament selection, single-point crossover,
/// per-bit mutation, one elite). Returns the best subset ever evaluated.
CausalParents search_genetic(const Eigen::VectorXd& target_rows, const LagDesign& design,
                             const FittedDistribution& distribution, const GeneticConfig& config);

enum class Backend { Exhaustive, Genetic };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view name);

/// Any causal discovery routine with this shape can replace the MML search.
using ParentFinder = std::function<CausalParents(const StandardizedPanel& panel,
                                                 std::string_view target, Interval interval, int d)>;

/// Parents of `target` on `interval`: builds the lag design over every panel
/// variable (the target's own history included), fits the target's
/// distribution on the interval and runs the chosen search.
/// Throws IntervalTooShort when |interval| <= d + 3.
CausalParents infer_parents(const StandardizedPanel& panel, std::string_view target,
                            Interval interval, int d, Backend backend,
                            const GeneticConfig& genetic = {});

ParentFinder make_parent_finder(Backend backend, const GeneticConfig& genetic = {});

} // namespace ctrig
