#include "ctrig/hmml.hpp"

#include "ctrig/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <unordered_map>

namespace ctrig {

namespace {

using Mask = std::uint64_t;

double log_binomial(Eigen::Index m, Eigen::Index k) {
    return std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(m - k) + 1.0);
}

std::vector<std::string> names_of(const LagDesign& design, Mask mask) {
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < design.m(); ++j) {
        if (mask & (Mask{1} << j)) {
            out.push_back(design.variable_order[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
}

SubsetScore score_mask(const Eigen::VectorXd& y, const LagDesign& design, Mask mask,
                       const FittedDistribution& dist) {
    const Eigen::Index d = design.d;
    const auto k = static_cast<Eigen::Index>(std::popcount(mask));
    Eigen::MatrixXd columns(design.rows(), k * d);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < design.m(); ++j) {
        if (mask & (Mask{1} << j)) {
            columns.middleCols(c * d, d) = design.matrix.middleCols(j * d, d);
            ++c;
        }
    }
    SubsetScore s;
    s.subset = names_of(design, mask);
    s.fit = fit_regression(y, columns, dist);
    const double r = static_cast<double>(y.size());
    s.codelength = -s.fit.loglik + 0.5 * (static_cast<double>(k * d) + 1.0) * std::log(r) +
                   log_binomial(design.m(), k);
    return s;
}

// Memoized scorer shared by both searches. Subsets that cannot be fitted
// (singular, or more parameters than rows) score +inf.
class Scorer {
public:
    Scorer(const Eigen::VectorXd& y, const LagDesign& design, const FittedDistribution& dist)
        : y_(y), design_(design), dist_(dist) {}

    double operator()(Mask mask) {
        if (auto it = cache_.find(mask); it != cache_.end()) {
            return it->second;
        }
        double value = std::numeric_limits<double>::infinity();
        try {
            value = score_mask(y_, design_, mask, dist_).codelength;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularDesign && e.code() != ErrorCode::DegreesOfFreedom) {
                throw;
            }
        }
        cache_.emplace(mask, value);
        return value;
    }

    // Strict order: codelength, then subset size, then names.
    bool better(Mask a, Mask b) {
        const double ca = (*this)(a);
        const double cb = (*this)(b);
        if (ca != cb) {
            return ca < cb;
        }
        const int pa = std::popcount(a);
        const int pb = std::popcount(b);
        if (pa != pb) {
            return pa < pb;
        }
        return sorted(names_of(design_, a)) < sorted(names_of(design_, b));
    }

private:
    const Eigen::VectorXd& y_;
    const LagDesign& design_;
    const FittedDistribution& dist_;
    std::unordered_map<Mask, double> cache_;
};

CausalParents to_parents(const Eigen::VectorXd& y, const LagDesign& design, Mask mask,
                         const FittedDistribution& dist) {
    const SubsetScore s = score_mask(y, design, mask, dist);
    CausalParents out;
    out.d = design.d;
    out.codelength = s.codelength;
    const auto d = static_cast<std::size_t>(design.d);
    for (std::size_t i = 0; i < s.subset.size(); ++i) {
        std::vector<double> coefs(d);
        double largest = 0.0;
        for (std::size_t l = 0; l < d; ++l) {
            coefs[l] = s.fit.coefficients(static_cast<Eigen::Index>(1 + i * d + l));
            largest = std::max(largest, std::abs(coefs[l]));
        }
        if (largest > kCoefficientTolerance) {
            out.parents.push_back(s.subset[i]);
            out.coefficients.emplace(s.subset[i], std::move(coefs));
        }
    }
    std::sort(out.parents.begin(), out.parents.end());
    return out;
}

void check_target(const Eigen::VectorXd& y, const LagDesign& design) {
    if (y.size() != design.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "target length does not match the design rows");
    }
}

} // namespace

bool CausalParents::contains(std::string_view name) const {
    return std::find(parents.begin(), parents.end(), name) != parents.end();
}

SubsetScore mml_score(const Eigen::VectorXd& target_rows, const LagDesign& design,
                      std::span<const std::string> subset, const FittedDistribution& distribution) {
    check_target(target_rows, design);
    Mask mask = 0;
    for (const auto& name : subset) {
        const Mask bit = Mask{1} << design.block_index(name);
        if (mask & bit) {
            // Repeating a variable duplicates its columns.
            throw Error(ErrorCode::SingularDesign, "subset repeats variable '" + name + "'");
        }
        mask |= bit;
    }
    return score_mask(target_rows, design, mask, distribution);
}

CausalParents search_exhaustive(const Eigen::VectorXd& target_rows, const LagDesign& design,
                                const FittedDistribution& distribution) {
    check_target(target_rows, design);
    if (design.m() > kMaxExhaustiveVariables) {
        throw Error(ErrorCode::TooManyVariables,
                    std::to_string(design.m()) + " variables exceed the exhaustive limit of " +
                        std::to_string(kMaxExhaustiveVariables) + "; use the genetic search");
    }
    Scorer scorer(target_rows, design, distribution);
    Mask best = 0;
    const Mask end = Mask{1} << design.m();
    for (Mask mask = 1; mask < end; ++mask) {
        if (scorer.better(mask, best)) {
            best = mask;
        }
    }
    return to_parents(target_rows, design, best, distribution);
}

CausalParents search_genetic(const Eigen::VectorXd& target_rows, const LagDesign& design,
                             const FittedDistribution& distribution, const GeneticConfig& config) {
    check_target(target_rows, design);
    const Eigen::Index m = design.m();
    if (m > 63) {
        throw Error(ErrorCode::TooManyVariables, "genetic search supports at most 63 variables");
    }
    if (config.population < 1 || config.generations < 0 || config.tournament < 1) {
        throw Error(ErrorCode::InvalidArgument, "invalid genetic search configuration");
    }
    const double mutation = config.mutation_rate < 0.0 ? 1.0 / static_cast<double>(m)
                                                       : config.mutation_rate;
    const Mask full = (Mask{1} << m) - 1;

    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<Mask> any_mask(0, full);
    std::bernoulli_distribution flip(std::clamp(mutation, 0.0, 1.0));
    const auto pop_size = static_cast<std::size_t>(config.population);
    std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);

    Scorer scorer(target_rows, design, distribution);
    std::vector<Mask> population;
    population.reserve(pop_size);
    for (Mask mask : config.initial_population) {
        if (population.size() < pop_size) population.push_back(mask & full);
    }
    while (population.size() < pop_size) population.push_back(any_mask(rng));

    Mask best = population.front();
    for (Mask mask : population) {
        if (scorer.better(mask, best)) best = mask;
    }

    auto tournament = [&]() {
        Mask winner = population[pick(rng)];
        for (int i = 1; i < config.tournament; ++i) {
            const Mask challenger = population[pick(rng)];
            if (scorer.better(challenger, winner)) winner = challenger;
        }
        return winner;
    };

    std::vector<Mask> next;
    next.reserve(pop_size);
    for (int gen = 0; gen < config.generations; ++gen) {
        next.clear();
        next.push_back(best);
        while (next.size() < pop_size) {
            const Mask a = tournament();
            const Mask b = tournament();
            Mask child_a = a;
            Mask child_b = b;
            if (m > 1) {
                const auto cut = std::uniform_int_distribution<Eigen::Index>(1, m - 1)(rng);
                const Mask low = (Mask{1} << cut) - 1;
                child_a = (a & low) | (b & ~low & full);
                child_b = (b & low) | (a & ~low & full);
            }
            for (Mask* child : {&child_a, &child_b}) {
                for (Eigen::Index j = 0; j < m; ++j) {
                    if (flip(rng)) *child ^= Mask{1} << j;
                }
                if (next.size() < pop_size) next.push_back(*child);
            }
        }
        population.swap(next);
        for (Mask mask : population) {
            if (scorer.better(mask, best)) best = mask;
        }
    }
    return to_parents(target_rows, design, best, distribution);
}

std::string_view to_string(Backend backend) {
    return backend == Backend::Exhaustive ? "exhaustive" : "genetic";
}

Backend backend_from_string(std::string_view name) {
    if (name == "exhaustive") return Backend::Exhaustive;
    if (name == "genetic") return Backend::Genetic;
    throw Error(ErrorCode::InvalidArgument, "unknown backend '" + std::string(name) + "'");
}

CausalParents infer_parents(const StandardizedPanel& panel, std::string_view target,
                            Interval interval, int d, Backend backend,
                            const GeneticConfig& genetic) {
    const auto& full = panel.panel();
    full.index_of(target);
    if (interval.begin < 0 || interval.end > full.length() || interval.size() <= d + 3) {
        throw Error(ErrorCode::IntervalTooShort,
                    "interval [" + std::to_string(interval.begin) + ", " +
                        std::to_string(interval.end) + ") is too short for lag " +
                        std::to_string(d));
    }
    const TimeSeriesPanel part = full.slice(interval);
    const LagDesign design = build_lag_design(part, part.names(), target, d);

    FittedDistribution dist = FittedDistribution::gaussian();
    const Eigen::VectorXd y = part.column(target);
    if (static_cast<std::size_t>(y.size()) >= kMinDistributionSamples) {
        try {
            dist = fit_distribution_ks({y.data(), static_cast<std::size_t>(y.size())});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ConstantSeries) throw;
        }
    }

    CausalParents out = backend == Backend::Exhaustive
                            ? search_exhaustive(design.target_rows, design, dist)
                            : search_genetic(design.target_rows, design, dist, genetic);
    out.target = std::string(target);
    out.interval = interval;
    return out;
}

ParentFinder make_parent_finder(Backend backend, const GeneticConfig& genetic) {
    return [backend, genetic](const StandardizedPanel& panel, std::string_view target,
                              Interval interval, int d) {
        return infer_parents(panel, target, interval, d, backend, genetic);
    };
}

} // namespace ctrig
