#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctrig {

/// Grid provenance of a panel: one location at one pressure level.
struct CellMeta {
    double longitude = 0.0;
    double latitude = 0.0;
    int pressure_level = 0; // hPa

    friend bool operator==(const CellMeta&, const CellMeta&) = default;
};

/// Half-open index range [begin, end) over the time axis.
struct Interval {
    Eigen::Index begin = 0;
    Eigen::Index end = 0;

    Eigen::Index size() const { return end - begin; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Aligned multivariate series: rows are time steps, columns are variables.
class TimeSeriesPanel {
public:
    /// Empty `timestamps` means 0, 1, ..., T-1.
    TimeSeriesPanel(std::vector<std::string> names, Eigen::MatrixXd values,
                    std::vector<std::int64_t> timestamps = {},
                    std::optional<CellMeta> meta = std::nullopt);

    const std::vector<std::string>& names() const { return names_; }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::int64_t>& timestamps() const { return timestamps_; }
    const std::optional<CellMeta>& meta() const { return meta_; }

    Eigen::Index length() const { return values_.rows(); }
    Eigen::Index width() const { return values_.cols(); }

    bool contains(std::string_view name) const;
    /// Throws UnknownVariable.
    Eigen::Index index_of(std::string_view name) const;
    Eigen::VectorXd column(std::string_view name) const;

    TimeSeriesPanel slice(Interval rows) const;
    TimeSeriesPanel select(std::span<const std::string> names) const;
    /// Appends a column, or replaces it when the name already exists.
    TimeSeriesPanel with_column(const std::string& name, const Eigen::VectorXd& values) const;

private:
    std::vector<std::string> names_;
    Eigen::MatrixXd values_;
    std::vector<std::int64_t> timestamps_;
    std::optional<CellMeta> meta_;
};

/// Z-scored panel plus the per-column transform (population convention).
class StandardizedPanel {
public:
    StandardizedPanel(TimeSeriesPanel standardized, Eigen::VectorXd means, Eigen::VectorXd stds)
        : panel_(std::move(standardized)), means_(std::move(means)), stds_(std::move(stds)) {}

    const TimeSeriesPanel& panel() const { return panel_; }
    const Eigen::VectorXd& means() const { return means_; }
    const Eigen::VectorXd& stds() const { return stds_; }

    TimeSeriesPanel inverse() const;

private:
    TimeSeriesPanel panel_;
    Eigen::VectorXd means_;
    Eigen::VectorXd stds_;
};

/// Lagged design matrix with one contiguous block of `d` columns per variable.
/// Row i predicts time t = d + i (0-based); column j*d + (l-1) holds x_j at t - l.
struct LagDesign {
    Eigen::MatrixXd matrix;
    Eigen::Index n = 0; // interval length
    int d = 0;
    std::vector<std::string> variable_order;
    Eigen::VectorXd target_rows;

    Eigen::Index m() const { return static_cast<Eigen::Index>(variable_order.size()); }
    Eigen::Index rows() const { return matrix.rows(); }
    /// Position of `name` in variable_order; throws UnknownVariable.
    Eigen::Index block_index(std::string_view name) const;
    /// Columns of one variable's lag block.
    Eigen::MatrixXd block(std::string_view name) const;
};

enum class Aggregation { Unit, Coefficient };

inline constexpr double kConstantSeriesTolerance = 1e-12;

/// Throws ConstantSeries when a column's population std is <= 1e-12.
StandardizedPanel standardize(const TimeSeriesPanel& panel);

LagDesign build_lag_design(const TimeSeriesPanel& panel, std::span<const std::string> variables,
                           std::string_view target, int d);
LagDesign build_lag_design(const StandardizedPanel& panel, std::span<const std::string> variables,
                           std::string_view target, int d);

/// Drops the lag block of `name`; throws UnknownVariable or EmptyDesign.
LagDesign remove_variable_block(const LagDesign& design, std::string_view name);

/// X * 1 in unit mode, X * beta in coefficient mode.
Eigen::VectorXd aggregate_design(const LagDesign& design, Aggregation mode,
                                 std::span<const double> coefficients = {});

} // namespace ctrig
