#include "ctrig/core.hpp"

#include "ctrig/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace ctrig {

TimeSeriesPanel::TimeSeriesPanel(std::vector<std::string> names, Eigen::MatrixXd values,
                                 std::vector<std::int64_t> timestamps, std::optional<CellMeta> meta)
    : names_(std::move(names)), values_(std::move(values)), timestamps_(std::move(timestamps)),
      meta_(meta) {
    if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
        throw Error(ErrorCode::InvalidPanel, "panel has " + std::to_string(names_.size()) +
                                                 " names but " + std::to_string(values_.cols()) +
                                                 " columns");
    }
    if (values_.cols() == 0) {
        throw Error(ErrorCode::InvalidPanel, "panel has no variables");
    }
    if (values_.rows() < 2) {
        throw Error(ErrorCode::InvalidPanel, "panel needs at least 2 time steps");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
        if (name.empty() || !seen.insert(name).second) {
            throw Error(ErrorCode::InvalidPanel, "variable names must be unique and nonempty: '" +
                                                     name + "'");
        }
    }
    if (!values_.allFinite()) {
        throw Error(ErrorCode::InvalidPanel, "panel contains missing or non-finite values");
    }
    if (timestamps_.empty()) {
        timestamps_.resize(static_cast<std::size_t>(values_.rows()));
        std::iota(timestamps_.begin(), timestamps_.end(), std::int64_t{0});
    }
    if (static_cast<Eigen::Index>(timestamps_.size()) != values_.rows()) {
        throw Error(ErrorCode::InvalidPanel, "timestamp count does not match panel length");
    }
    for (std::size_t i = 1; i < timestamps_.size(); ++i) {
        if (timestamps_[i] <= timestamps_[i - 1]) {
            throw Error(ErrorCode::InvalidPanel, "timestamps must be strictly increasing");
        }
    }
}

bool TimeSeriesPanel::contains(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Eigen::Index TimeSeriesPanel::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw Error(ErrorCode::UnknownVariable, "unknown variable '" + std::string(name) + "'");
    }
    return static_cast<Eigen::Index>(it - names_.begin());
}

Eigen::VectorXd TimeSeriesPanel::column(std::string_view name) const {
    return values_.col(index_of(name));
}

TimeSeriesPanel TimeSeriesPanel::slice(Interval rows) const {
    if (rows.begin < 0 || rows.end > length() || rows.begin >= rows.end) {
        throw Error(ErrorCode::EmptyRange, "slice [" + std::to_string(rows.begin) + ", " +
                                               std::to_string(rows.end) + ") out of range");
    }
    std::vector<std::int64_t> ts(timestamps_.begin() + rows.begin, timestamps_.begin() + rows.end);
    return TimeSeriesPanel(names_, values_.middleRows(rows.begin, rows.size()), std::move(ts), meta_);
}

TimeSeriesPanel TimeSeriesPanel::select(std::span<const std::string> names) const {
    Eigen::MatrixXd out(length(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = values_.col(index_of(names[j]));
    }
    return TimeSeriesPanel({names.begin(), names.end()}, std::move(out), timestamps_, meta_);
}

TimeSeriesPanel TimeSeriesPanel::with_column(const std::string& name,
                                             const Eigen::VectorXd& values) const {
    if (values.size() != length()) {
        throw Error(ErrorCode::DimensionMismatch, "column '" + name + "' has wrong length");
    }
    if (contains(name)) {
        Eigen::MatrixXd out = values_;
        out.col(index_of(name)) = values;
        return TimeSeriesPanel(names_, std::move(out), timestamps_, meta_);
    }
    Eigen::MatrixXd out(length(), width() + 1);
    out.leftCols(width()) = values_;
    out.col(width()) = values;
    auto names = names_;
    names.push_back(name);
    return TimeSeriesPanel(std::move(names), std::move(out), timestamps_, meta_);
}

TimeSeriesPanel StandardizedPanel::inverse() const {
    Eigen::MatrixXd raw = panel_.values();
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        raw.col(j) = raw.col(j).array() * stds_(j) + means_(j);
    }
    return TimeSeriesPanel(panel_.names(), std::move(raw), panel_.timestamps(), panel_.meta());
}

StandardizedPanel standardize(const TimeSeriesPanel& panel) {
    const auto& x = panel.values();
    const double count = static_cast<double>(x.rows());
    Eigen::VectorXd means(x.cols());
    Eigen::VectorXd stds(x.cols());
    Eigen::MatrixXd z(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mean = x.col(j).sum() / count;
        const Eigen::ArrayXd centered = x.col(j).array() - mean;
        const double sd = std::sqrt(centered.square().sum() / count);
        if (!(sd > kConstantSeriesTolerance)) {
            throw Error(ErrorCode::ConstantSeries,
                        "variable '" + panel.names()[static_cast<std::size_t>(j)] +
                            "' is constant and cannot be standardized");
        }
        means(j) = mean;
        stds(j) = sd;
        z.col(j) = centered / sd;
    }
    return {TimeSeriesPanel(panel.names(), std::move(z), panel.timestamps(), panel.meta()),
            std::move(means), std::move(stds)};
}

Eigen::Index LagDesign::block_index(std::string_view name) const {
    const auto it = std::find(variable_order.begin(), variable_order.end(), name);
    if (it == variable_order.end()) {
        throw Error(ErrorCode::UnknownVariable,
                    "variable '" + std::string(name) + "' is not in the design");
    }
    return static_cast<Eigen::Index>(it - variable_order.begin());
}

Eigen::MatrixXd LagDesign::block(std::string_view name) const {
    return matrix.middleCols(block_index(name) * d, d);
}

LagDesign build_lag_design(const TimeSeriesPanel& panel, std::span<const std::string> variables,
                           std::string_view target, int d) {
    if (d < 1) {
        throw Error(ErrorCode::InvalidArgument, "lag must be positive");
    }
    const Eigen::Index n = panel.length();
    if (d >= n) {
        throw Error(ErrorCode::LagTooLarge, "lag " + std::to_string(d) +
                                                " must be smaller than the series length " +
                                                std::to_string(n));
    }
    if (variables.empty()) {
        throw Error(ErrorCode::EmptyDesign, "design needs at least one variable");
    }
    const Eigen::Index y = panel.index_of(target);

    LagDesign design;
    design.n = n;
    design.d = d;
    design.variable_order.assign(variables.begin(), variables.end());
    const Eigen::Index rows = n - d;
    const auto m = static_cast<Eigen::Index>(variables.size());
    design.matrix.resize(rows, m * d);
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto col = panel.values().col(panel.index_of(variables[static_cast<std::size_t>(j)]));
        for (int lag = 1; lag <= d; ++lag) {
            design.matrix.col(j * d + lag - 1) = col.segment(d - lag, rows);
        }
    }
    design.target_rows = panel.values().col(y).segment(d, rows);
    return design;
}

LagDesign build_lag_design(const StandardizedPanel& panel, std::span<const std::string> variables,
                           std::string_view target, int d) {
    return build_lag_design(panel.panel(), variables, target, d);
}

LagDesign remove_variable_block(const LagDesign& design, std::string_view name) {
    const Eigen::Index k = design.block_index(name);
    if (design.m() == 1) {
        throw Error(ErrorCode::EmptyDesign,
                    "removing '" + std::string(name) + "' would leave an empty design");
    }
    LagDesign out;
    out.n = design.n;
    out.d = design.d;
    out.target_rows = design.target_rows;
    out.variable_order = design.variable_order;
    out.variable_order.erase(out.variable_order.begin() + k);
    const Eigen::Index d = design.d;
    const Eigen::Index before = k * d;
    const Eigen::Index after = design.matrix.cols() - before - d;
    out.matrix.resize(design.rows(), before + after);
    out.matrix.leftCols(before) = design.matrix.leftCols(before);
    out.matrix.rightCols(after) = design.matrix.rightCols(after);
    return out;
}

Eigen::VectorXd aggregate_design(const LagDesign& design, Aggregation mode,
                                 std::span<const double> coefficients) {
    if (mode == Aggregation::Unit) {
        return design.matrix.rowwise().sum();
    }
    if (static_cast<Eigen::Index>(coefficients.size()) != design.matrix.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(design.matrix.cols()) + " coefficients, got " +
                        std::to_string(coefficients.size()));
    }
    const Eigen::Map<const Eigen::VectorXd> beta(coefficients.data(),
                                                 static_cast<Eigen::Index>(coefficients.size()));
    return design.matrix * beta;
}

} // namespace ctrig
