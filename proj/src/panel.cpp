#include "panelkt/panel.hpp"

#include "panelkt/errors.hpp"

#include <cmath>

namespace panelkt {

SamplePanel::SamplePanel(Matrix values, std::vector<double> grid)
    : values_(std::move(values)), grid_(std::move(grid)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw InputError("sample panel must have at least one row and one column");
    if (grid_.size() != static_cast<std::size_t>(values_.cols()))
        throw DimensionError("grid length " + std::to_string(grid_.size()) +
                             " does not match " + std::to_string(values_.cols()) + " columns");
    if (!values_.allFinite()) throw InputError("sample panel contains missing or non-finite values");
    for (std::size_t t = 0; t < grid_.size(); ++t) {
        if (!std::isfinite(grid_[t])) throw InputError("grid contains a non-finite time stamp");
        if (t > 0 && !(grid_[t] > grid_[t - 1])) throw InputError("grid must be strictly increasing");
    }
}

SamplePanel SamplePanel::on_unit_grid(Matrix values) {
    auto grid = unit_grid(static_cast<std::size_t>(values.cols()));
    return SamplePanel(std::move(values), std::move(grid));
}

SamplePanel SamplePanel::select_rows(std::span<const std::size_t> rows) const {
    Matrix out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= realisations()) throw InputError("row index out of range");
        out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
    }
    return SamplePanel(std::move(out), grid_);
}

SamplePanel SamplePanel::column(std::size_t t) const {
    if (t >= time_points()) throw InputError("column index out of range");
    Matrix out = values_.col(static_cast<Eigen::Index>(t));
    return SamplePanel(std::move(out), {grid_[t]});
}

bool operator==(const SamplePanel& a, const SamplePanel& b) {
    if (a.values_.rows() != b.values_.rows() || a.values_.cols() != b.values_.cols()) return false;
    return a.grid_ == b.grid_ && a.values_ == b.values_;
}

std::vector<double> unit_grid(std::size_t T) {
    std::vector<double> grid(T, 0.0);
    if (T > 1)
        for (std::size_t j = 0; j < T; ++j) grid[j] = static_cast<double>(j) / static_cast<double>(T - 1);
    return grid;
}

Matrix stack_rows(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("cannot stack panels with different numbers of time points");
    Matrix out(a.rows() + b.rows(), a.cols());
    out.topRows(a.rows()) = a;
    out.bottomRows(b.rows()) = b;
    return out;
}

}  // namespace panelkt
