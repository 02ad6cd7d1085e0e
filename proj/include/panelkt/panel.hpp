#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace panelkt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// m independent realisations of a process observed on a shared grid of T
/// time stamps. Row i is realisation i; column t is the measurement at grid[t].
class SamplePanel {
public:
    SamplePanel() = default;

    /// Validates shape, finiteness and strict monotonicity of the grid.
    SamplePanel(Matrix values, std::vector<double> grid);

    /// Panel on the unit-interval grid t_j = j/(T-1) (t = 0 when T = 1).
    static SamplePanel on_unit_grid(Matrix values);

    std::size_t realisations() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t time_points() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    const Matrix& values() const noexcept { return values_; }
    const std::vector<double>& grid() const noexcept { return grid_; }

    /// New panel holding the given rows, in the given order.
    SamplePanel select_rows(std::span<const std::size_t> rows) const;

    /// New panel holding a single column (grid reduced accordingly).
    SamplePanel column(std::size_t t) const;

    /// Bitwise equality of values and grid (shape mismatch compares unequal).
    friend bool operator==(const SamplePanel& a, const SamplePanel& b);

private:
    Matrix values_;
    std::vector<double> grid_;
};

/// Equally spaced grid on [0, 1] with inclusive endpoints.
std::vector<double> unit_grid(std::size_t T);

/// Rows of `a` followed by rows of `b`; both must share T.
Matrix stack_rows(const Matrix& a, const Matrix& b);

}  // namespace panelkt
