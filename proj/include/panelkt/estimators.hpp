#pragma once

#include "panelkt/kernels.hpp"
#include "panelkt/panel.hpp"

namespace panelkt {

enum class StatisticKind { MMD2U, HSICU, SubCorr, SubHSIC };

struct StatisticValue {
    double value = 0.0;
    StatisticKind kind = StatisticKind::MMD2U;
};

/// Unbiased MMD^2 from the three Gram blocks K_xx (m x m), K_yy (n x n) and
/// K_xy (m x n). Diagonals of the within-sample blocks are excluded.
[[nodiscard]] double mmd2_u(const Matrix& kxx, const Matrix& kyy, const Matrix& kxy);

/// Unbiased HSIC from the two m x m kernel matrices.
///
///   1/(m(m-3)) [ tr(K~L~) + 1'K~1 1'L~1 / ((m-1)(m-2)) - 2/(m-2) 1'K~L~1 ]
///
/// with K~, L~ the kernel matrices with zeroed diagonals. Requires m >= 4.
[[nodiscard]] double hsic_u(const Matrix& k, const Matrix& l);

/// Delete-one jackknife variance of mmd2_u for m = n, dropping the pair
/// (x_i, y_i) per replicate. Computed in O(m^2) from row and column sums.
[[nodiscard]] double mmd_jackknife_variance(const Matrix& kxx, const Matrix& kyy, const Matrix& kxy);

/// Delete-one jackknife variance of hsic_u, dropping the pair (x_i, y_i).
/// Needs m >= 5 so that every replicate keeps the m >= 4 precondition.
[[nodiscard]] double hsic_jackknife_variance(const Matrix& k, const Matrix& l);

[[nodiscard]] StatisticValue mmd2_u(const SamplePanel& x, const SamplePanel& y, const KernelConfig& kernel);
[[nodiscard]] StatisticValue hsic_u(const SamplePanel& x, const SamplePanel& y,
                                    const KernelConfig& kernel_x, const KernelConfig& kernel_y);

/// Variance estimate of mmd2_u on equal-sized panels (jackknife, floored at 0).
[[nodiscard]] double mmd_variance(const SamplePanel& x, const SamplePanel& y, const KernelConfig& kernel);

/// Variance estimate of hsic_u (jackknife, floored at 0).
[[nodiscard]] double hsic_variance(const SamplePanel& x, const SamplePanel& y,
                                   const KernelConfig& kernel_x, const KernelConfig& kernel_y);

/// Precomputed pieces of hsic_u for a fixed X kernel and a Y kernel whose rows
/// and columns get permuted. Evaluating a permutation costs O(m^2) and never
/// touches the kernels again.
class HsicPermutationKernel {
public:
    HsicPermutationKernel(const Matrix& k, const Matrix& l);

    /// hsic_u(K, P L P') where (P L P')_{ij} = L_{perm[i], perm[j]}.
    [[nodiscard]] double evaluate(std::span<const std::size_t> perm) const;

    std::size_t size() const noexcept { return static_cast<std::size_t>(k_.rows()); }

private:
    Matrix k_;  // zero diagonal
    Matrix l_;  // zero diagonal
    Vector k_rows_;
    Vector l_rows_;
    double k_total_ = 0.0;
    double l_total_ = 0.0;
};

/// Precomputed pooled Gram matrix for relabelling X u Y into two groups of
/// sizes (m, n) without re-evaluating the kernel.
class MmdPermutationKernel {
public:
    MmdPermutationKernel(Matrix pooled, std::size_t m);

    /// mmd2_u where rows with in_x[i] == 1 form the X group (exactly m of them).
    [[nodiscard]] double evaluate(const Vector& in_x) const;

    std::size_t pooled_size() const noexcept { return static_cast<std::size_t>(pooled_.rows()); }
    std::size_t m() const noexcept { return m_; }

private:
    Matrix pooled_;
    Vector row_sums_;
    Vector diag_;
    double total_ = 0.0;
    std::size_t m_ = 0;
};

}  // namespace panelkt
