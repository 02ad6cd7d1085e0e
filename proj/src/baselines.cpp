#include "panelkt/baselines.hpp"

#include "panelkt/errors.hpp"

#include <cmath>
#include <numeric>

namespace panelkt {

namespace {

void require_single_column_pair(const SamplePanel& x, const SamplePanel& y) {
    if (x.realisations() != y.realisations()) throw SampleSizeError("baseline statistics need m = n");
    if (y.time_points() != 1) throw DimensionError("baseline statistics need a single-column Y");
}

// Columns centred and scaled to unit norm, so dot products are correlations.
Matrix unit_columns(const Matrix& a) {
    Matrix z = a.rowwise() - a.colwise().mean();
    for (Eigen::Index t = 0; t < z.cols(); ++t) {
        const double norm = z.col(t).norm();
        if (!(norm > 0.0)) throw DegenerateError("column " + std::to_string(t) + " has zero sample variance");
        z.col(t) /= norm;
    }
    return z;
}

// Sum over columns of the per-column kernel matrices; hsic_u is linear in K
// for fixed L, so hsic_u(mean_t K_t, L) is the mean of the per-column values.
Matrix mean_column_kernel(const SamplePanel& x, const KernelConfig& kernel_x) {
    const auto m = static_cast<Eigen::Index>(x.realisations());
    Matrix acc = Matrix::Zero(m, m);
    for (std::size_t t = 0; t < x.time_points(); ++t) {
        const SamplePanel col = x.column(t);
        acc += gram(col, kernel_x.resolve(col.values())).entries;
    }
    return acc / static_cast<double>(x.time_points());
}

}  // namespace

StatisticValue sub_corr(const SamplePanel& x, const SamplePanel& y) {
    require_single_column_pair(x, y);
    if (x.realisations() < 2) throw SampleSizeError("correlation needs at least two realisations");
    const Matrix zx = unit_columns(x.values());
    const Matrix zy = unit_columns(y.values());
    const Vector corr = zx.transpose() * zy.col(0);
    return {corr.mean(), StatisticKind::SubCorr};
}

StatisticValue sub_hsic(const SamplePanel& x, const SamplePanel& y, const KernelConfig& kernel_x,
                        const KernelConfig& kernel_y) {
    require_single_column_pair(x, y);
    if (x.realisations() < 4) throw SampleSizeError("HSIC needs at least four realisations");
    const Matrix l = gram(y, kernel_y.resolve(y.values())).entries;
    return {hsic_u(mean_column_kernel(x, kernel_x), l), StatisticKind::SubHSIC};
}

TestResult baseline_test(BaselineKind kind, const SamplePanel& x, const SamplePanel& y, const TestConfig& config,
                         const KernelConfig& kernel_x, const KernelConfig& kernel_y) {
    config.validate();
    require_single_column_pair(x, y);
    if (kind == BaselineKind::SubHSIC) {
        if (x.realisations() < 4) throw SampleSizeError("HSIC needs at least four realisations");
        const Matrix k = mean_column_kernel(x, kernel_x);
        const Matrix l = gram(y, kernel_y.resolve(y.values())).entries;
        return hsic_independence_test(k, l, config);
    }

    if (x.realisations() < 2) throw SampleSizeError("correlation needs at least two realisations");
    // SubCorr under a permutation of Y is sum_i w_i zy_perm(i) with w the
    // row means of the unit-norm X columns.
    const Vector w = unit_columns(x.values()).rowwise().mean();
    const Vector zy = unit_columns(y.values()).col(0);
    const std::size_t m = x.realisations();
    const double observed = std::abs(w.dot(zy));
    auto sampler = [&](std::size_t count, std::uint64_t seed) {
        return permutation_null(m, count, seed, [&](const std::vector<std::size_t>& perm) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                acc += w(static_cast<Eigen::Index>(i)) * zy(static_cast<Eigen::Index>(perm[i]));
            return std::abs(acc);
        });
    };
    return calibrate(observed, config, sampler);
}

}  // namespace panelkt
