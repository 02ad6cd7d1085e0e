#include "panelkt/kernels.hpp"

#include "panelkt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace panelkt {

KernelConfig KernelConfig::fixed(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("kernel bandwidth must be positive and finite");
    return KernelConfig{KernelFamily::Gaussian, BandwidthRule::Fixed, sigma};
}

KernelConfig KernelConfig::median(MedianMode mode) {
    return KernelConfig{KernelFamily::Gaussian,
                        mode == MedianMode::Aggregated ? BandwidthRule::MedianAggregated
                                                       : BandwidthRule::MedianPerSample,
                        0.0};
}

double KernelConfig::resolve(const Matrix& own, const Matrix* other) const {
    switch (rule) {
        case BandwidthRule::Fixed:
            if (!(sigma > 0.0) || !std::isfinite(sigma))
                throw ParameterError("kernel bandwidth must be positive and finite");
            return sigma;
        case BandwidthRule::MedianPerSample:
            return median_distance(own);
        case BandwidthRule::MedianAggregated:
            return other ? median_distance(stack_rows(own, *other)) : median_distance(own);
    }
    throw ParameterError("unknown bandwidth rule");
}

double gaussian_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
    if (x.size() != y.size()) throw DimensionError("kernel arguments differ in length");
    if (!(sigma > 0.0)) throw ParameterError("kernel bandwidth must be positive");
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sq += d * d;
    }
    return std::exp(-sq / (sigma * sigma));
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("panels differ in number of time points");
    const Vector na = a.rowwise().squaredNorm();
    const Vector nb = b.rowwise().squaredNorm();
    Matrix d = -2.0 * (a * b.transpose());
    d.colwise() += na;
    d.rowwise() += nb.transpose();
    return d.cwiseMax(0.0);
}

Matrix squared_distances(const Matrix& a) {
    Matrix d = squared_distances(a, a);
    // Exact symmetry and a zero diagonal regardless of rounding in the expansion.
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) d(j, i) = d(i, j);
    }
    return d;
}

Matrix gaussian_from_squared(const Matrix& sq_dist, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("kernel bandwidth must be positive and finite");
    const double scale = -1.0 / (sigma * sigma);
    return (sq_dist * scale).array().exp().matrix();
}

GramMatrix gram(const SamplePanel& panel, double sigma) {
    if (panel.realisations() == 0) throw InputError("empty panel");
    return GramMatrix{gaussian_from_squared(squared_distances(panel.values()), sigma), sigma};
}

GramMatrix gram(const SamplePanel& panel, const KernelConfig& kernel) {
    if (panel.realisations() == 0) throw InputError("empty panel");
    const double sigma = panel.realisations() == 1 && kernel.rule != BandwidthRule::Fixed
                             ? 1.0  // any bandwidth gives [[1]]
                             : kernel.resolve(panel.values());
    return gram(panel, sigma);
}

GramMatrix cross_gram(const SamplePanel& x, const SamplePanel& y, double sigma) {
    if (x.time_points() != y.time_points()) throw DimensionError("panels differ in number of time points");
    return GramMatrix{gaussian_from_squared(squared_distances(x.values(), y.values()), sigma), sigma};
}

GramMatrix cross_gram(const SamplePanel& x, const SamplePanel& y, const KernelConfig& kernel) {
    if (x.time_points() != y.time_points()) throw DimensionError("panels differ in number of time points");
    return cross_gram(x, y, kernel.resolve(x.values(), &y.values()));
}

double median_distance(const Matrix& rows) {
    const Eigen::Index n = rows.rows();
    if (n < 2) throw DegenerateError("median heuristic needs at least two rows");
    const Matrix sq = squared_distances(rows);
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) dist.push_back(std::sqrt(sq(i, j)));

    const std::size_t half = dist.size() / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(half), dist.end());
    double med = dist[half];
    if (dist.size() % 2 == 0) {
        const double below = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(half));
        med = 0.5 * (below + med);
    }
    if (!(med > 0.0) || !std::isfinite(med))
        throw DegenerateError("median pairwise distance is zero; bandwidth is degenerate");
    return med;
}

double median_heuristic(const SamplePanel& x, MedianMode mode) {
    (void)mode;  // a single panel is the same pool under either rule
    return median_distance(x.values());
}

double median_heuristic(const SamplePanel& x, const SamplePanel& y, MedianMode mode) {
    if (mode == MedianMode::PerSample)
        throw ParameterError("per-sample median heuristic takes a single panel");
    return median_distance(stack_rows(x.values(), y.values()));
}

}  // namespace panelkt
