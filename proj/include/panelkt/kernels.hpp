#pragma once

#include "panelkt/panel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>

namespace panelkt {

enum class KernelFamily { Gaussian };

enum class BandwidthRule {
    Fixed,
    MedianAggregated,  ///< median distance over the pooled rows of both panels
    MedianPerSample,   ///< median distance within the panel the kernel acts on
};

enum class MedianMode { Aggregated, PerSample };

/// Gaussian kernel k(x, y) = exp(-|x - y|^2 / sigma^2), with sigma either
/// given or resolved from the data by a median rule.
struct KernelConfig {
    KernelFamily family = KernelFamily::Gaussian;
    BandwidthRule rule = BandwidthRule::MedianAggregated;
    double sigma = 0.0;  ///< used when rule == Fixed

    static KernelConfig fixed(double sigma);
    static KernelConfig median(MedianMode mode);

    /// Bandwidth for a kernel applied to `own` (and, for the aggregated rule,
    /// pooled with `other`). Throws ParameterError for a non-positive fixed
    /// sigma and DegenerateError when the median distance is zero.
    double resolve(const Matrix& own, const Matrix* other = nullptr) const;
};

/// Symmetric kernel matrix (within-sample) or rectangular cross matrix.
struct GramMatrix {
    Matrix entries;
    double sigma = 0.0;

    Eigen::Index rows() const noexcept { return entries.rows(); }
    Eigen::Index cols() const noexcept { return entries.cols(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries(i, j); }
};

[[nodiscard]] double gaussian_kernel(std::span<const double> x, std::span<const double> y, double sigma);

/// Pairwise squared Euclidean distances between rows of a and rows of b,
/// via |x|^2 + |y|^2 - 2<x,y> with tiny negatives clamped to zero.
[[nodiscard]] Matrix squared_distances(const Matrix& a, const Matrix& b);
[[nodiscard]] Matrix squared_distances(const Matrix& a);

/// exp(-D / sigma^2) elementwise; diagonal of a within-sample matrix is 1.
[[nodiscard]] Matrix gaussian_from_squared(const Matrix& sq_dist, double sigma);

[[nodiscard]] GramMatrix gram(const SamplePanel& panel, const KernelConfig& kernel);
[[nodiscard]] GramMatrix gram(const SamplePanel& panel, double sigma);

[[nodiscard]] GramMatrix cross_gram(const SamplePanel& x, const SamplePanel& y, const KernelConfig& kernel);
[[nodiscard]] GramMatrix cross_gram(const SamplePanel& x, const SamplePanel& y, double sigma);

/// Median of all pairwise Euclidean row distances (zero distances included;
/// midpoint of the two central values for an even count).
[[nodiscard]] double median_distance(const Matrix& rows);

[[nodiscard]] double median_heuristic(const SamplePanel& x, MedianMode mode);
[[nodiscard]] double median_heuristic(const SamplePanel& x, const SamplePanel& y, MedianMode mode);

}  // namespace panelkt
