#include "panelkt/estimators.hpp"

#include "panelkt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace panelkt {

namespace {

Matrix zero_diagonal(const Matrix& k) {
    Matrix out = k;
    out.diagonal().setZero();
    return out;
}

void require_square(const Matrix& k, const char* name) {
    if (k.rows() != k.cols()) throw DimensionError(std::string(name) + " must be square");
}

double hsic_from_terms(double m, double trace_kl, double k_total, double l_total, double cross) {
    return (trace_kl + k_total * l_total / ((m - 1.0) * (m - 2.0)) - 2.0 / (m - 2.0) * cross) /
           (m * (m - 3.0));
}

double jackknife(const std::vector<double>& replicates) {
    const double n = static_cast<double>(replicates.size());
    double mean = 0.0;
    for (double r : replicates) mean += r;
    mean /= n;
    double ss = 0.0;
    for (double r : replicates) ss += (r - mean) * (r - mean);
    return std::max(0.0, (n - 1.0) / n * ss);
}

}  // namespace

double mmd2_u(const Matrix& kxx, const Matrix& kyy, const Matrix& kxy) {
    require_square(kxx, "K_xx");
    require_square(kyy, "K_yy");
    const double m = static_cast<double>(kxx.rows());
    const double n = static_cast<double>(kyy.rows());
    if (kxx.rows() < 2 || kyy.rows() < 2) throw SampleSizeError("MMD needs at least two realisations per panel");
    if (kxy.rows() != kxx.rows() || kxy.cols() != kyy.rows()) throw DimensionError("K_xy shape mismatch");
    const double sxx = kxx.sum() - kxx.trace();
    const double syy = kyy.sum() - kyy.trace();
    const double sxy = kxy.sum();
    return sxx / (m * (m - 1.0)) + syy / (n * (n - 1.0)) - 2.0 * sxy / (m * n);
}

double hsic_u(const Matrix& k, const Matrix& l) {
    require_square(k, "K");
    require_square(l, "L");
    if (k.rows() != l.rows()) throw SampleSizeError("HSIC needs equal numbers of realisations");
    if (k.rows() < 4) throw SampleSizeError("HSIC needs at least four realisations");
    const Matrix kt = zero_diagonal(k);
    const Matrix lt = zero_diagonal(l);
    const Vector kr = kt.rowwise().sum();
    const Vector lr = lt.colwise().sum().transpose();
    const double trace_kl = kt.cwiseProduct(lt.transpose()).sum();
    return hsic_from_terms(static_cast<double>(k.rows()), trace_kl, kr.sum(), lr.sum(), kr.dot(lr));
}

double mmd_jackknife_variance(const Matrix& kxx, const Matrix& kyy, const Matrix& kxy) {
    require_square(kxx, "K_xx");
    require_square(kyy, "K_yy");
    if (kxx.rows() != kyy.rows()) throw SampleSizeError("MMD variance needs m = n");
    if (kxx.rows() < 4) throw SampleSizeError("MMD variance needs m >= 4");
    const Eigen::Index m = kxx.rows();
    const Matrix a = zero_diagonal(kxx);
    const Matrix b = zero_diagonal(kyy);
    const Vector ra = a.rowwise().sum();
    const Vector rb = b.rowwise().sum();
    const Vector rc = kxy.rowwise().sum();
    const Vector cc = kxy.colwise().sum().transpose();
    const double sxx = ra.sum();
    const double syy = rb.sum();
    const double sxy = rc.sum();
    const double mm = static_cast<double>(m - 1);

    std::vector<double> reps(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sxx_i = sxx - 2.0 * ra(i);
        const double syy_i = syy - 2.0 * rb(i);
        const double sxy_i = sxy - rc(i) - cc(i) + kxy(i, i);
        reps[static_cast<std::size_t>(i)] =
            (sxx_i + syy_i) / (mm * (mm - 1.0)) - 2.0 * sxy_i / (mm * mm);
    }
    return jackknife(reps);
}

double hsic_jackknife_variance(const Matrix& k, const Matrix& l) {
    require_square(k, "K");
    require_square(l, "L");
    if (k.rows() != l.rows()) throw SampleSizeError("HSIC variance needs equal numbers of realisations");
    if (k.rows() < 5) throw SampleSizeError("HSIC variance needs at least five realisations");
    const Eigen::Index m = k.rows();
    const Matrix kt = zero_diagonal(k);
    const Matrix lt = zero_diagonal(l);
    const Vector kr = kt.rowwise().sum();
    const Vector lr = lt.rowwise().sum();
    const Vector l_kr = lt * kr;  // (L~ rK)_i = sum_j L~_ij rK_j
    const Vector k_lr = kt * lr;
    const Vector kl_row = kt.cwiseProduct(lt).rowwise().sum();
    const double trace_kl = kl_row.sum();
    const double k_total = kr.sum();
    const double l_total = lr.sum();
    const double cross = kr.dot(lr);
    const double mm = static_cast<double>(m - 1);

    std::vector<double> reps(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double tr_i = trace_kl - 2.0 * kl_row(i);
        const double k_i = k_total - 2.0 * kr(i);
        const double l_i = l_total - 2.0 * lr(i);
        const double cross_i = cross - kr(i) * lr(i) - l_kr(i) - k_lr(i) + kl_row(i);
        reps[static_cast<std::size_t>(i)] = hsic_from_terms(mm, tr_i, k_i, l_i, cross_i);
    }
    return jackknife(reps);
}

namespace {

struct MmdBlocks {
    Matrix kxx, kyy, kxy;
};

// Lexicographic order on (rows, values); used to evaluate a panel pair in a
// canonical order so that swapping X and Y reproduces the result bit for bit.
bool precedes(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) return a.rows() < b.rows();
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

MmdBlocks mmd_blocks(const SamplePanel& x_in, const SamplePanel& y_in, const KernelConfig& kernel) {
    if (x_in.time_points() != y_in.time_points()) throw DimensionError("MMD needs T_X = T_Y");
    if (x_in.realisations() < 2 || y_in.realisations() < 2)
        throw SampleSizeError("MMD needs at least two realisations per panel");
    const bool swap = precedes(y_in.values(), x_in.values());
    const SamplePanel& x = swap ? y_in : x_in;
    const SamplePanel& y = swap ? x_in : y_in;
    double sigma = 0.0;
    if (kernel.rule == BandwidthRule::MedianPerSample)
        sigma = kernel.resolve(x_in.values());  // the per-sample rule reads the first panel
    else
        sigma = kernel.resolve(x.values(), &y.values());
    return {gram(x, sigma).entries, gram(y, sigma).entries, cross_gram(x, y, sigma).entries};
}

}  // namespace

StatisticValue mmd2_u(const SamplePanel& x, const SamplePanel& y, const KernelConfig& kernel) {
    const auto b = mmd_blocks(x, y, kernel);
    return {mmd2_u(b.kxx, b.kyy, b.kxy), StatisticKind::MMD2U};
}

StatisticValue hsic_u(const SamplePanel& x, const SamplePanel& y,
                      const KernelConfig& kernel_x, const KernelConfig& kernel_y) {
    if (x.realisations() != y.realisations()) throw SampleSizeError("HSIC needs m = n");
    if (x.realisations() < 4) throw SampleSizeError("HSIC needs at least four realisations");
    return {hsic_u(gram(x, kernel_x.resolve(x.values())).entries, gram(y, kernel_y.resolve(y.values())).entries),
            StatisticKind::HSICU};
}

double mmd_variance(const SamplePanel& x, const SamplePanel& y, const KernelConfig& kernel) {
    if (x.realisations() != y.realisations()) throw SampleSizeError("MMD variance needs m = n");
    const auto b = mmd_blocks(x, y, kernel);
    return mmd_jackknife_variance(b.kxx, b.kyy, b.kxy);
}

double hsic_variance(const SamplePanel& x, const SamplePanel& y,
                     const KernelConfig& kernel_x, const KernelConfig& kernel_y) {
    if (x.realisations() != y.realisations()) throw SampleSizeError("HSIC variance needs m = n");
    return hsic_jackknife_variance(gram(x, kernel_x.resolve(x.values())).entries,
                                   gram(y, kernel_y.resolve(y.values())).entries);
}

HsicPermutationKernel::HsicPermutationKernel(const Matrix& k, const Matrix& l)
    : k_(zero_diagonal(k)), l_(zero_diagonal(l)) {
    require_square(k, "K");
    require_square(l, "L");
    if (k.rows() != l.rows()) throw SampleSizeError("HSIC needs equal numbers of realisations");
    if (k.rows() < 4) throw SampleSizeError("HSIC needs at least four realisations");
    k_rows_ = k_.rowwise().sum();
    l_rows_ = l_.rowwise().sum();
    k_total_ = k_rows_.sum();
    l_total_ = l_rows_.sum();
}

double HsicPermutationKernel::evaluate(std::span<const std::size_t> perm) const {
    const Eigen::Index m = k_.rows();
    if (perm.size() != static_cast<std::size_t>(m)) throw DimensionError("permutation length mismatch");
    double trace_kl = 0.0;
    double cross = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double* kcol = k_.col(i).data();
        const double* lcol = l_.col(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])).data();
        double acc = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) acc += kcol[j] * lcol[perm[static_cast<std::size_t>(j)]];
        trace_kl += acc;
        cross += k_rows_(i) * l_rows_(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
    }
    return hsic_from_terms(static_cast<double>(m), trace_kl, k_total_, l_total_, cross);
}

MmdPermutationKernel::MmdPermutationKernel(Matrix pooled, std::size_t m) : pooled_(std::move(pooled)), m_(m) {
    require_square(pooled_, "pooled Gram matrix");
    const auto N = static_cast<std::size_t>(pooled_.rows());
    if (m < 2 || N < m + 2) throw SampleSizeError("MMD needs at least two realisations per panel");
    row_sums_ = pooled_.rowwise().sum();
    diag_ = pooled_.diagonal();
    total_ = row_sums_.sum();
}

double MmdPermutationKernel::evaluate(const Vector& in_x) const {
    const double m = static_cast<double>(m_);
    const double n = static_cast<double>(pooled_.rows()) - m;
    const Vector kx = pooled_ * in_x;
    const double xkx = in_x.dot(kx);
    const double x_rows = in_x.dot(row_sums_);
    const double x_diag = in_x.dot(diag_);
    const double sxx = xkx - x_diag;
    const double syy = total_ - 2.0 * x_rows + xkx - (diag_.sum() - x_diag);
    const double sxy = x_rows - xkx;
    return sxx / (m * (m - 1.0)) + syy / (n * (n - 1.0)) - 2.0 * sxy / (m * n);
}

}  // namespace panelkt
