#include "panelkt/power_search.hpp"

#include "panelkt/errors.hpp"
#include "panelkt/estimators.hpp"
#include "panelkt/kernels.hpp"
#include "panelkt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace panelkt {

SearchGrid SearchGrid::custom(std::vector<double> values) {
    if (values.empty()) throw ParameterError("search grid is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw ParameterError("search grid values must be positive and finite");
        if (i > 0 && !(values[i] > values[i - 1])) throw ParameterError("search grid must be strictly increasing");
    }
    return SearchGrid{std::move(values), GridProvenance::Custom};
}

SearchGrid SearchGrid::linspace(double lo, double hi, std::size_t count, GridProvenance provenance) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    auto grid = custom(std::move(v));
    grid.provenance = provenance;
    return grid;
}

std::optional<SearchGrid> paper_grid(GridExperiment experiment, double delta) {
    auto eleven_odd = [](double first, GridProvenance prov) {
        return SearchGrid::linspace(first, first + 20.0, 11, prov);
    };
    switch (experiment) {
        case GridExperiment::MeanShift: {
            const auto p = GridProvenance::PaperMeanShift;
            if (delta >= 0.0 && delta <= 2.0) return eleven_odd(1.0, p);
            if (delta > 2.0 && delta <= 3.0) return eleven_odd(6.0, p);
            if (delta > 3.0 && delta <= 5.0) return eleven_odd(11.0, p);
            if (delta > 5.0 && delta <= 8.0) return eleven_odd(16.0, p);
            return std::nullopt;
        }
        case GridExperiment::VarShift: {
            const auto p = GridProvenance::PaperVarShift;
            if (delta >= 0.0 && delta <= 4.0) return eleven_odd(10.0, p);
            if (delta > 4.0 && delta <= 14.0) return eleven_odd(20.0, p);
            if (delta > 14.0 && delta <= 32.0) return eleven_odd(30.0, p);
            return std::nullopt;
        }
        case GridExperiment::RotationStudentT:
        case GridExperiment::RotationExponential:
            return SearchGrid::linspace(1.0, 20.0, 20, GridProvenance::PaperRotationStudentExp);
        case GridExperiment::RotationUniform:
            return SearchGrid::linspace(1.0, 40.0, 40, GridProvenance::PaperRotationUniform);
    }
    return std::nullopt;
}

SearchGrid median_scaled_grid(double median) {
    if (!(median > 0.0) || !std::isfinite(median)) throw DegenerateError("median bandwidth must be positive");
    std::vector<double> v(11);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = median * std::exp2(-2.0 + 0.4 * static_cast<double>(i));
    return SearchGrid{std::move(v), GridProvenance::MedianScaled};
}

SplitIndices split_train_test(std::size_t m, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("split ratio must lie in (0, 1)");
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(m)));
    if (n_train < 4 || m - std::min(m, n_train) < 4 || n_train > m)
        throw SampleSizeError("train/test split leaves fewer than 4 rows on one side");
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto rng = make_engine(seed, {stream::split});
    std::shuffle(idx.begin(), idx.end(), rng);
    SplitIndices s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

namespace {

double studentise(double statistic, double variance) {
    return statistic / std::sqrt(std::max(0.0, variance) + kCriterionRegulariser);
}

struct MmdDistances {
    Matrix xx, yy, xy;
};

MmdDistances mmd_distances(const SamplePanel& x, const SamplePanel& y) {
    if (x.time_points() != y.time_points()) throw DimensionError("MMD needs T_X = T_Y");
    if (x.realisations() != y.realisations()) throw SampleSizeError("power criterion needs m = n");
    return {squared_distances(x.values()), squared_distances(y.values()),
            squared_distances(x.values(), y.values())};
}

double mmd_criterion(const MmdDistances& d, double sigma, const SearchOptions* opt) {
    const Matrix kxx = gaussian_from_squared(d.xx, sigma);
    const Matrix kyy = gaussian_from_squared(d.yy, sigma);
    const Matrix kxy = gaussian_from_squared(d.xy, sigma);
    double stat = mmd2_u(kxx, kyy, kxy);
    const double var = mmd_jackknife_variance(kxx, kyy, kxy);
    if (opt && opt->with_threshold) {
        const auto m = static_cast<Eigen::Index>(kxx.rows());
        Matrix pooled(2 * m, 2 * m);
        pooled << kxx, kxy, kxy.transpose(), kyy;
        TestConfig pilot{opt->alpha, opt->pilot_permutations, substream_key(opt->seed, {stream::pilot}),
                         NullMethod::Permutation};
        stat -= mmd_two_sample_test(pooled, static_cast<std::size_t>(m), pilot).threshold;
    }
    return studentise(stat, var);
}

double hsic_criterion(const Matrix& k, const Matrix& l, const SearchOptions* opt) {
    double stat = hsic_u(k, l);
    const double var = hsic_jackknife_variance(k, l);
    if (opt && opt->with_threshold) {
        TestConfig pilot{opt->alpha, opt->pilot_permutations, substream_key(opt->seed, {stream::pilot}),
                         NullMethod::Permutation};
        stat -= hsic_independence_test(k, l, pilot).threshold;
    }
    return studentise(stat, var);
}

SamplePanel truncate_to(const SamplePanel& p, std::size_t keep, std::uint64_t seed) {
    std::vector<std::size_t> idx(p.realisations());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto rng = make_engine(seed, {stream::truncate});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    return p.select_rows(idx);
}

}  // namespace

double mmd_power_criterion(const SamplePanel& train_x, const SamplePanel& train_y, double sigma) {
    return mmd_criterion(mmd_distances(train_x, train_y), sigma, nullptr);
}

double hsic_power_criterion(const SamplePanel& train_x, const SamplePanel& train_y, double sigma_x,
                            double sigma_y) {
    if (train_x.realisations() != train_y.realisations()) throw SampleSizeError("HSIC needs m = n");
    return hsic_criterion(gram(train_x, sigma_x).entries, gram(train_y, sigma_y).entries, nullptr);
}

PowerSearchResult select_bandwidth(const SamplePanel& train_x, const SamplePanel& train_y, SearchKind kind,
                                   const SearchGrid& grid_x, const SearchGrid& grid_y,
                                   const SearchOptions& options) {
    if (grid_x.values.empty()) throw ParameterError("search grid is empty");
    PowerSearchResult result;
    result.kind = kind;
    result.grid_x = grid_x;
    result.seed = options.seed;

    double best = -std::numeric_limits<double>::infinity();
    bool found = false;

    if (kind == SearchKind::MMD) {
        SamplePanel x = train_x;
        SamplePanel y = train_y;
        if (x.realisations() > y.realisations()) x = truncate_to(x, y.realisations(), options.seed);
        if (y.realisations() > x.realisations()) y = truncate_to(y, x.realisations(), options.seed);
        const auto dist = mmd_distances(x, y);
        result.criterion.reserve(grid_x.values.size());
        for (double sigma : grid_x.values) {
            const double c = mmd_criterion(dist, sigma, &options);
            result.criterion.push_back(c);
            // Strict '>' in ascending grid order keeps the smallest sigma on ties.
            if (std::isfinite(c) && (!found || c > best)) {
                best = c;
                result.selected_x = sigma;
                found = true;
            }
        }
    } else {
        if (grid_y.values.empty()) throw ParameterError("search grid for Y is empty");
        if (train_x.realisations() != train_y.realisations()) throw SampleSizeError("HSIC needs m = n");
        result.grid_y = grid_y;
        const Matrix dx = squared_distances(train_x.values());
        const Matrix dy = squared_distances(train_y.values());
        std::vector<Matrix> ls;
        ls.reserve(grid_y.values.size());
        for (double sy : grid_y.values) ls.push_back(gaussian_from_squared(dy, sy));
        result.criterion.reserve(grid_x.values.size() * grid_y.values.size());
        for (double sx : grid_x.values) {
            const Matrix k = gaussian_from_squared(dx, sx);
            for (std::size_t j = 0; j < ls.size(); ++j) {
                const double c = hsic_criterion(k, ls[j], &options);
                result.criterion.push_back(c);
                if (std::isfinite(c) && (!found || c > best)) {
                    best = c;
                    result.selected_x = sx;
                    result.selected_y = grid_y.values[j];
                    found = true;
                }
            }
        }
    }
    if (!found) throw SearchError("no grid point produced a finite power criterion");
    return result;
}

OptimisedTestResult optimised_test(const SamplePanel& x, const SamplePanel& y, SearchKind kind,
                                   const SearchGrid& grid_x, const SearchGrid& grid_y, double split_ratio,
                                   const TestConfig& config, const SearchOptions& options) {
    config.validate();
    const std::uint64_t split_seed = substream_key(config.seed, {stream::split});
    OptimisedTestResult out;
    SplitIndices sx;
    SplitIndices sy;
    if (kind == SearchKind::MMD) {
        sx = split_train_test(x.realisations(), split_ratio, substream_key(split_seed, {0}));
        sy = split_train_test(y.realisations(), split_ratio, substream_key(split_seed, {1}));
    } else {
        if (x.realisations() != y.realisations()) throw SampleSizeError("HSIC needs m = n");
        sx = split_train_test(x.realisations(), split_ratio, split_seed);
        sy = sx;
    }

    SearchOptions opts = options;
    opts.seed = substream_key(config.seed, {stream::truncate});
    opts.alpha = config.alpha;
    out.search = select_bandwidth(x.select_rows(sx.train), y.select_rows(sy.train), kind, grid_x, grid_y, opts);
    out.search.split_x = sx;
    out.search.split_y = sy;
    out.search.seed = config.seed;

    const SamplePanel test_x = x.select_rows(sx.test);
    const SamplePanel test_y = y.select_rows(sy.test);
    if (kind == SearchKind::MMD) {
        out.test = mmd_two_sample_test(test_x, test_y, KernelConfig::fixed(out.search.selected_x), config);
    } else {
        out.test = hsic_independence_test(test_x, test_y, KernelConfig::fixed(out.search.selected_x),
                                          KernelConfig::fixed(out.search.selected_y), config);
    }
    return out;
}

std::string to_string(GridProvenance provenance) {
    switch (provenance) {
        case GridProvenance::PaperMeanShift: return "paper-meanshift";
        case GridProvenance::PaperVarShift: return "paper-varshift";
        case GridProvenance::PaperRotationStudentExp: return "paper-rotation-student-exp";
        case GridProvenance::PaperRotationUniform: return "paper-rotation-uniform";
        case GridProvenance::MedianScaled: return "median-scaled";
        case GridProvenance::Custom: return "custom";
    }
    return "custom";
}

}  // namespace panelkt
