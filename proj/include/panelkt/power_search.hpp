#pragma once

#include "panelkt/hypothesis_tests.hpp"
#include "panelkt/panel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace panelkt {

enum class GridProvenance {
    PaperMeanShift,
    PaperVarShift,
    PaperRotationStudentExp,
    PaperRotationUniform,
    MedianScaled,
    Custom
};

enum class GridExperiment { MeanShift, VarShift, RotationStudentT, RotationUniform, RotationExponential };

/// Candidate bandwidths, strictly increasing and positive.
struct SearchGrid {
    std::vector<double> values;
    GridProvenance provenance = GridProvenance::Custom;

    static SearchGrid custom(std::vector<double> values);
    static SearchGrid linspace(double lo, double hi, std::size_t count, GridProvenance provenance);
};

/// Tabulated bandwidth grids for the synthetic experiments, bucketed by the
/// shift size. Returns nullopt when delta lies outside every bucket; callers
/// then fall back to median_scaled_grid. Rotation grids ignore delta.
[[nodiscard]] std::optional<SearchGrid> paper_grid(GridExperiment experiment, double delta);

/// median * 2^k for 11 log-spaced k in [-2, 2].
[[nodiscard]] SearchGrid median_scaled_grid(double median);

enum class SearchKind { MMD, HSIC };

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct PowerSearchResult {
    SearchKind kind = SearchKind::MMD;
    SearchGrid grid_x;
    SearchGrid grid_y;              ///< HSIC only; MMD leaves it empty
    std::vector<double> criterion;  ///< row-major over (grid_x, grid_y) for HSIC
    double selected_x = 0.0;
    double selected_y = 0.0;
    SplitIndices split_x;
    SplitIndices split_y;  ///< identical to split_x for HSIC
    std::uint64_t seed = 0;
};

/// Uniformly random disjoint partition of 0..m-1 with round(ratio * m)
/// training indices (both sides sorted). Throws SampleSizeError when either
/// side would have fewer than 4 rows.
[[nodiscard]] SplitIndices split_train_test(std::size_t m, double ratio, std::uint64_t seed);

inline constexpr double kCriterionRegulariser = 1e-8;

/// mmd2_u / sqrt(V + 1e-8) at bandwidth sigma; panels must have m = n.
[[nodiscard]] double mmd_power_criterion(const SamplePanel& train_x, const SamplePanel& train_y, double sigma);

/// hsic_u / sqrt(V + 1e-8) at bandwidths (sigma_x, sigma_y).
[[nodiscard]] double hsic_power_criterion(const SamplePanel& train_x, const SamplePanel& train_y,
                                          double sigma_x, double sigma_y);

struct SearchOptions {
    /// Subtract a pilot permutation threshold from the statistic before
    /// studentising, instead of maximising the studentised statistic alone.
    bool with_threshold = false;
    std::size_t pilot_permutations = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
};

/// Evaluates the criterion over the grid (Cartesian product for HSIC) and
/// returns the argmax; ties go to the smallest sigma_x, then smallest sigma_y.
/// For MMD with m != n the larger panel is truncated at random first.
[[nodiscard]] PowerSearchResult select_bandwidth(const SamplePanel& train_x, const SamplePanel& train_y,
                                                 SearchKind kind, const SearchGrid& grid_x,
                                                 const SearchGrid& grid_y, const SearchOptions& options = {});

struct OptimisedTestResult {
    PowerSearchResult search;
    TestResult test;
};

/// Split -> select on the training rows -> test on the held-out rows only.
/// MMD splits X and Y with independent draws; HSIC splits the pairs jointly.
[[nodiscard]] OptimisedTestResult optimised_test(const SamplePanel& x, const SamplePanel& y, SearchKind kind,
                                                 const SearchGrid& grid_x, const SearchGrid& grid_y,
                                                 double split_ratio, const TestConfig& config,
                                                 const SearchOptions& options = {});

std::string to_string(GridProvenance provenance);

}  // namespace panelkt
