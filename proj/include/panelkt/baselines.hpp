#pragma once

#include "panelkt/estimators.hpp"
#include "panelkt/hypothesis_tests.hpp"
#include "panelkt/kernels.hpp"
#include "panelkt/panel.hpp"

namespace panelkt {

/// Mean over columns t of Pearson Corr({x_it}_i, Y) for a single-column Y.
[[nodiscard]] StatisticValue sub_corr(const SamplePanel& x, const SamplePanel& y);

/// Mean over columns t of hsic_u({x_it}_i, Y). Each column gets its own
/// bandwidth from kernel_x (per-column median by default).
[[nodiscard]] StatisticValue sub_hsic(const SamplePanel& x, const SamplePanel& y,
                                      const KernelConfig& kernel_x = KernelConfig::median(MedianMode::PerSample),
                                      const KernelConfig& kernel_y = KernelConfig::median(MedianMode::PerSample));

enum class BaselineKind { SubCorr, SubHSIC };

/// Permutation test on a baseline statistic, permuting the rows of Y only.
/// SubCorr is tested two-sided through |SubCorr|.
[[nodiscard]] TestResult baseline_test(BaselineKind kind, const SamplePanel& x, const SamplePanel& y,
                                       const TestConfig& config,
                                       const KernelConfig& kernel_x = KernelConfig::median(MedianMode::PerSample),
                                       const KernelConfig& kernel_y = KernelConfig::median(MedianMode::PerSample));

}  // namespace panelkt
