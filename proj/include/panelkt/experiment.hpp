#pragma once

#include "panelkt/hypothesis_tests.hpp"
#include "panelkt/power_search.hpp"
#include "panelkt/synthgen.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace panelkt {

enum class TestVariant { MMDBaseline, MMDOptimised, HSICBaseline, HSICOptimised, SubCorr, SubHSIC };

TestVariant parse_test_variant(const std::string& name);
std::string to_string(TestVariant variant);

/// Version tag of the experiment spec file dialect (INI, see README).
inline constexpr const char* kSpecFormat = "panelkt-experiment/1";

struct ExperimentSpec {
    std::string name = "experiment";
    GeneratorSpec generator;
    std::string sweep_parameter = "delta_mu";  ///< delta_mu | delta_sigma | theta | m | T
    std::vector<double> sweep{0.0};
    double sweep_unit = 1.0;  ///< sweep values are multiplied by this (e.g. pi/4 for theta)
    std::vector<TestVariant> tests{TestVariant::MMDBaseline};
    std::size_t trials = 200;
    double alpha = 0.05;
    std::size_t permutations = 500;
    std::string grid = "paper";  ///< paper | median | comma-separated bandwidths
    double split = 0.5;
    std::uint64_t seed = 0;
    std::size_t threads = 0;        ///< 0 = hardware concurrency
    bool parallel_points = false;   ///< also spread sweep points over the workers
    bool keep_decisions = false;
    std::string output_dir = ".";   ///< as written; relative paths resolve against base_dir
    std::filesystem::path base_dir; ///< directory of the spec file; not serialised
    std::vector<std::string> formats{"csv", "json", "svg"};

    void validate() const;
    std::filesystem::path resolved_output_dir() const;

    friend bool operator==(const ExperimentSpec& a, const ExperimentSpec& b);
};

/// Reads a spec file (INI dialect, sections generator/sweep/test/run/output).
/// `paper_scale = true` under [run] forces P = 5000.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
ExperimentSpec parse_experiment_spec(std::istream& in, const std::filesystem::path& base_dir = {});

struct RateInterval {
    double mu_hat = 0.0;
    double low = 0.0;
    double high = 0.0;
};

/// mu_hat +- 1.96 sqrt(mu_hat (1 - mu_hat) / trials), clipped to [0, 1].
[[nodiscard]] RateInterval rejection_interval(std::size_t rejections, std::size_t trials);

struct SweepPointResult {
    std::string test;
    double parameter = 0.0;  ///< sweep value as written in the spec (before sweep_unit)
    std::size_t trials = 0;
    std::size_t rejections = 0;
    double mu_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    std::vector<bool> decisions;  ///< filled when spec.keep_decisions
    double wall_seconds = 0.0;    ///< run-dependent; not serialised, ignored by ==

    friend bool operator==(const SweepPointResult& a, const SweepPointResult& b);
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<SweepPointResult> points;

    friend bool operator==(const ExperimentResult&, const ExperimentResult&) = default;
};

/// Decision of a single trial of `variant` on the generated pair.
[[nodiscard]] bool run_trial(const ExperimentSpec& spec, TestVariant variant, const GeneratorSpec& gen,
                             std::uint64_t test_seed);

/// Generator spec for a sweep point (sweep value applied to the base spec).
[[nodiscard]] GeneratorSpec sweep_generator(const ExperimentSpec& spec, double value);

/// For every (test variant, sweep value) runs `trials` independent trials and
/// aggregates rejection rates. Trials run on spec.threads workers; every trial
/// draws from its own substream, so results do not depend on scheduling.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentSpec& spec);

inline constexpr const char* kResultFormat = "panelkt-results/1";

nlohmann::json to_json(const ExperimentSpec& spec);
nlohmann::json to_json(const ExperimentResult& result);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
ExperimentResult experiment_result_from_json(const nlohmann::json& j);

void write_results_csv(std::ostream& out, const ExperimentResult& result);
std::string results_svg(const ExperimentResult& result);

/// Writes <output_dir>/<name>.{csv,json,svg} for the requested formats and
/// returns the paths written.
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result);

}  // namespace panelkt
