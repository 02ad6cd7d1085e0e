// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion ...]   (no arguments runs all of them)

#include "oracles.hpp"
#include "panelkt/estimators.hpp"
#include "panelkt/experiment.hpp"
#include "panelkt/kernels.hpp"
#include "panelkt/panel_ingest.hpp"
#include "panelkt/rng.hpp"
#include "panelkt/synthgen.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace panelkt;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SamplePanel panel_of(const oracle::Rows& rows) {
    Matrix v(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t t = 0; t < rows[i].size(); ++t)
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[i][t];
    return SamplePanel::on_unit_grid(v);
}

ExperimentSpec base_spec(Protocol protocol, std::size_t m, std::size_t T, std::uint64_t seed) {
    ExperimentSpec s;
    s.name = "acceptance";
    s.generator.protocol = protocol;
    s.generator.m = s.generator.n = m;
    s.generator.T = T;
    s.permutations = 500;
    s.alpha = 0.05;
    s.seed = seed;
    s.threads = 0;
    return s;
}

// Rejection rates indexed [variant][sweep point].
std::vector<std::vector<double>> rates(const ExperimentSpec& spec) {
    const auto result = run_experiment(spec);
    std::vector<std::vector<double>> out(spec.tests.size(), std::vector<double>(spec.sweep.size()));
    for (std::size_t v = 0; v < spec.tests.size(); ++v)
        for (std::size_t k = 0; k < spec.sweep.size(); ++k) out[v][k] = result.points[v * spec.sweep.size() + k].mu_hat;
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : "/") + fmt("%.3f", x);
    return s;
}

// Every later point is at least every earlier one minus 2 SDs of the difference.
bool non_decreasing_within_2sd(const std::vector<double>& p, std::size_t trials) {
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const double sd = std::hypot(oracle::binomial_sd(p[i], trials), oracle::binomial_sd(p[j], trials));
            if (p[j] < p[i] - 2.0 * sd) return false;
        }
    return true;
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(20240101);
    std::uniform_int_distribution<std::size_t> size(2, 12), hsic_size(4, 12), len(1, 5);
    std::uniform_real_distribution<double> bw(0.3, 4.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t T = len(rng);
        const auto x = oracle::random_rows(size(rng), T, rng);
        const auto y = oracle::random_rows(size(rng), T, rng, 0.5);
        const double sigma = bw(rng);
        const double lib = mmd2_u(panel_of(x), panel_of(y), KernelConfig::fixed(sigma)).value;
        worst = std::max(worst, std::abs(lib - oracle::mmd2_u(x, y, sigma)));

        const std::size_t m = hsic_size(rng);
        const auto a = oracle::random_rows(m, len(rng), rng);
        const auto b = oracle::random_rows(m, len(rng), rng);
        const double sa = bw(rng), sb = bw(rng);
        const double h = hsic_u(panel_of(a), panel_of(b), KernelConfig::fixed(sa), KernelConfig::fixed(sb)).value;
        const auto K = oracle::kernel_matrix(a, a, sa);
        const auto L = oracle::kernel_matrix(b, b, sb);
        worst = std::max({worst, std::abs(h - oracle::hsic_u_tuples(K, L)), std::abs(h - oracle::hsic_u_loops(K, L))});
    }
    return {worst <= 1e-10, fmt("max |lib - oracle| = %.2e over 100 MMD + 100 HSIC instances (tol 1e-10)", worst)};
}

Outcome hsic_constant_kernels() {
    const double h = hsic_u(Matrix::Ones(4, 4), Matrix::Ones(4, 4));
    return {std::abs(h) <= 1e-12, fmt("hsic_u(1, 1) at m = 4 is %.3e (tol 1e-12)", h)};
}

Outcome type_one_calibration() {
    auto s = base_spec(Protocol::MeanShift, 100, 100, 301);
    s.sweep = {0.0};
    s.trials = 200;
    const double r = rates(s)[0][0];
    return {r <= 0.08, fmt("rejection rate %.3f at delta_mu = 0 over 200 trials (limit 0.08)", r)};
}

Outcome mean_shift_power() {
    auto s = base_spec(Protocol::MeanShift, 100, 100, 401);
    s.sweep = {3.0};
    s.trials = 100;
    const double r = rates(s)[0][0];
    return {r >= 0.95, fmt("baseline power %.3f at delta_mu = 3 (limit 0.95)", r)};
}

Outcome optimised_mean_shift_power() {
    auto s = base_spec(Protocol::MeanShift, 100, 100, 501);
    s.tests = {TestVariant::MMDOptimised};
    s.sweep = {2.0};
    s.trials = 100;
    s.grid = "paper";
    s.split = 0.5;
    const double r = rates(s)[0][0];
    return {r >= 0.90, fmt("optimised power %.3f at delta_mu = 2 (limit 0.90)", r)};
}

Outcome variance_shift_monotone() {
    auto s = base_spec(Protocol::VarShift, 300, 100, 601);
    s.sweep_parameter = "delta_sigma";
    s.sweep = {0.0, 8.0, 16.0, 32.0};
    s.trials = 100;
    const auto r = rates(s)[0];
    const bool ok = r[0] <= 0.08 && non_decreasing_within_2sd(r, s.trials);
    return {ok, "power at delta_sigma 0/8/16/32 = " + join(r) + " (power(0) <= 0.08, monotone within 2 SD)"};
}

Outcome rotation_independence() {
    auto s = base_spec(Protocol::Rotation, 200, 10, 701);
    s.generator.coeff_dist = CoeffDist::Uniform;
    s.tests = {TestVariant::HSICBaseline};
    s.sweep_parameter = "theta";
    s.sweep = {0.0, 1.0};
    s.sweep_unit = std::numbers::pi / 4.0;
    s.trials = 200;
    const auto r = rates(s)[0];
    return {r[0] <= 0.08 && r[1] >= 0.90,
            fmt("uniform coefficients: rate %.3f at theta = 0 (limit 0.08), %.3f at pi/4 (limit 0.90)", r[0], r[1])};
}

Outcome rotation_monotone() {
    bool ok = true;
    std::string detail;
    for (auto dist : {CoeffDist::Uniform, CoeffDist::StudentT, CoeffDist::Exponential}) {
        auto s = base_spec(Protocol::Rotation, 200, 10, 801);
        s.generator.coeff_dist = dist;
        s.tests = {TestVariant::HSICBaseline};
        s.sweep_parameter = "theta";
        s.sweep = {0.0, 0.25, 0.5, 0.75, 1.0};
        s.sweep_unit = std::numbers::pi / 4.0;
        s.trials = 100;
        const auto r = rates(s)[0];
        ok = ok && non_decreasing_within_2sd(r, s.trials);
        detail += (detail.empty() ? "" : "; ") + to_string(dist) + " " + join(r);
    }
    return {ok, detail + " (monotone within 2 SD)"};
}

Outcome linear_dependence_comparison() {
    const std::size_t trials = 200;
    auto run = [&](std::size_t m) {
        auto s = base_spec(Protocol::LinearDep, m, 10, 900 + m);
        s.tests = {TestVariant::SubCorr, TestVariant::SubHSIC, TestVariant::HSICBaseline};
        s.sweep = {0.0};
        s.trials = trials;
        const auto r = rates(s);
        return std::vector<double>{r[0][0], r[1][0], r[2][0]};
    };
    const auto small = run(10);
    const auto large = run(100);
    const double sd = oracle::binomial_sd(small[2], trials);
    const bool ok = small[0] >= small[2] - 2.0 * sd && large[0] >= 0.9 && large[1] >= 0.9 && large[2] >= 0.9;
    return {ok, fmt("m = 10: subcorr %.3f, subhsic %.3f, hsic %.3f (subcorr >= hsic - 2 SD); "
                    "m = 100: %.3f, %.3f, %.3f (all >= 0.9)",
                    small[0], small[1], small[2], large[0], large[1], large[2])};
}

struct VarianceCheck {
    double monte_carlo;
    double jackknife_mean;
    double rel() const { return std::abs(jackknife_mean - monte_carlo) / monte_carlo; }
};

VarianceCheck variance_check(GeneratorSpec g, bool mmd, std::size_t resamples) {
    g.seed = substream_key(1000, {0});
    const auto ref = generate(g);
    const auto kx = KernelConfig::fixed(mmd ? median_heuristic(ref.x, ref.y, MedianMode::Aggregated)
                                            : median_heuristic(ref.x, MedianMode::PerSample));
    const auto ky = KernelConfig::fixed(median_heuristic(ref.y, MedianMode::PerSample));
    std::vector<double> stat, jack;
    for (std::size_t r = 0; r < resamples; ++r) {
        g.seed = substream_key(1000, {1, r});
        const auto d = generate(g);
        stat.push_back(mmd ? mmd2_u(d.x, d.y, kx).value : hsic_u(d.x, d.y, kx, ky).value);
        jack.push_back(mmd ? mmd_variance(d.x, d.y, kx) : hsic_variance(d.x, d.y, kx, ky));
    }
    const double n = static_cast<double>(resamples);
    double mean = 0.0, jk = 0.0;
    for (std::size_t r = 0; r < resamples; ++r) {
        mean += stat[r] / n;
        jk += jack[r] / n;
    }
    double var = 0.0;
    for (double v : stat) var += (v - mean) * (v - mean) / (n - 1.0);
    return {var, jk};
}

Outcome variance_estimators() {
    GeneratorSpec mmd_gen;
    mmd_gen.protocol = Protocol::MeanShift;
    mmd_gen.m = mmd_gen.n = 16;
    mmd_gen.T = 20;
    mmd_gen.delta_mu = 2.0;
    GeneratorSpec hsic_gen;
    hsic_gen.protocol = Protocol::LinearDep;
    hsic_gen.m = hsic_gen.n = 16;
    hsic_gen.T = 10;
    const auto a = variance_check(mmd_gen, true, 2000);
    const auto b = variance_check(hsic_gen, false, 2000);
    return {a.rel() <= 0.3 && b.rel() <= 0.3,
            fmt("m = 16, 2000 resamples: MMD (meanshift, delta_mu = 2) MC %.3e vs jackknife %.3e, rel %.2f; "
                "HSIC (lineardep) MC %.3e vs jackknife %.3e, rel %.2f (limit 0.30)",
                a.monte_carlo, a.jackknife_mean, a.rel(), b.monte_carlo, b.jackknife_mean, b.rel())};
}

Outcome ci_formula() {
    const auto ci = rejection_interval(100, 200);
    const double half = 0.5 * (ci.high - ci.low);
    return {std::abs(half - 0.0693) <= 1e-4, fmt("half-width %.6f at mu_hat = 0.5, 200 trials (0.0693 +- 1e-4)", half)};
}

Outcome imputation() {
    const double fill = inverse_distance_fill({{0.0, 1.0}, {10.0, 3.0}});

    RawPanel p;
    std::mt19937_64 rng(1201);
    std::normal_distribution<double> nd;
    std::bernoulli_distribution drop(0.2);
    for (int e = 0; e < 10; ++e) p.entities.push_back("c" + std::to_string(e));
    for (int y = 0; y < 15; ++y) p.years.push_back(1990 + y);
    for (const char* name : {"gdp", "co2", "energy"}) {
        IndicatorTable t(10, 15);
        for (std::size_t e = 0; e < 10; ++e) {
            const double level = nd(rng);
            for (std::size_t y = 0; y < 15; ++y)
                if (!drop(rng)) t.at(e, y) = level + 0.1 * static_cast<double>(y) + 0.05 * nd(rng);
        }
        p.indicators.emplace(name, std::move(t));
    }
    const std::size_t missing = p.missing();
    const auto once = impute(p);
    const auto twice = impute(once);
    bool observed_kept = true;
    for (const auto& [name, t] : p.indicators)
        for (std::size_t e = 0; e < 10; ++e)
            for (std::size_t y = 0; y < 15; ++y)
                if (t.at(e, y) && once.indicators.at(name).at(e, y) != t.at(e, y)) observed_kept = false;
    const bool ok = fill == 2.5 && once.missing() == 0 && twice == once && observed_kept;
    return {ok, fmt("worked example %.17g (want 2.5 exactly); %zu of 450 cells missing, "
                    "impute(impute(p)) == impute(p): %s, observed cells kept: %s",
                    fill, missing, twice == once ? "yes" : "no", observed_kept ? "yes" : "no")};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    auto s = base_spec(Protocol::MeanShift, 30, 30, 1301);
    s.name = "determinism";
    s.tests = {TestVariant::MMDBaseline, TestVariant::MMDOptimised};
    s.sweep = {0.0, 2.0, 4.0};
    s.trials = 20;
    s.permutations = 200;
    s.keep_decisions = true;
    s.formats = {"csv", "json"};
    const auto root = std::filesystem::temp_directory_path() / "panelkt_acceptance_determinism";
    std::filesystem::remove_all(root);

    // Same relative output dir, resolved against two different spec locations.
    s.output_dir = "out";
    s.base_dir = root / "serial";
    s.threads = 1;
    (void)emit_results(run_experiment(s));
    s.base_dir = root / "parallel";
    s.threads = 4;
    s.parallel_points = true;
    (void)emit_results(run_experiment(s));

    bool same = true;
    std::size_t bytes = 0;
    for (const char* ext : {".csv", ".json"}) {
        const auto a = slurp(root / "serial" / "out" / ("determinism" + std::string(ext)));
        const auto b = slurp(root / "parallel" / "out" / ("determinism" + std::string(ext)));
        same = same && !a.empty() && a == b;
        bytes += a.size();
    }
    std::filesystem::remove_all(root);
    return {same, fmt("CSV + JSON (%zu bytes) identical between 1 worker and 4 workers with parallel points: %s",
                      bytes, same ? "yes" : "no")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence},
        {2, "HSIC constant-kernel identity", hsic_constant_kernels},
        {3, "type-I calibration", type_one_calibration},
        {4, "mean-shift power", mean_shift_power},
        {5, "optimised mean-shift power", optimised_mean_shift_power},
        {6, "variance-shift monotonicity", variance_shift_monotone},
        {7, "rotation independence", rotation_independence},
        {8, "rotation monotonicity", rotation_monotone},
        {9, "linear-dependence comparison", linear_dependence_comparison},
        {10, "variance-estimator sanity", variance_estimators},
        {11, "CI formula", ci_formula},
        {12, "imputation", imputation},
        {13, "determinism", determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s  criterion %2d  %-30s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
