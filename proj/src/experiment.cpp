#include "panelkt/experiment.hpp"

#include "panelkt/baselines.hpp"
#include "panelkt/errors.hpp"
#include "panelkt/panel_io.hpp"
#include "panelkt/plot.hpp"
#include "panelkt/rng.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace panelkt {

namespace {

struct VariantName {
    TestVariant variant;
    const char* name;
};

constexpr VariantName kVariantNames[] = {
    {TestVariant::MMDBaseline, "mmd-baseline"},   {TestVariant::MMDOptimised, "mmd-optimised"},
    {TestVariant::HSICBaseline, "hsic-baseline"}, {TestVariant::HSICOptimised, "hsic-optimised"},
    {TestVariant::SubCorr, "subcorr"},            {TestVariant::SubHSIC, "subhsic"},
};

constexpr const char* kSweepParameters[] = {"delta_mu", "delta_sigma", "theta", "m", "T"};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    std::vector<std::string> out;
    for (auto& p : parts) {
        boost::trim(p);
        if (!p.empty()) out.push_back(p);
    }
    return out;
}

double to_number(const std::string& text, const std::string& key) {
    double v = 0.0;
    if (!parse_double(text, v)) throw ConfigError("'" + key + "': not a number: '" + text + "'");
    return v;
}

std::size_t to_count(const std::string& text, const std::string& key) {
    const double v = to_number(text, key);
    if (v < 0.0 || v != std::floor(v)) throw ConfigError("'" + key + "': expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

bool to_bool(std::string text, const std::string& key) {
    boost::to_lower(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("'" + key + "': expected true or false");
}

double parse_unit(const std::string& text) {
    std::string t = boost::to_lower_copy(boost::trim_copy(text));
    if (t == "pi/4") return std::numbers::pi / 4.0;
    if (t == "pi") return std::numbers::pi;
    return to_number(t, "sweep.unit");
}

std::string unit_label(double unit) {
    if (unit == std::numbers::pi / 4.0) return "pi/4";
    if (unit == std::numbers::pi) return "pi";
    return format_double(unit);
}

std::optional<GridExperiment> grid_experiment(const GeneratorSpec& gen) {
    switch (gen.protocol) {
        case Protocol::MeanShift: return GridExperiment::MeanShift;
        case Protocol::VarShift: return GridExperiment::VarShift;
        case Protocol::Rotation:
            switch (gen.coeff_dist) {
                case CoeffDist::StudentT: return GridExperiment::RotationStudentT;
                case CoeffDist::Uniform: return GridExperiment::RotationUniform;
                case CoeffDist::Exponential: return GridExperiment::RotationExponential;
                case CoeffDist::Gaussian: return std::nullopt;
            }
            return std::nullopt;
        default: return std::nullopt;
    }
}

double grid_delta(const GeneratorSpec& gen) {
    return gen.protocol == Protocol::VarShift ? gen.delta_sigma : gen.delta_mu;
}

// Grid for one axis: tabulated preset when one exists for the generator, else
// the median-scaled fallback around `median`; or a custom list.
SearchGrid axis_grid(const ExperimentSpec& spec, const GeneratorSpec& gen, double median) {
    if (spec.grid == "paper") {
        if (auto e = grid_experiment(gen)) {
            if (auto g = paper_grid(*e, grid_delta(gen))) return *g;
        }
        return median_scaled_grid(median);
    }
    if (spec.grid == "median") return median_scaled_grid(median);
    std::vector<double> values;
    for (const auto& s : split_list(spec.grid)) values.push_back(to_number(s, "test.grid"));
    return SearchGrid::custom(std::move(values));
}

// Rethrows the exception held by `error` in the same category with `context`
// prepended, so callers can still map it onto an exit code.
[[noreturn]] void rethrow_with_context(std::exception_ptr error, const std::string& context) {
    try {
        std::rethrow_exception(error);
    } catch (const SearchError& e) {
        throw SearchError(context + ": " + e.what());
    } catch (const DegenerateError& e) {
        throw DegenerateError(context + ": " + e.what());
    } catch (const SampleSizeError& e) {
        throw SampleSizeError(context + ": " + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(context + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(context + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(context + ": " + e.what());
    } catch (const std::exception& e) {
        throw Error(context + ": " + e.what());
    }
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(threads, count);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

TestVariant parse_test_variant(const std::string& name) {
    const std::string key = boost::to_lower_copy(boost::trim_copy(name));
    for (const auto& v : kVariantNames)
        if (key == v.name) return v.variant;
    throw ConfigError("unknown test variant '" + name + "'");
}

std::string to_string(TestVariant variant) {
    for (const auto& v : kVariantNames)
        if (v.variant == variant) return v.name;
    return "unknown";
}

void ExperimentSpec::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (sweep.empty()) throw ConfigError("sweep must be nonempty");
    if (tests.empty()) throw ConfigError("at least one test variant is required");
    if (std::find(std::begin(kSweepParameters), std::end(kSweepParameters), sweep_parameter) ==
        std::end(kSweepParameters))
        throw ConfigError("unknown sweep parameter '" + sweep_parameter + "'");
    if (!(sweep_unit > 0.0) || !std::isfinite(sweep_unit)) throw ConfigError("sweep unit must be positive");
    if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
    for (const auto& f : formats)
        if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    TestConfig{alpha, permutations, seed}.validate();
    for (double v : sweep) sweep_generator(*this, v).validate();
}

std::filesystem::path ExperimentSpec::resolved_output_dir() const {
    std::filesystem::path dir(output_dir);
    if (dir.is_relative() && !base_dir.empty()) dir = base_dir / dir;
    return dir;
}

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) { return to_json(a) == to_json(b); }

ExperimentSpec parse_experiment_spec(std::istream& in, const std::filesystem::path& base_dir) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("experiment spec: " + e.message(), e.line());
    }

    const auto format = tree.get<std::string>("format", "");
    if (format != kSpecFormat)
        throw ConfigError("experiment spec: expected 'format = " + std::string(kSpecFormat) + "', got '" +
                          format + "'");

    ExperimentSpec spec;
    spec.base_dir = base_dir;
    auto get = [&](const std::string& key) { return tree.get_optional<std::string>(key); };

    spec.name = get("name").value_or(spec.name);
    if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos)
        throw ConfigError("name must be a nonempty file stem");

    GeneratorSpec& g = spec.generator;
    if (auto v = get("generator.protocol")) g.protocol = parse_protocol(*v);
    if (auto v = get("generator.m")) g.m = to_count(*v, "generator.m");
    g.n = g.m;
    if (auto v = get("generator.n")) g.n = to_count(*v, "generator.n");
    if (auto v = get("generator.t")) g.T = to_count(*v, "generator.t");
    if (auto v = get("generator.delta_mu")) g.delta_mu = to_number(*v, "generator.delta_mu");
    if (auto v = get("generator.delta_sigma")) g.delta_sigma = to_number(*v, "generator.delta_sigma");
    if (auto v = get("generator.theta")) g.theta = to_number(*v, "generator.theta");
    if (auto v = get("generator.dist")) g.coeff_dist = parse_coeff_dist(*v);
    if (auto v = get("generator.linear_noise_variance"))
        g.linear_noise_variance = to_number(*v, "generator.linear_noise_variance");

    if (auto v = get("sweep.parameter")) spec.sweep_parameter = boost::trim_copy(*v);
    if (auto v = get("sweep.values")) {
        spec.sweep.clear();
        for (const auto& s : split_list(*v)) spec.sweep.push_back(to_number(s, "sweep.values"));
    }
    if (auto v = get("sweep.unit")) spec.sweep_unit = parse_unit(*v);

    if (auto v = get("test.variants")) {
        spec.tests.clear();
        for (const auto& s : split_list(*v)) spec.tests.push_back(parse_test_variant(s));
    }
    if (auto v = get("test.alpha")) spec.alpha = to_number(*v, "test.alpha");
    if (auto v = get("test.perms")) spec.permutations = to_count(*v, "test.perms");
    if (auto v = get("test.grid")) spec.grid = boost::trim_copy(*v);
    if (auto v = get("test.split")) spec.split = to_number(*v, "test.split");

    if (auto v = get("run.trials")) spec.trials = to_count(*v, "run.trials");
    if (auto v = get("run.seed")) spec.seed = std::stoull(*v);
    if (auto v = get("run.threads")) spec.threads = to_count(*v, "run.threads");
    if (auto v = get("run.parallel_points")) spec.parallel_points = to_bool(*v, "run.parallel_points");
    if (auto v = get("run.keep_decisions")) spec.keep_decisions = to_bool(*v, "run.keep_decisions");
    if (auto v = get("run.paper_scale"); v && to_bool(*v, "run.paper_scale")) spec.permutations = 5000;

    if (auto v = get("output.dir")) spec.output_dir = boost::trim_copy(*v);
    if (auto v = get("output.formats")) spec.formats = split_list(*v);

    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open experiment spec " + path.string());
    return parse_experiment_spec(in, path.parent_path());
}

RateInterval rejection_interval(std::size_t rejections, std::size_t trials) {
    if (trials == 0) throw SampleSizeError("rejection_interval: trials must be >= 1");
    const double mu = static_cast<double>(rejections) / static_cast<double>(trials);
    const double half = 1.96 * std::sqrt(mu * (1.0 - mu) / static_cast<double>(trials));
    return {mu, std::max(0.0, mu - half), std::min(1.0, mu + half)};
}

bool operator==(const SweepPointResult& a, const SweepPointResult& b) {
    return a.test == b.test && a.parameter == b.parameter && a.trials == b.trials &&
           a.rejections == b.rejections && a.mu_hat == b.mu_hat && a.ci_low == b.ci_low &&
           a.ci_high == b.ci_high && a.seed == b.seed && a.decisions == b.decisions;
}

GeneratorSpec sweep_generator(const ExperimentSpec& spec, double value) {
    GeneratorSpec g = spec.generator;
    const double scaled = value * spec.sweep_unit;
    const auto& p = spec.sweep_parameter;
    if (p == "delta_mu") {
        g.delta_mu = scaled;
    } else if (p == "delta_sigma") {
        g.delta_sigma = scaled;
    } else if (p == "theta") {
        g.theta = scaled;
    } else if (p == "m" || p == "T") {
        if (scaled < 1.0 || scaled != std::floor(scaled))
            throw ConfigError("sweep over " + p + " needs positive integer values");
        const auto count = static_cast<std::size_t>(scaled);
        if (p == "T") {
            g.T = count;
        } else {
            g.m = count;
            g.n = count;
        }
    } else {
        throw ConfigError("unknown sweep parameter '" + p + "'");
    }
    return g;
}

bool run_trial(const ExperimentSpec& spec, TestVariant variant, const GeneratorSpec& gen, std::uint64_t test_seed) {
    const PanelPair data = generate(gen);
    TestConfig config{spec.alpha, spec.permutations, test_seed};
    SearchOptions options;
    options.alpha = spec.alpha;
    options.seed = test_seed;

    switch (variant) {
        case TestVariant::MMDBaseline:
            return mmd_two_sample_test(data.x, data.y, KernelConfig::median(MedianMode::Aggregated), config).reject;
        case TestVariant::HSICBaseline:
            return hsic_independence_test(data.x, data.y, KernelConfig::median(MedianMode::PerSample),
                                          KernelConfig::median(MedianMode::PerSample), config)
                .reject;
        case TestVariant::MMDOptimised: {
            const double med = spec.grid == "paper" || spec.grid == "median"
                                   ? median_heuristic(data.x, data.y, MedianMode::Aggregated)
                                   : 1.0;
            const SearchGrid grid = axis_grid(spec, gen, med);
            return optimised_test(data.x, data.y, SearchKind::MMD, grid, {}, spec.split, config, options)
                .test.reject;
        }
        case TestVariant::HSICOptimised: {
            const bool needs_median = spec.grid == "paper" || spec.grid == "median";
            const double mx = needs_median ? median_heuristic(data.x, MedianMode::PerSample) : 1.0;
            const double my = needs_median ? median_heuristic(data.y, MedianMode::PerSample) : 1.0;
            const SearchGrid gx = axis_grid(spec, gen, mx);
            const SearchGrid gy = axis_grid(spec, gen, my);
            return optimised_test(data.x, data.y, SearchKind::HSIC, gx, gy, spec.split, config, options)
                .test.reject;
        }
        case TestVariant::SubCorr: return baseline_test(BaselineKind::SubCorr, data.x, data.y, config).reject;
        case TestVariant::SubHSIC: return baseline_test(BaselineKind::SubHSIC, data.x, data.y, config).reject;
    }
    throw ConfigError("unknown test variant");
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    std::size_t threads = spec.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    struct Job {
        std::size_t variant_index;
        std::size_t point_index;
        GeneratorSpec generator;
        std::vector<char> decisions;
        std::vector<std::exception_ptr> errors;
        double wall_seconds = 0.0;
    };

    std::vector<Job> jobs;
    for (std::size_t v = 0; v < spec.tests.size(); ++v) {
        for (std::size_t p = 0; p < spec.sweep.size(); ++p) {
            jobs.push_back({v, p, sweep_generator(spec, spec.sweep[p]),
                            std::vector<char>(spec.trials, 0),
                            std::vector<std::exception_ptr>(spec.trials), 0.0});
        }
    }

    // Data for trial r depends only on (seed, r): every variant and sweep
    // point sees the same underlying draws, only the sweep value differs.
    auto run_one = [&](Job& job, std::size_t r) {
        GeneratorSpec gen = job.generator;
        gen.seed = substream_key(spec.seed, {stream::trial, r});
        const std::uint64_t test_seed = substream_key(spec.seed, {stream::trial, r, job.variant_index + 1});
        try {
            job.decisions[r] = run_trial(spec, spec.tests[job.variant_index], gen, test_seed) ? 1 : 0;
        } catch (...) {
            job.errors[r] = std::current_exception();
        }
    };

    auto check = [&](const Job& job) {
        for (std::size_t r = 0; r < spec.trials; ++r) {
            if (job.errors[r]) {
                rethrow_with_context(job.errors[r], "test " + to_string(spec.tests[job.variant_index]) + ", " +
                                                        spec.sweep_parameter + " = " +
                                                        format_double(spec.sweep[job.point_index]) +
                                                        ", trial " + std::to_string(r));
            }
        }
    };

    using Clock = std::chrono::steady_clock;
    if (spec.parallel_points) {
        const auto start = Clock::now();
        parallel_for(jobs.size() * spec.trials, threads,
                     [&](std::size_t k) { run_one(jobs[k / spec.trials], k % spec.trials); });
        const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        for (auto& job : jobs) {
            job.wall_seconds = elapsed / static_cast<double>(jobs.size());
            check(job);
        }
    } else {
        for (auto& job : jobs) {
            const auto start = Clock::now();
            parallel_for(spec.trials, threads, [&](std::size_t r) { run_one(job, r); });
            job.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
            check(job);
        }
    }

    ExperimentResult result;
    result.spec = spec;
    for (const auto& job : jobs) {
        SweepPointResult point;
        point.test = to_string(spec.tests[job.variant_index]);
        point.parameter = spec.sweep[job.point_index];
        point.trials = spec.trials;
        point.rejections = static_cast<std::size_t>(std::count(job.decisions.begin(), job.decisions.end(), 1));
        const RateInterval ci = rejection_interval(point.rejections, point.trials);
        point.mu_hat = ci.mu_hat;
        point.ci_low = ci.low;
        point.ci_high = ci.high;
        point.seed = spec.seed;
        if (spec.keep_decisions) point.decisions.assign(job.decisions.begin(), job.decisions.end());
        point.wall_seconds = job.wall_seconds;
        result.points.push_back(std::move(point));
    }
    return result;
}

// Scheduling knobs (threads, parallel_points) and the spec file location are
// left out: they cannot change any result.
nlohmann::json to_json(const ExperimentSpec& spec) {
    const GeneratorSpec& g = spec.generator;
    nlohmann::json tests = nlohmann::json::array();
    for (auto t : spec.tests) tests.push_back(to_string(t));
    return {
        {"name", spec.name},
        {"generator",
         {{"protocol", to_string(g.protocol)},
          {"m", g.m},
          {"n", g.n},
          {"t", g.T},
          {"delta_mu", g.delta_mu},
          {"delta_sigma", g.delta_sigma},
          {"theta", g.theta},
          {"dist", to_string(g.coeff_dist)},
          {"linear_noise_variance", g.linear_noise_variance}}},
        {"sweep", {{"parameter", spec.sweep_parameter}, {"values", spec.sweep}, {"unit", unit_label(spec.sweep_unit)}}},
        {"test",
         {{"variants", tests},
          {"alpha", spec.alpha},
          {"perms", spec.permutations},
          {"grid", spec.grid},
          {"split", spec.split}}},
        {"run",
         {{"trials", spec.trials},
          {"seed", spec.seed},
          {"keep_decisions", spec.keep_decisions}}},
        {"output", {{"dir", spec.output_dir}, {"formats", spec.formats}}},
    };
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
    try {
        ExperimentSpec spec;
        spec.name = j.at("name").get<std::string>();
        const auto& g = j.at("generator");
        spec.generator.protocol = parse_protocol(g.at("protocol").get<std::string>());
        spec.generator.m = g.at("m").get<std::size_t>();
        spec.generator.n = g.at("n").get<std::size_t>();
        spec.generator.T = g.at("t").get<std::size_t>();
        spec.generator.delta_mu = g.at("delta_mu").get<double>();
        spec.generator.delta_sigma = g.at("delta_sigma").get<double>();
        spec.generator.theta = g.at("theta").get<double>();
        spec.generator.coeff_dist = parse_coeff_dist(g.at("dist").get<std::string>());
        spec.generator.linear_noise_variance = g.at("linear_noise_variance").get<double>();
        const auto& s = j.at("sweep");
        spec.sweep_parameter = s.at("parameter").get<std::string>();
        spec.sweep = s.at("values").get<std::vector<double>>();
        spec.sweep_unit = parse_unit(s.at("unit").get<std::string>());
        const auto& t = j.at("test");
        spec.tests.clear();
        for (const auto& name : t.at("variants")) spec.tests.push_back(parse_test_variant(name.get<std::string>()));
        spec.alpha = t.at("alpha").get<double>();
        spec.permutations = t.at("perms").get<std::size_t>();
        spec.grid = t.at("grid").get<std::string>();
        spec.split = t.at("split").get<double>();
        const auto& r = j.at("run");
        spec.trials = r.at("trials").get<std::size_t>();
        spec.seed = r.at("seed").get<std::uint64_t>();
        spec.keep_decisions = r.at("keep_decisions").get<bool>();
        const auto& o = j.at("output");
        spec.output_dir = o.at("dir").get<std::string>();
        spec.formats = o.at("formats").get<std::vector<std::string>>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("experiment spec json: ") + e.what());
    }
}

nlohmann::json to_json(const ExperimentResult& result) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : result.points) {
        nlohmann::json jp = {
            {"test", p.test},           {"parameter", p.parameter}, {"trials", p.trials},
            {"rejections", p.rejections}, {"mu_hat", p.mu_hat},     {"ci_low", p.ci_low},
            {"ci_high", p.ci_high},     {"seed", p.seed},
        };
        if (!p.decisions.empty()) {
            std::string bits;
            for (bool d : p.decisions) bits += d ? '1' : '0';
            jp["decisions"] = bits;
        }
        points.push_back(std::move(jp));
    }
    return {
        {"format", kResultFormat},
        {"spec_format", kSpecFormat},
        {"spec", to_json(result.spec)},
        {"results", points},
    };
}

ExperimentResult experiment_result_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kResultFormat)
            throw InputError("unsupported results format '" + j.at("format").get<std::string>() + "'");
        ExperimentResult result;
        result.spec = experiment_spec_from_json(j.at("spec"));
        for (const auto& jp : j.at("results")) {
            SweepPointResult p;
            p.test = jp.at("test").get<std::string>();
            p.parameter = jp.at("parameter").get<double>();
            p.trials = jp.at("trials").get<std::size_t>();
            p.rejections = jp.at("rejections").get<std::size_t>();
            p.mu_hat = jp.at("mu_hat").get<double>();
            p.ci_low = jp.at("ci_low").get<double>();
            p.ci_high = jp.at("ci_high").get<double>();
            p.seed = jp.at("seed").get<std::uint64_t>();
            if (jp.contains("decisions")) {
                for (char c : jp.at("decisions").get<std::string>()) p.decisions.push_back(c == '1');
            }
            result.points.push_back(std::move(p));
        }
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("results json: ") + e.what());
    }
}

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
    out << "test," << result.spec.sweep_parameter << ",mu_hat,ci_low,ci_high,trials,seed\n";
    for (const auto& p : result.points) {
        out << p.test << ',' << format_double(p.parameter) << ',' << format_double(p.mu_hat) << ','
            << format_double(p.ci_low) << ',' << format_double(p.ci_high) << ',' << p.trials << ',' << p.seed
            << '\n';
    }
}

std::string results_svg(const ExperimentResult& result) {
    std::vector<PlotSeries> series;
    for (auto variant : result.spec.tests) {
        PlotSeries s;
        s.name = to_string(variant);
        for (const auto& p : result.points) {
            if (p.test != s.name) continue;
            s.x.push_back(p.parameter);
            s.y.push_back(p.mu_hat);
            s.lower.push_back(p.ci_low);
            s.upper.push_back(p.ci_high);
        }
        series.push_back(std::move(s));
    }
    std::string x_label = result.spec.sweep_parameter;
    if (result.spec.sweep_unit != 1.0) x_label += " (x " + unit_label(result.spec.sweep_unit) + ")";
    return power_curve_svg(series, x_label, "rejection rate", result.spec.name);
}

std::vector<std::filesystem::path> emit_results(const ExperimentResult& result) {
    const auto dir = result.spec.resolved_output_dir();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto write = [&](const std::string& ext, const std::string& body) {
        const auto path = dir / (result.spec.name + "." + ext);
        std::ofstream out(path, std::ios::binary);
        out << body;
        out.close();
        if (!out) throw Error("cannot write " + path.string());
        written.push_back(path);
    };
    for (const auto& format : result.spec.formats) {
        if (format == "csv") {
            std::ostringstream os;
            write_results_csv(os, result);
            write("csv", os.str());
        } else if (format == "json") {
            write("json", to_json(result).dump(2) + "\n");
        } else if (format == "svg") {
            write("svg", results_svg(result));
        }
    }
    return written;
}

}  // namespace panelkt
