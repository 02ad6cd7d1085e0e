// panelkt command-line driver.
//
// Exit status: 0 success, 1 unexpected failure, 2 usage, 3 input, 4 numerical
// degeneracy.

#include "panelkt/baselines.hpp"
#include "panelkt/errors.hpp"
#include "panelkt/experiment.hpp"
#include "panelkt/hypothesis_tests.hpp"
#include "panelkt/panel_ingest.hpp"
#include "panelkt/panel_io.hpp"
#include "panelkt/power_search.hpp"
#include "panelkt/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace panelkt;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kUsage = 2, kInput = 3, kDegenerate = 4 };

json to_json(const TestResult& r) {
    json j = {
        {"statistic", r.statistic},
        {"threshold", r.threshold},
        {"p_value", r.p_value},
        {"reject", r.reject},
        {"approximate", r.approximate},
        {"alpha", r.config.alpha},
        {"permutations", r.config.permutations},
        {"seed", r.config.seed},
        {"null_method", r.config.null_method == NullMethod::GammaApprox ? "gamma" : "permutation"},
        {"sigma_x", r.sigma_x},
        {"sigma_y", r.sigma_y},
    };
    if (r.null_samples) j["null_samples"] = *r.null_samples;
    return j;
}

json to_json(const SplitIndices& s) { return {{"train", s.train}, {"test", s.test}}; }

json to_json(const PowerSearchResult& r) {
    json j = {
        {"kind", r.kind == SearchKind::MMD ? "mmd" : "hsic"},
        {"grid_x", r.grid_x.values},
        {"grid_x_provenance", to_string(r.grid_x.provenance)},
        {"criterion", r.criterion},
        {"selected_x", r.selected_x},
        {"split_x", to_json(r.split_x)},
        {"seed", r.seed},
    };
    if (r.kind == SearchKind::HSIC) {
        j["grid_y"] = r.grid_y.values;
        j["grid_y_provenance"] = to_string(r.grid_y.provenance);
        j["selected_y"] = r.selected_y;
    } else {
        j["split_y"] = to_json(r.split_y);
    }
    return j;
}

SamplePanel read_panel(const std::string& path) { return read_panel_csv(fs::path(path)).panel; }

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& field : split_csv_line(text)) {
        double v = 0.0;
        if (!parse_double(field, v)) throw ParameterError("not a number in list: '" + field + "'");
        out.push_back(v);
    }
    return out;
}

MedianMode parse_median_mode(const std::string& text) {
    if (text == "aggregated") return MedianMode::Aggregated;
    if (text == "per-sample") return MedianMode::PerSample;
    throw ParameterError("--median must be aggregated or per-sample");
}

// Grid from a preset name or an explicit comma list. Tabulated presets that have
// no entry for `delta` fall back to the median-scaled grid around `median`.
SearchGrid resolve_grid(const std::string& text, double delta, double median) {
    static const std::pair<const char*, GridExperiment> presets[] = {
        {"meanshift", GridExperiment::MeanShift},
        {"varshift", GridExperiment::VarShift},
        {"rotation-student", GridExperiment::RotationStudentT},
        {"rotation-uniform", GridExperiment::RotationUniform},
        {"rotation-exponential", GridExperiment::RotationExponential},
    };
    if (text == "median") return median_scaled_grid(median);
    for (const auto& [name, experiment] : presets) {
        if (text == name) {
            if (auto g = paper_grid(experiment, delta)) return *g;
            return median_scaled_grid(median);
        }
    }
    return SearchGrid::custom(parse_list(text));
}

TestConfig make_config(double alpha, std::size_t perms, std::uint64_t seed, const std::string& null_method,
                       bool keep_null) {
    TestConfig config;
    config.alpha = alpha;
    config.permutations = perms;
    config.seed = seed;
    config.keep_null = keep_null;
    if (null_method == "gamma") config.null_method = NullMethod::GammaApprox;
    else if (null_method != "permutation") throw ParameterError("--null must be permutation or gamma");
    return config;
}

std::string file_stem_for(const std::string& name) {
    std::string out;
    for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

struct TestArgs {
    std::string x, y;
    double alpha = 0.05;
    std::size_t perms = 500;
    std::uint64_t seed = 0;
    std::string null_method = "permutation";
    bool keep_null = false;
};

void add_test_args(CLI::App* cmd, TestArgs& a) {
    cmd->add_option("--x", a.x, "first panel CSV")->required();
    cmd->add_option("--y", a.y, "second panel CSV")->required();
    cmd->add_option("--alpha", a.alpha, "significance level")->required();
    cmd->add_option("--perms", a.perms, "number of permutations")->required();
    cmd->add_option("--seed", a.seed, "seed")->required();
    cmd->add_option("--null", a.null_method, "permutation | gamma")->capture_default_str();
    cmd->add_flag("--keep-null", a.keep_null, "include the null sample in the output");
}

void write_manifest(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path);
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel two-sample and independence tests for time-series panels"};
    app.require_subcommand(1);

    // mmd-test
    TestArgs mmd;
    std::optional<double> mmd_sigma;
    std::string mmd_median;
    auto* mmd_cmd = app.add_subcommand("mmd-test", "MMD two-sample test");
    add_test_args(mmd_cmd, mmd);
    auto* sigma_opt = mmd_cmd->add_option("--sigma", mmd_sigma, "fixed Gaussian bandwidth");
    mmd_cmd->add_option("--median", mmd_median, "aggregated | per-sample")->excludes(sigma_opt);

    // hsic-test
    TestArgs hsic;
    std::optional<double> hsic_sigma_x, hsic_sigma_y;
    auto* hsic_cmd = app.add_subcommand("hsic-test", "HSIC independence test");
    add_test_args(hsic_cmd, hsic);
    hsic_cmd->add_option("--sigma-x", hsic_sigma_x, "bandwidth for X (default: median)");
    hsic_cmd->add_option("--sigma-y", hsic_sigma_y, "bandwidth for Y (default: median)");

    // power-opt
    std::string po_kind, po_x, po_y, po_grid, po_grid_y, po_null = "permutation";
    double po_split = 0.5, po_delta = 0.0, po_alpha = 0.05;
    std::size_t po_perms = 500;
    std::uint64_t po_seed = 0;
    bool po_with_threshold = false;
    auto* po_cmd = app.add_subcommand("power-opt", "bandwidth search on a training split, test on the rest");
    po_cmd->add_option("--kind", po_kind, "mmd | hsic")->required()->check(CLI::IsMember({"mmd", "hsic"}));
    po_cmd->add_option("--x", po_x, "first panel CSV")->required();
    po_cmd->add_option("--y", po_y, "second panel CSV")->required();
    po_cmd->add_option("--grid", po_grid,
                       "median | meanshift | varshift | rotation-student | rotation-uniform | "
                       "rotation-exponential | comma list")
        ->required();
    po_cmd->add_option("--grid-y", po_grid_y, "HSIC grid for Y (default: same as --grid)");
    po_cmd->add_option("--split", po_split, "training fraction")->required();
    po_cmd->add_option("--seed", po_seed, "seed for the split and the final test")->required();
    po_cmd->add_option("--delta", po_delta, "shift size selecting the meanshift/varshift preset bucket");
    po_cmd->add_option("--alpha", po_alpha, "significance level")->capture_default_str();
    po_cmd->add_option("--perms", po_perms, "permutations for the final test")->capture_default_str();
    po_cmd->add_option("--null", po_null, "permutation | gamma")->capture_default_str();
    po_cmd->add_flag("--with-threshold", po_with_threshold, "subtract a pilot threshold in the criterion");

    // synth
    std::string sy_protocol, sy_dist = "gaussian", sy_out;
    std::size_t sy_m = 0, sy_n = 0, sy_t = 0;
    double sy_delta_mu = 0.0, sy_delta_sigma = 0.0, sy_theta = 0.0;
    std::uint64_t sy_seed = 0;
    auto* sy_cmd = app.add_subcommand("synth", "generate a synthetic panel pair");
    sy_cmd->add_option("--protocol", sy_protocol, "meanshift | varshift | lineardep | sharedcoeff | rotation")
        ->required();
    sy_cmd->add_option("--m", sy_m, "rows of X")->required();
    sy_cmd->add_option("--n", sy_n, "rows of Y (must equal m for paired protocols)")->required();
    sy_cmd->add_option("--t", sy_t, "time points on [0, 1]")->required();
    sy_cmd->add_option("--delta-mu", sy_delta_mu, "meanshift size");
    sy_cmd->add_option("--delta-sigma", sy_delta_sigma, "varshift size");
    sy_cmd->add_option("--theta", sy_theta, "rotation angle in radians, [0, pi/4]");
    sy_cmd->add_option("--dist", sy_dist, "student | uniform | exponential");
    sy_cmd->add_option("--seed", sy_seed, "seed")->required();
    sy_cmd->add_option("--out", sy_out, "output directory")->required();

    // experiment
    std::string ex_spec;
    std::optional<std::size_t> ex_threads;
    bool ex_paper_scale = false;
    auto* ex_cmd = app.add_subcommand("experiment", "run a sweep and write CSV/JSON/SVG results");
    ex_cmd->add_option("--spec", ex_spec, "experiment spec file")->required();
    ex_cmd->add_option("--threads", ex_threads, "worker threads (0 = all cores)");
    ex_cmd->add_flag("--paper-scale", ex_paper_scale, "use 5000 permutations");

    // ingest
    std::string in_input, in_schema, in_out;
    bool in_impute = false, in_aggregate = false;
    auto* in_cmd = app.add_subcommand("ingest", "load, impute and aggregate a panel CSV");
    in_cmd->add_option("--input", in_input, "long or wide panel CSV")->required();
    in_cmd->add_option("--schema", in_schema, "INI schema: columns, targets, groups, select")->required();
    in_cmd->add_flag("--impute", in_impute, "fill missing cells by inverse entity distance");
    in_cmd->add_flag("--aggregate", in_aggregate, "average indicators into their targets");
    in_cmd->add_option("--out", in_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*mmd_cmd) {
            const auto x = read_panel(mmd.x);
            const auto y = read_panel(mmd.y);
            KernelConfig kernel = KernelConfig::median(MedianMode::Aggregated);
            if (mmd_sigma) kernel = KernelConfig::fixed(*mmd_sigma);
            else if (!mmd_median.empty()) kernel = KernelConfig::median(parse_median_mode(mmd_median));
            const auto config = make_config(mmd.alpha, mmd.perms, mmd.seed, mmd.null_method, mmd.keep_null);
            std::cout << to_json(mmd_two_sample_test(x, y, kernel, config)).dump(2) << '\n';
        } else if (*hsic_cmd) {
            const auto x = read_panel(hsic.x);
            const auto y = read_panel(hsic.y);
            const auto kx = hsic_sigma_x ? KernelConfig::fixed(*hsic_sigma_x) : KernelConfig::median(MedianMode::PerSample);
            const auto ky = hsic_sigma_y ? KernelConfig::fixed(*hsic_sigma_y) : KernelConfig::median(MedianMode::PerSample);
            const auto config = make_config(hsic.alpha, hsic.perms, hsic.seed, hsic.null_method, hsic.keep_null);
            std::cout << to_json(hsic_independence_test(x, y, kx, ky, config)).dump(2) << '\n';
        } else if (*po_cmd) {
            const auto x = read_panel(po_x);
            const auto y = read_panel(po_y);
            const auto config = make_config(po_alpha, po_perms, po_seed, po_null, false);
            SearchOptions options;
            options.with_threshold = po_with_threshold;
            options.alpha = po_alpha;
            options.seed = po_seed;
            OptimisedTestResult result;
            if (po_kind == "mmd") {
                const double med = median_heuristic(x, y, MedianMode::Aggregated);
                const auto grid = resolve_grid(po_grid, po_delta, med);
                result = optimised_test(x, y, SearchKind::MMD, grid, {}, po_split, config, options);
            } else {
                const auto gx = resolve_grid(po_grid, po_delta, median_heuristic(x, MedianMode::PerSample));
                const auto gy = resolve_grid(po_grid_y.empty() ? po_grid : po_grid_y, po_delta,
                                             median_heuristic(y, MedianMode::PerSample));
                result = optimised_test(x, y, SearchKind::HSIC, gx, gy, po_split, config, options);
            }
            json j = to_json(result.search);
            j["test"] = to_json(result.test);
            std::cout << j.dump(2) << '\n';
        } else if (*sy_cmd) {
            GeneratorSpec spec;
            spec.protocol = parse_protocol(sy_protocol);
            spec.m = sy_m;
            spec.n = sy_n;
            spec.T = sy_t;
            spec.delta_mu = sy_delta_mu;
            spec.delta_sigma = sy_delta_sigma;
            spec.theta = sy_theta;
            spec.coeff_dist = parse_coeff_dist(sy_dist);
            spec.seed = sy_seed;
            const auto pair = generate(spec);
            fs::create_directories(sy_out);
            write_panel_csv(fs::path(sy_out) / "x.csv", pair.x);
            write_panel_csv(fs::path(sy_out) / "y.csv", pair.y);
        } else if (*ex_cmd) {
            auto spec = load_experiment_spec(ex_spec);
            if (ex_threads) spec.threads = *ex_threads;
            if (ex_paper_scale) spec.permutations = 5000;
            const auto result = run_experiment(spec);
            for (const auto& path : emit_results(result)) std::cout << path.string() << '\n';
            for (const auto& p : result.points) {
                std::cerr << p.test << ' ' << spec.sweep_parameter << '=' << format_double(p.parameter)
                          << " mu_hat=" << format_double(p.mu_hat) << " wall_s=" << p.wall_seconds << '\n';
            }
        } else if (*in_cmd) {
            const auto schema = load_schema(in_schema);
            RawPanel panel = load_csv(fs::path(in_input), schema);
            std::vector<std::pair<std::string, std::string>> manifest = {
                {"format", "panelkt-ingest/1"},
                {"input", in_input},
                {"schema", in_schema},
                {"layout", schema.layout == CsvLayout::Long ? "long" : "wide"},
                {"entities", std::to_string(panel.entities.size())},
                {"years", panel.years.empty() ? std::string("0")
                                              : std::to_string(panel.years.front()) + ".." +
                                                    std::to_string(panel.years.back())},
                {"indicators", std::to_string(panel.indicators.size())},
                {"missing_cells", std::to_string(panel.missing())},
            };
            if (in_impute) {
                ImputeReport report;
                panel = impute(panel, {}, &report);
                const auto& d = report.donors_per_cell;
                manifest.emplace_back("imputation", "inverse entity distance, z-scored mutual coordinates");
                manifest.emplace_back("cells_filled", std::to_string(report.cells_filled));
                if (!d.empty()) {
                    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
                    manifest.emplace_back("donors_per_cell_min", std::to_string(*std::min_element(d.begin(), d.end())));
                    manifest.emplace_back("donors_per_cell_mean", format_double(mean));
                    manifest.emplace_back("donors_per_cell_max", std::to_string(*std::max_element(d.begin(), d.end())));
                }
            }
            if (in_aggregate) panel = aggregate_to_targets(panel);
            manifest.emplace_back("aggregated", in_aggregate ? "true" : "false");

            for (const auto& [name, table] : panel.indicators) {
                if (table.missing() != 0) {
                    throw InputError("indicator '" + name + "' has " + std::to_string(table.missing()) +
                                     " missing cells; rerun with --impute");
                }
            }
            fs::create_directories(in_out);
            for (const auto& [name, table] : panel.indicators) {
                const auto file = "panel_" + file_stem_for(name) + ".csv";
                write_panel_csv(fs::path(in_out) / file, indicator_panel(panel, name), panel.entities);
                manifest.emplace_back("panel." + name, file);
            }
            std::map<std::string, std::vector<std::string>> groups;
            for (const auto& e : panel.entities) {
                auto it = panel.entity_group.find(e);
                if (it != panel.entity_group.end()) groups[it->second].push_back(e);
            }
            for (const auto& [label, members] : groups) {
                std::string list;
                for (const auto& m : members) list += (list.empty() ? "" : ",") + m;
                manifest.emplace_back("group." + label, list);
            }
            if (!schema.mode.empty()) {
                const auto sel = schema.mode == "two-sample"
                                     ? to_two_sample_panels(panel, schema.target, schema.group_x, schema.group_y)
                                     : to_independence_panels(panel, schema.target, schema.target_b);
                write_panel_csv(fs::path(in_out) / "x.csv", sel.x, sel.x_entities);
                write_panel_csv(fs::path(in_out) / "y.csv", sel.y, sel.y_entities);
                manifest.emplace_back("select.mode", schema.mode);
                manifest.emplace_back("select.x", "x.csv (" + std::to_string(sel.x.realisations()) + " rows)");
                manifest.emplace_back("select.y", "y.csv (" + std::to_string(sel.y.realisations()) + " rows)");
            }
            write_manifest(fs::path(in_out) / "manifest.txt", manifest);
        }
    } catch (const DegenerateError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDegenerate;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOk;
}
