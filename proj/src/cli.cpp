#include "scalelaw/cli.hpp"

#include "scalelaw/analysis.hpp"
#include "scalelaw/atomic_file.hpp"
#include "scalelaw/error.hpp"
#include "scalelaw/frontier.hpp"
#include "scalelaw/inference.hpp"
#include "scalelaw/plot.hpp"
#include "scalelaw/records.hpp"
#include "scalelaw/serialize.hpp"
#include "scalelaw/solver.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <filesystem>
#include <ostream>

namespace scalelaw::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Shared option groups
// ---------------------------------------------------------------------------

struct PointSource {
    std::string input;     // measurement records (.csv or .jsonl)
    std::string frontier;  // pre-extracted frontier CSV
    std::string task;
    std::string axis = "compute";
    std::string method = "auto";
    std::size_t n_bins = kDefaultBinCount;
    double max_samples_seen = 3.07e9;
    double unique_samples = 0.0;
    double max_repetition = 3.0;
    bool keep_warmup = false;
};

void add_point_source(CLI::App* cmd, PointSource& src) {
    cmd->add_option("--input", src.input, "Measurement records (.csv or .jsonl)");
    cmd->add_option("--frontier", src.frontier, "Frontier CSV (x,error,source_index,axis) instead of records");
    cmd->add_option("--task", src.task, "Task id whose metric becomes the error rate");
    cmd->add_option("--axis", src.axis, "compute or samples")->check(CLI::IsMember({"compute", "samples"}));
    cmd->add_option("--method", src.method, "Frontier extraction: auto, bin, skyline or none")
        ->check(CLI::IsMember({"auto", "bin", "skyline", "none"}));
    cmd->add_option("--n-bins", src.n_bins, "Log-spaced bins for frontier binning")->check(CLI::PositiveNumber);
    cmd->add_option("--max-samples-seen", src.max_samples_seen, "Drop records trained on more samples");
    cmd->add_option("--unique-samples", src.unique_samples, "Unique dataset size for the repetition filter");
    cmd->add_option("--max-repetition", src.max_repetition, "Largest allowed samples_seen / unique samples");
    cmd->add_flag("--keep-warmup", src.keep_warmup, "Keep const-schedule checkpoints taken inside warmup");
}

struct LoadedPoints {
    std::vector<MeasurementRecord> records;  // empty when read from a frontier file
    std::vector<std::size_t> record_of;      // observation -> record index
    std::vector<Observation> observations;
    std::vector<FrontierPoint> frontier;
    FilterOutcome filter;
    Axis axis = Axis::compute;
};

void require_file(const std::string& path, std::string_view what) {
    if (path.empty()) throw InputError(fmt::format("missing {}", what));
    if (!fs::is_regular_file(path)) throw InputError(fmt::format("{} '{}' does not exist", what, path));
}

std::vector<MeasurementRecord> load_records(const std::string& path) {
    require_file(path, "input");
    const auto format = fs::path(path).extension() == ".jsonl" ? RecordFormat::jsonl : RecordFormat::csv;
    try {
        return parse_records(read_file(path), format);
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", path, e.what()));
    }
}

LoadedPoints load_points(const PointSource& src, std::ostream& err) {
    LoadedPoints out;
    out.axis = parse_axis(src.axis);
    if (!src.frontier.empty() && !src.input.empty())
        throw InputError("give either --input or --frontier, not both");
    if (!src.frontier.empty()) {
        require_file(src.frontier, "frontier");
        out.frontier = frontier_from_csv(read_file(src.frontier));
        if (out.frontier.empty()) throw InputError("frontier file has no points");
        out.axis = out.frontier.front().axis;
        out.observations = to_observations(out.frontier);
        return out;
    }
    if (src.input.empty()) throw InputError("missing --input (or --frontier)");
    if (src.task.empty()) throw InputError("--task is required with --input");
    out.records = load_records(src.input);

    FilterPolicy policy;
    policy.max_samples_seen = src.max_samples_seen;
    policy.max_repetition = src.max_repetition;
    policy.drop_warmup_const = !src.keep_warmup;
    if (src.unique_samples > 0.0) policy.dataset_unique_samples = src.unique_samples;
    out.filter = filter_records(out.records, policy);

    for (std::size_t i : out.filter.kept) {
        const auto& r = out.records[i];
        const auto metric = r.metrics.find(src.task);
        if (metric == r.metrics.end()) continue;
        const auto compute = derive_compute(r);
        if (compute.mismatch)
            fmt::print(err, "warning: {} (samples {:.4g}): supplied compute {:.4g} differs from derived {:.4g}\n",
                       r.model_id, r.samples_seen, compute.gflops, compute.derived);
        const double x = out.axis == Axis::compute ? compute.gflops : r.samples_seen;
        out.observations.push_back({x, to_error(metric->second)});
        out.record_of.push_back(i);
    }
    if (out.observations.empty())
        throw InputError(fmt::format("no records with task '{}' survive filtering", src.task));

    std::string method = src.method;
    if (method == "auto") method = out.axis == Axis::compute ? "bin" : "skyline";
    if (method == "bin") {
        out.frontier = log_bin_minima(out.observations, src.n_bins, out.axis);
    } else if (method == "skyline") {
        out.frontier = skyline_minima(out.observations, out.axis);
    } else {
        for (std::size_t i = 0; i < out.observations.size(); ++i)
            out.frontier.push_back({out.observations[i].x, out.observations[i].error, i, out.axis});
        std::stable_sort(out.frontier.begin(), out.frontier.end(),
                         [](const auto& a, const auto& b) { return a.x < b.x; });
    }
    return out;
}

void write_outputs(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    if (dir.empty()) throw InputError("missing --out directory");
    fs::create_directories(dir);
    for (const auto& [name, content] : files) write_file_atomic(fs::path(dir) / name, content);
}

FitResult load_fit(const std::string& path) {
    require_file(path, "fit");
    try {
        return fit_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: invalid JSON: {}", path, e.what()));
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", path, e.what()));
    }
}

std::pair<double, double> parse_range(const std::string& text, std::string_view what) {
    const auto v = parse_real_list(text);
    if (v.size() != 2 || !(v[0] < v[1]))
        throw InputError(fmt::format("{} must be 'lo,hi' with lo < hi", what));
    return {v[0], v[1]};
}

std::pair<std::string, std::string> split_label(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) return {fs::path(spec).stem().string(), spec};
    return {spec.substr(0, eq), spec.substr(eq + 1)};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string params;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_points = 40;
    double x_min = 1e9;
    double x_max = 1e13;
    int dominated = 2;
    std::string task = "synthetic";
    std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    require_file(a.params, "params");
    const auto [params, form] = params_from_json(json::parse(read_file(a.params)));
    if (form == ScalingForm::loglog) throw InputError("synth generates error curves; loglog params are not allowed");
    if (a.n_points < 1) throw InputError("--n-points must be >= 1");
    if (a.dominated < 0) throw InputError("--dominated must be >= 0");
    const auto design = log_grid(a.x_min, a.x_max, a.n_points);
    const auto points = synth_generate(params, form, design, a.sigma, a.seed);

    std::vector<MeasurementRecord> records;
    for (const auto& p : points) {
        for (int j = 0; j <= a.dominated; ++j) {
            MeasurementRecord r;
            r.model_id = j == 0 ? fmt::format("synth-{}", p.source_index)
                                : fmt::format("synth-{}-r{}", p.source_index, j);
            r.family = "synthetic";
            r.dataset_id = "synthetic";
            if (params.axis == Axis::compute) {
                r.samples_seen = 1e6;
                r.gflops_per_sample = p.x / r.samples_seen;
            } else {
                r.samples_seen = p.x;
                r.gflops_per_sample = 1.0;
            }
            r.metrics[a.task] = {MetricKind::error_rate, std::min(1.0, p.error + 0.02 * j)};
            records.push_back(std::move(r));
        }
    }
    write_outputs(a.out, {{"records.csv", serialize_records_csv(records)},
                          {"truth.json", params_to_json(params, form).dump(2) + "\n"}});
    fmt::print(out, "wrote {} records ({} design points) to {}\n", records.size(), points.size(), a.out);
    return kExitOk;
}

struct ParetoArgs {
    PointSource src;
    std::string out;
};

int cmd_pareto(const ParetoArgs& a, std::ostream& out, std::ostream& err) {
    const auto loaded = load_points(a.src, err);
    std::string report = "index,model_id,samples_seen,reason\n";
    for (const auto& d : loaded.filter.dropped) {
        const auto& r = loaded.records[d.index];
        report += fmt::format("{},{},{},{}\n", d.index, r.model_id, format_exact(r.samples_seen), to_string(d.reason));
    }
    write_outputs(a.out, {{"frontier.csv", frontier_to_csv(loaded.frontier)}, {"filter_report.csv", report}});
    fmt::print(out, "{} observations, {} dropped by filters, {} frontier points\n", loaded.observations.size(),
               loaded.filter.dropped.size(), loaded.frontier.size());
    return kExitOk;
}

struct FitArgs {
    PointSource src;
    std::string form = "saturated";
    double threshold = 0.0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int random_starts = 0;
    int max_iterations = 500;
    std::string out;
};

FitConfig make_config(std::uint64_t seed, int random_starts, int max_iterations) {
    FitConfig config;
    config.seed = seed;
    config.random_starts = random_starts;
    config.max_iterations = max_iterations;
    return config;
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    const auto loaded = load_points(a.src, err);
    const ScalingForm form = parse_form(a.form);
    if (form == ScalingForm::loglog) throw InputError("use the dopt subcommand for loglog fits");
    std::vector<FrontierPoint> train = loaded.frontier;
    if (a.threshold > 0.0) train = threshold_split(loaded.frontier, a.threshold).train;

    FitResult fit = fit_saturated(train, form, make_config(a.seed, a.random_starts, a.max_iterations));
    if (!fit.converged) {
        fmt::print(err, "error: fit did not converge (best rss {:.6g} from start {})\n", fit.rss, fit.start_index);
        return kExitNumericalFailure;
    }
    if (fit.n > static_cast<std::size_t>(fit.p)) attach_covariance(fit, train);
    if (fit.rank_deficient)
        fmt::print(err, "warning: Jacobian rank {} < {}; covariance uses a pseudo-inverse\n", fit.covariance_rank, fit.p);

    double lo = train.front().x, hi = train.front().x;
    for (const auto& p : train) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
    }
    const auto grid = log_grid(lo, hi, 200);
    write_outputs(a.out, {{"fit.json", fit_to_json(fit).dump(2) + "\n"},
                          {"curve.csv", emit_curve_csv(fit, grid, a.alpha)}});
    const auto& p = fit.params;
    fmt::print(out, "{} fit on {} points: A={:.6g} B={:.6g} alpha={:.6g}{} rss={:.6g}\n", to_string(form), fit.n, p.A,
               p.B, p.alpha, form == ScalingForm::saturated ? fmt::format(" E={:.6g}", p.E) : "", fit.rss);
    return kExitOk;
}

struct ValidateArgs {
    PointSource src;
    double threshold = 0.0;
    std::string forms = "saturated,simple";
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    const auto loaded = load_points(a.src, err);
    if (!(a.threshold > 0.0)) throw InputError("--threshold must be > 0");
    std::vector<ScalingForm> forms;
    std::size_t start = 0;
    while (start <= a.forms.size()) {
        const auto comma = a.forms.find(',', start);
        forms.push_back(parse_form(a.forms.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    FitConfig config;
    config.seed = a.seed;
    const auto table = select_form(loaded.frontier, a.threshold, forms, config, a.alpha);

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("validation.json", json{{"c_threshold", a.threshold},
                                               {"ranking", form_table_to_json(table)}}
                                                  .dump(2) + "\n");
    files.emplace_back("validation.csv", validation_to_csv(table.front().run.report));
    for (const auto& row : table)
        files.emplace_back(fmt::format("fit_{}.json", to_string(row.form)), fit_to_json(row.run.fit).dump(2) + "\n");
    write_outputs(a.out, files);

    fmt::print(out, "threshold {}: {} train / {} holdout points\n", format_human(a.threshold),
               table.front().run.report.train_count, table.front().run.report.holdout_count);
    for (std::size_t i = 0; i < table.size(); ++i)
        fmt::print(out, "  {}. {:<10} holdout RMSE {:.4g}\n", i + 1, to_string(table[i].form), table[i].rmse_holdout);
    return kExitOk;
}

struct CompareArgs {
    std::string fit_a;
    std::string fit_b;
    std::string label_a = "a";
    std::string label_b = "b";
    std::string probes = "5e10,1e11,5e11";
    std::string range = "1e9,1e13";
    std::string targets;
    double alpha = 0.05;
    std::string out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    const FitResult fa = load_fit(a.fit_a);
    const FitResult fb = load_fit(a.fit_b);
    const auto probes = parse_real_list(a.probes);
    const auto [lo, hi] = parse_range(a.range, "--range");
    const auto targets = a.targets.empty() ? std::vector<double>{} : parse_real_list(a.targets);
    const auto report = compare_fits(fa, a.label_a, fb, a.label_b, probes, lo, hi, targets, a.alpha);
    const std::string text = comparison_to_text(report);
    write_outputs(a.out, {{"compare.json", comparison_to_json(report).dump(2) + "\n"}, {"compare.txt", text}});
    out << text;
    return kExitOk;
}

struct PredictArgs {
    std::string fit;
    std::string targets;
    std::string candidates;
    std::string label;
    double alpha = 0.05;
    std::string out;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
    const FitResult fit = load_fit(a.fit);
    if (a.targets.empty()) throw InputError("missing --targets");
    const auto targets = parse_real_list(a.targets);
    std::vector<ModelCandidate> candidates;
    if (!a.candidates.empty()) {
        require_file(a.candidates, "candidates");
        candidates = candidates_from_csv(read_file(a.candidates));
    }
    const std::string label = a.label.empty() ? fs::path(a.fit).stem().string() : a.label;
    std::vector<PredictionRow> rows;
    if (candidates.empty()) {
        // Without candidates the rows carry no model and no implied samples.
        const std::vector<ModelCandidate> placeholder{{"", 1.0}};
        rows = predict_table(fit, targets, placeholder, a.alpha, label);
        for (auto& r : rows) {
            r.candidate = {};
            r.implied_samples = 0.0;
        }
    } else {
        rows = predict_table(fit, targets, candidates, a.alpha, label);
    }
    const std::string text = predictions_to_text(rows);
    write_outputs(a.out, {{"predictions.csv", predictions_to_csv(rows)},
                          {"predictions.json", predictions_to_json(rows).dump(2) + "\n"},
                          {"predictions.txt", text}});
    out << text;
    return kExitOk;
}

struct DoptArgs {
    std::string pairs;
    PointSource src;
    std::string fit;
    std::string targets;
    double alpha = 0.05;
    std::string out;
};

int cmd_dopt(const DoptArgs& a, std::ostream& out, std::ostream& err) {
    const FitResult fit = load_fit(a.fit);
    if (a.targets.empty()) throw InputError("missing --targets");
    const auto targets = parse_real_list(a.targets);
    std::vector<Observation> pairs;
    if (!a.pairs.empty()) {
        require_file(a.pairs, "pairs");
        pairs = pairs_from_csv(read_file(a.pairs));
    } else {
        PointSource src = a.src;
        src.axis = "compute";
        src.method = "none";
        const auto loaded = load_points(src, err);
        std::vector<double> samples;
        for (std::size_t idx : loaded.record_of) samples.push_back(loaded.records[idx].samples_seen);
        pairs = dopt_pairs(loaded.observations, samples, a.src.n_bins);
    }
    const auto chain = compute_optimal_chain(pairs, fit, targets, a.alpha);
    const std::string text = dopt_to_text(chain);
    write_outputs(a.out, {{"dopt.csv", dopt_to_csv(chain)},
                          {"dopt.json", dopt_to_json(chain).dump(2) + "\n"},
                          {"dopt.txt", text}});
    out << text;
    return kExitOk;
}

struct PlotArgs {
    std::vector<std::string> fits;
    std::vector<std::string> points;
    std::string x_range;
    std::string y_range;
    bool linear_x = false;
    bool no_band = false;
    int samples = 200;
    double alpha = 0.05;
    std::string title;
    std::string x_label = "GFLOPs";
    std::string name = "plot.svg";
    std::string out;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
    std::vector<LabeledFit> fits;
    for (const auto& spec : a.fits) {
        auto [label, path] = split_label(spec);
        fits.push_back({label, load_fit(path)});
    }
    std::vector<LabeledPoints> sets;
    for (const auto& spec : a.points) {
        auto [label, path] = split_label(spec);
        require_file(path, "points");
        sets.push_back({label, frontier_from_csv(read_file(path))});
    }
    PlotOptions options;
    if (!a.x_range.empty()) options.x_range = parse_range(a.x_range, "--x-range");
    if (!a.y_range.empty()) options.y_range = parse_range(a.y_range, "--y-range");
    options.log_x = !a.linear_x;
    options.band = !a.no_band;
    options.samples = a.samples;
    options.alpha = a.alpha;
    options.title = a.title;
    options.x_label = a.x_label;
    const std::string svg = emit_plot(fits, sets, options);
    write_outputs(a.out, {{a.name, svg}});
    fmt::print(out, "wrote {}\n", (fs::path(a.out) / a.name).string());
    return kExitOk;
}

// Tokens for a JSON config object; flags given later on the command line
// win because single-valued options keep their last value.
std::vector<std::string> config_tokens(const std::string& path) {
    require_file(path, "config");
    json cfg;
    try {
        cfg = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw InputError(fmt::format("{}: invalid JSON: {}", path, e.what()));
    }
    if (!cfg.is_object()) throw InputError(fmt::format("{}: config must be a JSON object", path));
    std::vector<std::string> tokens;
    auto scalar = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) return format_exact(v.get<double>());
        throw InputError("config values must be strings, numbers, booleans or arrays of those");
    };
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config") continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) {
                tokens.push_back(flag);
                tokens.push_back(scalar(v));
            }
        } else {
            tokens.push_back(flag);
            tokens.push_back(scalar(value));
        }
    }
    return tokens;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    if (args.size() < 2) return args;
    std::string path;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::vector<std::string> expanded(args.begin(), args.begin() + 2);
    const auto tokens = config_tokens(path);
    expanded.insert(expanded.end(), tokens.begin(), tokens.end());
    expanded.insert(expanded.end(), args.begin() + 2, args.end());
    return expanded;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Derive, validate and compare scaling laws from pre-training measurements", "scalelaw"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::string config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON file of option values; command-line flags override it");
    };

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate synthetic measurements from known parameters");
    add_common(c_synth);
    c_synth->add_option("--params", synth.params, "Parameter JSON (form, axis, A, B, alpha, E)")->required();
    c_synth->add_option("--sigma", synth.sigma, "Gaussian noise on the error rate")->check(CLI::NonNegativeNumber);
    c_synth->add_option("--seed", synth.seed, "Random seed")->envname("SCALELAW_SEED");
    c_synth->add_option("--n-points", synth.n_points, "Design points");
    c_synth->add_option("--x-min", synth.x_min, "Smallest design x")->check(CLI::PositiveNumber);
    c_synth->add_option("--x-max", synth.x_max, "Largest design x")->check(CLI::PositiveNumber);
    c_synth->add_option("--dominated", synth.dominated, "Extra higher-error records per design point");
    c_synth->add_option("--task", synth.task, "Task id written to the records");
    c_synth->add_option("--out", synth.out, "Output directory")->required();

    ParetoArgs pareto;
    auto* c_pareto = app.add_subcommand("pareto", "Filter records and extract the minimal-error frontier");
    add_common(c_pareto);
    add_point_source(c_pareto, pareto.src);
    c_pareto->add_option("--out", pareto.out, "Output directory")->required();

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Fit a scaling law to the frontier");
    add_common(c_fit);
    add_point_source(c_fit, fit.src);
    c_fit->add_option("--form", fit.form, "saturated or simple")->check(CLI::IsMember({"saturated", "simple"}));
    c_fit->add_option("--threshold", fit.threshold, "Fit only points with x below this value");
    c_fit->add_option("--alpha", fit.alpha, "Significance level for curve intervals")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    c_fit->add_option("--seed", fit.seed, "Seed for jittered starts")->envname("SCALELAW_SEED");
    c_fit->add_option("--random-starts", fit.random_starts, "Jittered starts added to the default grid");
    c_fit->add_option("--max-iterations", fit.max_iterations, "Iteration cap per start");
    c_fit->add_option("--out", fit.out, "Output directory")->required();

    ValidateArgs validate;
    auto* c_validate = app.add_subcommand("validate", "Fit below a compute threshold and score held-out points");
    add_common(c_validate);
    add_point_source(c_validate, validate.src);
    c_validate->add_option("--threshold", validate.threshold, "Fit on x < threshold, score x >= threshold")->required();
    c_validate->add_option("--forms", validate.forms, "Comma-separated forms to rank");
    c_validate->add_option("--alpha", validate.alpha, "Significance level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    c_validate->add_option("--seed", validate.seed, "Seed for jittered starts")->envname("SCALELAW_SEED");
    c_validate->add_option("--out", validate.out, "Output directory")->required();

    CompareArgs compare;
    auto* c_compare = app.add_subcommand("compare", "Crossover, derivative table and predictions for two fits");
    add_common(c_compare);
    c_compare->add_option("--fit-a", compare.fit_a, "First fit JSON")->required();
    c_compare->add_option("--fit-b", compare.fit_b, "Second fit JSON")->required();
    c_compare->add_option("--label-a", compare.label_a, "Label of the first fit");
    c_compare->add_option("--label-b", compare.label_b, "Label of the second fit");
    c_compare->add_option("--probes", compare.probes, "Comma-separated x values for derivatives");
    c_compare->add_option("--range", compare.range, "Crossover search range 'lo,hi'");
    c_compare->add_option("--targets", compare.targets, "Comma-separated x values to predict");
    c_compare->add_option("--alpha", compare.alpha, "Significance level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    c_compare->add_option("--out", compare.out, "Output directory")->required();

    PredictArgs predict;
    auto* c_predict = app.add_subcommand("predict", "Predict error and accuracy at target compute budgets");
    add_common(c_predict);
    c_predict->add_option("--fit", predict.fit, "Fit JSON")->required();
    c_predict->add_option("--targets", predict.targets, "Comma-separated target GFLOPs")->required();
    c_predict->add_option("--candidates", predict.candidates, "CSV model_id,gflops_per_sample");
    c_predict->add_option("--label", predict.label, "Label for the rows");
    c_predict->add_option("--alpha", predict.alpha, "Significance level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    c_predict->add_option("--out", predict.out, "Output directory")->required();

    DoptArgs dopt;
    auto* c_dopt = app.add_subcommand("dopt", "Compute-optimal samples seen and the error reached there");
    add_common(c_dopt);
    c_dopt->add_option("--pairs", dopt.pairs, "CSV of (compute, d_opt) pairs");
    c_dopt->add_option("--input", dopt.src.input, "Records to extract (compute, d_opt) pairs from");
    c_dopt->add_option("--task", dopt.src.task, "Task id used with --input");
    c_dopt->add_option("--n-bins", dopt.src.n_bins, "Compute bins for pair extraction")->check(CLI::PositiveNumber);
    c_dopt->add_option("--max-samples-seen", dopt.src.max_samples_seen, "Drop records trained on more samples");
    c_dopt->add_option("--fit", dopt.fit, "Samples-axis error fit JSON")->required();
    c_dopt->add_option("--targets", dopt.targets, "Comma-separated target GFLOPs")->required();
    c_dopt->add_option("--alpha", dopt.alpha, "Significance level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    c_dopt->add_option("--out", dopt.out, "Output directory")->required();

    PlotArgs plot;
    auto* c_plot = app.add_subcommand("plot", "Render fits and frontier points as SVG");
    add_common(c_plot);
    c_plot->add_option("--fit", plot.fits, "label=fit.json (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    c_plot->add_option("--points", plot.points, "label=frontier.csv (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    c_plot->add_option("--x-range", plot.x_range, "x axis range 'lo,hi'");
    c_plot->add_option("--y-range", plot.y_range, "y axis range 'lo,hi'");
    c_plot->add_flag("--linear-x", plot.linear_x, "Linear instead of log10 x axis");
    c_plot->add_flag("--no-band", plot.no_band, "Omit confidence bands");
    c_plot->add_option("--samples", plot.samples, "Samples per curve")->check(CLI::Range(2, 100000));
    c_plot->add_option("--alpha", plot.alpha, "Significance level for bands")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    c_plot->add_option("--title", plot.title, "Plot title");
    c_plot->add_option("--x-label", plot.x_label, "x axis label");
    c_plot->add_option("--name", plot.name, "Output file name");
    c_plot->add_option("--out", plot.out, "Output directory")->required();

    try {
        const auto args = expand_config(raw_args);
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
            return kExitOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            fmt::print(err, "error: {}\n", e.what());
            return kExitUserError;
        }

        if (c_synth->parsed()) return cmd_synth(synth, out);
        if (c_pareto->parsed()) return cmd_pareto(pareto, out, err);
        if (c_fit->parsed()) return cmd_fit(fit, out, err);
        if (c_validate->parsed()) return cmd_validate(validate, out, err);
        if (c_compare->parsed()) return cmd_compare(compare, out);
        if (c_predict->parsed()) return cmd_predict(predict, out);
        if (c_dopt->parsed()) return cmd_dopt(dopt, out, err);
        if (c_plot->parsed()) return cmd_plot(plot, out);
        return kExitUserError;
    } catch (const InputError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUserError;
    } catch (const json::exception& e) {
        fmt::print(err, "error: invalid JSON: {}\n", e.what());
        return kExitUserError;
    } catch (const fs::filesystem_error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUserError;
    } catch (const NumericalError& e) {
        fmt::print(err, "numerical failure: {}\n", e.what());
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        fmt::print(err, "internal error: {}\n", e.what());
        return kExitNumericalFailure;
    }
}

}  // namespace scalelaw::cli
