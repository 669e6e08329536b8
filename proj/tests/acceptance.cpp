// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include "experiments.hpp"
#include "oracles.hpp"

#include "scalelaw/analysis.hpp"
#include "scalelaw/atomic_file.hpp"
#include "scalelaw/cli.hpp"
#include "scalelaw/frontier.hpp"
#include "scalelaw/serialize.hpp"
#include "scalelaw/tdist.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

using namespace scalelaw;
using testing::as_fit;
using testing::clip_params;
using testing::mammut_params;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double round_sig(double v, int digits) {
    const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(v))));
    return std::round(v * scale) / scale;
}

Outcome prediction_reproduction() {
    Outcome o;
    const auto start = Clock::now();
    struct Case {
        const char* label;
        ScalingParams params;
        double x;
        double published;
    };
    const Case cases[] = {{"CLIP", clip_params(), 2.14e12, 0.796},
                          {"CLIP", clip_params(), 2.59e12, 0.800},
                          {"MaMMUT", mammut_params(), 2.14e12, 0.816},
                          {"MaMMUT", mammut_params(), 2.59e12, 0.820}};
    std::string values;
    for (const auto& c : cases) {
        const std::vector<double> target{c.x};
        const std::vector<ModelCandidate> any{{"any", 1.0}};
        const double acc = predict_table(as_fit(c.params), target, any).front().accuracy;
        values += fmt::format("{}@{:.2e}={:.4f} ", c.label, c.x, acc);
        o.require(std::abs(acc - c.published) <= 0.005,
                  fmt::format("{} @ {:.2e}: {:.4f} vs {:.3f}", c.label, c.x, acc, c.published));
    }
    const double t = seconds_since(start);
    o.require(t < 1.0, fmt::format("runtime {:.3f}s", t));
    if (o.pass) o.detail = values + fmt::format("({:.3f}s)", t);
    return o;
}

Outcome derivative_reproduction() {
    Outcome o;
    const auto start = Clock::now();
    const std::vector<double> probes{5e10, 1e11, 5e11};
    const double clip_pub[] = {9.85e-13, 4.21e-13, 5.86e-14};
    const double mammut_pub[] = {1.17e-12, 4.92e-13, 6.54e-14};
    const auto table = scalability_table(as_fit(clip_params()), as_fit(mammut_params()), probes);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto& r = table.rows[i];
        const double tol_clip = i == 0 ? 0.02 : 0.10;
        const double dc = testing::rel_diff(r.slope_a, clip_pub[i]);
        const double dm = testing::rel_diff(r.slope_b, mammut_pub[i]);
        o.require(dc <= tol_clip, fmt::format("CLIP @ {:.0e}: {:.3e} vs {:.2e}", probes[i], r.slope_a, clip_pub[i]));
        o.require(dm <= 0.10, fmt::format("MaMMUT @ {:.0e}: {:.3e} vs {:.2e}", probes[i], r.slope_b, mammut_pub[i]));
        o.require(r.slope_b > r.slope_a, fmt::format("ordering at {:.0e}", probes[i]));
    }
    o.require(table.average_b > table.average_a, "ordering of averages");
    o.require(table.stronger == Verdict::b, "stronger scalability verdict");
    const double t = seconds_since(start);
    o.require(t < 1.0, fmt::format("runtime {:.3f}s", t));
    if (o.pass)
        o.detail = fmt::format("averages CLIP {:.3e} < MaMMUT {:.3e} ({:.3f}s)", table.average_a, table.average_b, t);
    return o;
}

// L_a - L_b in long double, bisected in log x without the library.
double independent_crossover(double lo, double hi) {
    auto diff = [](long double x) {
        return 57.862L * std::pow(x + 18.391L, -0.227L) + 0.111L - 79.970L * std::pow(x + 19.111L, -0.233L) - 0.076L;
    };
    long double a = std::log(lo), b = std::log(hi);
    const bool sa = diff(std::exp(a)) > 0;
    for (int i = 0; i < 200; ++i) {
        const long double m = (a + b) / 2;
        if ((diff(std::exp(m)) > 0) == sa) a = m;
        else b = m;
    }
    return static_cast<double>(std::exp((a + b) / 2));
}

Outcome crossover_consistency() {
    Outcome o;
    const auto a = as_fit(clip_params()), b = as_fit(mammut_params());
    CrossoverOptions coarse, fine;
    coarse.x_tolerance = 1e-6;
    fine.x_tolerance = 1e-9;
    const auto rc = find_crossover(a, b, 1e9, 1e13, coarse);
    const auto rf = find_crossover(a, b, 1e9, 1e13, fine);
    if (!rc.x || !rf.x) {
        o.require(false, "no crossover found");
        return o;
    }
    o.require(*rc.x > 1e10 && *rc.x < 1e11, fmt::format("root {:.4e} outside (1e10, 1e11)", *rc.x));
    o.require(round_sig(*rc.x, 3) == round_sig(*rf.x, 3),
              fmt::format("unstable: {:.6e} vs {:.6e}", *rc.x, *rf.x));
    const double oracle = independent_crossover(1e10, 1e11);
    o.require(round_sig(*rf.x, 3) == round_sig(oracle, 3),
              fmt::format("{:.6e} disagrees with independent root {:.6e}", *rf.x, oracle));
    o.require(!rc.multiple(), "multiple crossings");
    if (o.pass)
        o.detail = fmt::format("root {:.4e} (tol 1e-6) / {:.4e} (tol 1e-9), independent {:.4e}", *rc.x, *rf.x, oracle);
    return o;
}

Outcome implied_samples() {
    Outcome o;
    const std::vector<double> targets{2.14e12, 2.59e12};
    const std::vector<ModelCandidate> mammut{{"mammut-ViT-L-14", 202.56}};
    const std::vector<ModelCandidate> clip{{"ViT-L-14", 168.61}};
    const auto rm = predict_table(as_fit(mammut_params()), targets, mammut);
    const auto rc = predict_table(as_fit(clip_params()), targets, clip);
    const double mammut_pub[] = {10.6e9, 12.8e9};
    const double clip_pub[] = {12.8e9, 15.5e9};
    std::string values;
    for (std::size_t i = 0; i < 2; ++i) {
        const double dm = testing::rel_diff(rm[i].implied_samples, mammut_pub[i]);
        const double dc = testing::rel_diff(rc[i].implied_samples, clip_pub[i]);
        values += fmt::format("MaMMUT {:.4g} ({:.2f}%), CLIP {:.4g} ({:.2f}%); ", rm[i].implied_samples, 100 * dm,
                              rc[i].implied_samples, 100 * dc);
        o.require(dm <= 0.005, fmt::format("MaMMUT {:.4g} vs {:.3g}", rm[i].implied_samples, mammut_pub[i]));
        o.require(dc <= 0.015, fmt::format("CLIP {:.4g} vs {:.3g}", rc[i].implied_samples, clip_pub[i]));
    }
    if (o.pass) o.detail = values;
    return o;
}

Outcome fit_recovery() {
    Outcome o;
    const auto start = Clock::now();
    std::string values;
    for (const auto& [label, params] : {std::pair{"CLIP", clip_params()}, std::pair{"MaMMUT", mammut_params()}}) {
        const double gap = experiments::noiseless_recovery_gap(params, 1e9, 1e14);
        const double rmse = experiments::median_holdout_rmse(params, 50);
        values += fmt::format("{}: max gap {:.2e}, median holdout rmse {:.4f}; ", label, gap, rmse);
        o.require(gap < 1e-5, fmt::format("{} noiseless gap {:.3e}", label, gap));
        o.require(rmse < 0.01, fmt::format("{} median rmse {:.4f}", label, rmse));
    }
    const double t = seconds_since(start);
    o.require(t < 30.0, fmt::format("runtime {:.1f}s", t));
    if (o.pass) o.detail = values + fmt::format("({:.2f}s)", t);
    return o;
}

Outcome form_selection() {
    Outcome o;
    const auto w = experiments::saturated_wins(50);
    o.require(w.saturated_wins >= 45, fmt::format("saturated won {} of {}", w.saturated_wins, w.trials));
    if (o.pass) o.detail = fmt::format("saturated form lower holdout rmse on {} of {} seeds", w.saturated_wins, w.trials);
    return o;
}

Outcome ci_machinery() {
    Outcome o;
    const double cauchy = t_quantile(0.05, 1);
    const double normal = t_quantile(0.05, 1e6);
    o.require(std::abs(cauchy - 12.7062) < 1e-4, fmt::format("df=1: {:.6f}", cauchy));
    o.require(std::abs(normal - 1.959964) < 1e-4, fmt::format("df=1e6: {:.6f}", normal));
    double worst = 0.0;
    for (double df : {2.0, 5.0, 10.0, 30.0, 100.0}) {
        const double gap = std::abs(t_quantile(0.05, df) - testing::oracle_quantile(0.05, df));
        worst = std::max(worst, gap);
        o.require(gap < 1e-4, fmt::format("df={}: gap {:.2e}", df, gap));
    }
    const auto c = experiments::interval_coverage(200);
    o.require(c.failures == 0, fmt::format("{} fits failed", c.failures));
    o.require(c.rate() >= 0.90 && c.rate() <= 0.99, fmt::format("coverage {:.3f}", c.rate()));
    if (o.pass)
        o.detail = fmt::format("t(0.05,1)={:.4f}, t(0.05,1e6)={:.6f}, max integration gap {:.1e}, coverage {}/{}",
                               cauchy, normal, worst, c.covered, c.trials);
    return o;
}

Outcome frontier_correctness() {
    Outcome o;
    std::mt19937_64 gen(2024);
    const std::size_t bin_counts[] = {1, 7, 64, 1500};
    int bin_bad = 0, sky_bad = 0, idem_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto pts = testing::random_observations(gen, 1 + gen() % 500);
        const std::size_t bins = bin_counts[trial % 4];
        if (log_bin_minima(pts, bins) != testing::brute_bin_minima(pts, bins)) ++bin_bad;
        const auto sky = skyline_minima(pts);
        if (sky != testing::brute_skyline(pts)) ++sky_bad;
        const auto again = skyline_minima(to_observations(sky));
        bool same = again.size() == sky.size();
        for (std::size_t i = 0; same && i < sky.size(); ++i)
            same = again[i].x == sky[i].x && again[i].error == sky[i].error;
        if (!same) ++idem_bad;
    }
    o.require(bin_bad == 0, fmt::format("{} binning mismatches", bin_bad));
    o.require(sky_bad == 0, fmt::format("{} skyline mismatches", sky_bad));
    o.require(idem_bad == 0, fmt::format("{} idempotence failures", idem_bad));
    if (o.pass) o.detail = "1000 random instances match both oracles; skyline idempotent";
    return o;
}

Outcome interval_narrowing() {
    Outcome o;
    const auto n = experiments::nested_narrowing(100);
    o.require(n.failures == 0, fmt::format("{} fits failed", n.failures));
    o.require(n.mean_width_large <= n.mean_width_small,
              fmt::format("width {:.4f} (x < 5e11) vs {:.4f} (x < 2.5e11)", n.mean_width_large, n.mean_width_small));
    if (o.pass)
        o.detail = fmt::format("mean holdout width {:.4f} -> {:.4f} over {} seeds", n.mean_width_small,
                               n.mean_width_large, n.trials);
    return o;
}

bool run_cli(const std::vector<std::string>& args, std::string& log) {
    std::vector<std::string> full{"scalelaw"};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = cli::run(full, out, err);
    if (code != 0) log += fmt::format("`{}` exited {}: {}", args.front(), code, err.str());
    return code == 0;
}

Outcome pipeline_determinism() {
    Outcome o;
    const char* artifacts[] = {"data/records.csv", "data/truth.json",   "frontier/frontier.csv",
                               "frontier/filter_report.csv", "fit/fit.json", "fit/curve.csv",
                               "validate/validation.json", "validate/validation.csv", "compare/compare.json",
                               "compare/compare.txt", "plot/plot.svg"};
    testing::TempDir dirs[] = {testing::TempDir("accept"), testing::TempDir("accept")};
    const fs::path params = dirs[0] / "truth.json";
    write_file_atomic(params, params_to_json(mammut_params(), ScalingForm::saturated).dump(2) + "\n");
    const fs::path reference = dirs[0] / "clip.json";
    write_file_atomic(reference, params_to_json(clip_params(), ScalingForm::saturated).dump(2) + "\n");
    double slowest = 0.0;
    for (auto& dir : dirs) {
        const auto root = dir.path();
        auto p = [&](const char* rel) { return (root / rel).string(); };
        const auto start = Clock::now();
        std::string log;
        const bool ok =
            run_cli({"synth", "--params", params.string(), "--sigma", "0.004", "--seed", "7", "--out", p("data")},
                    log) &&
            run_cli({"pareto", "--input", p("data/records.csv"), "--task", "synthetic", "--out", p("frontier")},
                    log) &&
            run_cli({"fit", "--frontier", p("frontier/frontier.csv"), "--seed", "7", "--random-starts", "4", "--out",
                     p("fit")},
                    log) &&
            run_cli({"validate", "--frontier", p("frontier/frontier.csv"), "--threshold", "2.5e11", "--seed", "7",
                     "--out", p("validate")},
                    log) &&
            run_cli({"compare", "--fit-a", reference.string(), "--fit-b", p("fit/fit.json"), "--label-a", "CLIP",
                     "--label-b", "fitted", "--targets", "2.14e12,2.59e12", "--out", p("compare")},
                    log) &&
            run_cli({"plot", "--fit", "CLIP=" + reference.string(), "--fit", "fitted=" + p("fit/fit.json"),
                     "--points", "frontier=" + p("frontier/frontier.csv"), "--out", p("plot")},
                    log);
        slowest = std::max(slowest, seconds_since(start));
        o.require(ok, log);
        if (!ok) return o;
    }
    int differing = 0;
    for (const auto* rel : artifacts) {
        if (read_file(dirs[0] / rel) != read_file(dirs[1] / rel)) {
            ++differing;
            o.require(false, fmt::format("{} differs", rel));
        }
    }
    o.require(slowest < 10.0, fmt::format("pipeline took {:.2f}s", slowest));
    if (o.pass)
        o.detail = fmt::format("{} artifacts byte-identical across two runs, slowest run {:.2f}s",
                               std::size(artifacts), slowest);
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"prediction reproduction", prediction_reproduction},
        {"derivative reproduction", derivative_reproduction},
        {"crossover consistency", crossover_consistency},
        {"implied samples", implied_samples},
        {"fit recovery", fit_recovery},
        {"form selection", form_selection},
        {"CI machinery", ci_machinery},
        {"frontier correctness", frontier_correctness},
        {"interval narrowing", interval_narrowing},
        {"end-to-end determinism", pipeline_determinism},
    };
    int failed = 0;
    int index = 1;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = fmt::format("threw: {}", e.what());
        }
        if (!o.pass) ++failed;
        std::cout << fmt::format("{} criterion {}: {} ({})", o.pass ? "PASS" : "FAIL", index++, name, o.detail)
                  << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed", std::size(criteria) - failed, std::size(criteria))
              << std::endl;
    return failed == 0 ? 0 : 1;
}
