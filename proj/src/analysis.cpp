#include "scalelaw/analysis.hpp"

#include "scalelaw/error.hpp"
#include "scalelaw/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace scalelaw {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

Crossover find_crossover(const FitResult& fit_a, const FitResult& fit_b, double lo, double hi,
                         const CrossoverOptions& options) {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
        throw InputError(fmt::format("crossover range needs 0 < lo < hi (got [{}, {}])", lo, hi));
    if (fit_a.params.axis != fit_b.params.axis)
        throw InputError("crossover needs both fits on the same axis");
    if (options.scan_points < 2) throw InputError("crossover scan needs at least 2 points");

    auto diff = [&](double log_x) {
        const double x = std::exp(log_x);
        return evaluate(fit_a.params, fit_a.form, x) - evaluate(fit_b.params, fit_b.form, x);
    };

    const double l0 = std::log(lo);
    const double l1 = std::log(hi);
    const int m = options.scan_points;
    Crossover out;
    std::optional<std::pair<double, double>> first_bracket;
    std::optional<std::pair<double, int>> last_signed;  // (log x, sign)
    for (int i = 0; i < m; ++i) {
        const double lx = i == m - 1 ? l1 : l0 + (l1 - l0) * i / (m - 1);
        const int s = sign_of(diff(lx));
        if (s == 0) continue;
        if (last_signed && last_signed->second != s) {
            ++out.sign_changes;
            if (!first_bracket) first_bracket = std::make_pair(last_signed->first, lx);
        }
        last_signed = std::make_pair(lx, s);
    }
    if (!first_bracket) return out;

    auto [a, b] = *first_bracket;
    const int sign_a = sign_of(diff(a));
    double mid = 0.5 * (a + b);
    for (int iter = 0; iter < 400; ++iter) {
        mid = 0.5 * (a + b);
        const double d = diff(mid);
        if (d == 0.0) break;
        const bool narrow = std::expm1(b - a) < options.x_tolerance;
        if (narrow && std::abs(d) < options.value_tolerance) break;
        if (mid <= a || mid >= b) break;  // bracket exhausted at machine precision
        if (sign_of(d) == sign_a)
            a = mid;
        else
            b = mid;
    }
    out.x = std::exp(mid);
    return out;
}

ScalabilityTable scalability_table(const FitResult& fit_a, const FitResult& fit_b,
                                   std::span<const double> probes) {
    if (probes.empty()) throw InputError("scalability table needs at least one probe");
    ScalabilityTable table;
    for (double x : probes) {
        if (!(x > 0.0)) throw InputError("probes must be > 0");
        DerivativeRow row{x, std::abs(derivative(fit_a.params, fit_a.form, x)),
                          std::abs(derivative(fit_b.params, fit_b.form, x))};
        table.average_a += row.slope_a;
        table.average_b += row.slope_b;
        table.rows.push_back(row);
    }
    table.average_a /= static_cast<double>(probes.size());
    table.average_b /= static_cast<double>(probes.size());
    if (table.average_a > table.average_b)
        table.stronger = Verdict::a;
    else if (table.average_b > table.average_a)
        table.stronger = Verdict::b;
    return table;
}

std::vector<PredictionRow> predict_table(const FitResult& fit, std::span<const double> targets,
                                         std::span<const ModelCandidate> candidates, double alpha,
                                         const std::string& label) {
    const bool with_interval =
        fit.covariance && static_cast<double>(fit.n) - static_cast<double>(fit.p) >= 1.0;
    std::vector<PredictionRow> rows;
    for (const auto& c : candidates) {
        if (!(c.gflops_per_sample > 0.0))
            throw InputError(fmt::format("candidate '{}' needs gflops_per_sample > 0", c.model_id));
        for (double target : targets) {
            if (!(target > 0.0)) throw InputError("target compute must be > 0");
            PredictionRow row;
            row.label = label;
            row.target_compute = target;
            row.candidate = c;
            row.implied_samples = target / c.gflops_per_sample;
            row.error = evaluate(fit.params, fit.form, target);
            row.accuracy = 1.0 - row.error;
            if (with_interval) row.interval = predict_ci(fit, target, alpha);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

ComparisonReport compare_fits(const FitResult& fit_a, const std::string& label_a,
                              const FitResult& fit_b, const std::string& label_b,
                              std::span<const double> probes, double lo, double hi,
                              std::span<const double> targets, double alpha,
                              const CrossoverOptions& options) {
    ComparisonReport report;
    report.label_a = label_a;
    report.label_b = label_b;
    report.fit_a = fit_a;
    report.fit_b = fit_b;
    report.range_lo = lo;
    report.range_hi = hi;
    report.crossover = find_crossover(fit_a, fit_b, lo, hi, options);
    report.scalability = scalability_table(fit_a, fit_b, probes);
    for (double x : probes) {
        const double ea = evaluate(fit_a.params, fit_a.form, x);
        const double eb = evaluate(fit_b.params, fit_b.form, x);
        report.winner_by_scale.push_back({x, ea < eb ? label_a : (eb < ea ? label_b : "tie")});
    }
    for (const auto* side : {&fit_a, &fit_b}) {
        const auto& label = side == &fit_a ? label_a : label_b;
        const ModelCandidate none{"", 0.0};
        for (double target : targets) {
            if (!(target > 0.0)) throw InputError("target compute must be > 0");
            PredictionRow row;
            row.label = label;
            row.target_compute = target;
            row.candidate = none;
            row.error = evaluate(side->params, side->form, target);
            row.accuracy = 1.0 - row.error;
            if (side->covariance && side->n > static_cast<std::size_t>(side->p))
                row.interval = predict_ci(*side, target, alpha);
            report.predictions.push_back(std::move(row));
        }
    }
    return report;
}

DoptChain compute_optimal_chain(std::span<const Observation> dopt_points,
                                const FitResult& error_fit_on_samples,
                                std::span<const double> targets, double alpha) {
    if (dopt_points.size() < 2) throw InputError("compute-optimal chain needs at least 2 (C, D_opt) pairs");
    if (error_fit_on_samples.params.axis != Axis::samples)
        throw InputError("compute-optimal chain needs an error fit on the samples axis");

    DoptChain chain;
    chain.dopt_fit = fit_loglog(dopt_points, Axis::compute);
    const auto& lf = chain.dopt_fit;
    const double t = lf.n > 2 ? t_quantile(alpha, static_cast<double>(lf.n) - 2.0) : 0.0;
    const bool with_interval = error_fit_on_samples.covariance &&
                               static_cast<double>(error_fit_on_samples.n) -
                                       static_cast<double>(error_fit_on_samples.p) >= 1.0;

    for (double c : targets) {
        if (!(c > 0.0)) throw InputError("target compute must be > 0");
        DoptRow row;
        row.compute = c;
        row.d_opt = evaluate(lf.params, ScalingForm::loglog, c);
        const Eigen::Vector2d design(1.0, std::log(c));
        const double se = std::sqrt(std::max(design.dot(lf.covariance * design), 0.0));
        const double log_d = std::log(row.d_opt);
        row.d_opt_lo = std::exp(log_d - t * se);
        row.d_opt_hi = std::exp(log_d + t * se);
        row.error = evaluate(error_fit_on_samples.params, error_fit_on_samples.form, row.d_opt);
        if (with_interval) row.error_interval = predict_ci(error_fit_on_samples, row.d_opt, alpha);
        chain.rows.push_back(row);
    }
    return chain;
}

std::vector<Observation> dopt_pairs(std::span<const Observation> compute_points,
                                    std::span<const double> samples, std::size_t n_bins) {
    if (samples.size() != compute_points.size())
        throw InputError("dopt_pairs needs one samples-seen value per compute point");
    std::vector<Observation> out;
    for (const auto& p : log_bin_minima(compute_points, n_bins, Axis::compute))
        out.push_back({p.x, samples[p.source_index]});
    return out;
}

std::vector<FormScore> select_form(std::span<const FrontierPoint> points, double c_threshold,
                                   std::span<const ScalingForm> forms, const FitConfig& config,
                                   double alpha) {
    if (forms.empty()) throw InputError("form selection needs at least one form");
    std::vector<FormScore> table;
    for (ScalingForm form : forms) {
        FormScore score;
        score.form = form;
        score.run = validate_threshold(points, c_threshold, form, config, alpha);
        score.rmse_holdout = score.run.report.rmse_holdout;
        table.push_back(std::move(score));
    }
    std::stable_sort(table.begin(), table.end(),
                     [](const auto& a, const auto& b) { return a.rmse_holdout < b.rmse_holdout; });
    return table;
}

std::vector<FrontierPoint> synth_generate(const ScalingParams& true_params, ScalingForm form,
                                          std::span<const double> design, double noise_sigma,
                                          std::uint64_t seed) {
    if (!(noise_sigma >= 0.0)) throw InputError("noise sigma must be >= 0");
    Rng rng(seed);
    std::vector<FrontierPoint> out;
    out.reserve(design.size());
    for (std::size_t i = 0; i < design.size(); ++i) {
        const double x = design[i];
        if (!(x > 0.0)) throw InputError("design points must be > 0");
        double y = evaluate(true_params, form, x);
        if (noise_sigma > 0.0) y += noise_sigma * rng.normal();
        out.push_back({x, std::clamp(y, 0.0, 1.0), i, true_params.axis});
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo)) throw InputError("log grid needs 0 < lo <= hi");
    if (n == 0) throw InputError("log grid needs at least one point");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double l0 = std::log(lo);
    const double step = (std::log(hi) - l0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(l0 + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace scalelaw
