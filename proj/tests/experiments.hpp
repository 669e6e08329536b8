#pragma once

// Seeded Monte-Carlo experiments shared by the property tests and the
// acceptance runner.

#include "oracles.hpp"

#include "scalelaw/analysis.hpp"
#include "scalelaw/inference.hpp"
#include "scalelaw/powerlaw.hpp"
#include "scalelaw/solver.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace experiments {

using namespace scalelaw;

using testing::clip_params;
using testing::mammut_params;

struct Coverage {
    int covered = 0;
    int trials = 0;
    int failures = 0;  // fits that did not converge
    double rate() const { return trials ? static_cast<double>(covered) / trials : 0.0; }
};

/// Share of seeds whose 95% interval at an interior x contains the
/// noiseless generator value.
inline Coverage interval_coverage(int seeds, double x_probe = 1e11, double sigma = 0.005) {
    const auto truth = clip_params();
    const double target = evaluate(truth, ScalingForm::saturated, x_probe);
    const auto design = log_grid(1e9, 1e13, 40);
    Coverage c;
    for (int s = 0; s < seeds; ++s) {
        const auto pts = synth_generate(truth, ScalingForm::saturated, design, sigma, 1000 + s);
        auto fit = fit_saturated(pts, ScalingForm::saturated);
        if (!fit.converged) {
            ++c.failures;
            continue;
        }
        attach_covariance(fit, pts);
        const auto pi = predict_ci(fit, x_probe, 0.05);
        ++c.trials;
        if (pi.lo <= target && target <= pi.hi) ++c.covered;
    }
    return c;
}

struct Narrowing {
    double mean_width_small = 0.0;  // trained below the lower threshold
    double mean_width_large = 0.0;  // trained below the higher threshold
    int trials = 0;
    int failures = 0;
};

/// Mean interval width on the shared holdout x >= hi_threshold for fits
/// trained on x < lo_threshold and on the superset x < hi_threshold.
inline Narrowing nested_narrowing(int seeds, double lo_threshold = 2.5e11, double hi_threshold = 5e11,
                                  double sigma = 0.005) {
    const auto design = log_grid(1e9, 1e13, 40);
    Narrowing n;
    for (int s = 0; s < seeds; ++s) {
        const auto pts = synth_generate(clip_params(), ScalingForm::saturated, design, sigma, 5000 + s);
        const auto small = threshold_split(pts, lo_threshold);
        const auto large = threshold_split(pts, hi_threshold);
        auto fit_small = fit_saturated(small.train, ScalingForm::saturated);
        auto fit_large = fit_saturated(large.train, ScalingForm::saturated);
        if (!fit_small.converged || !fit_large.converged) {
            ++n.failures;
            continue;
        }
        attach_covariance(fit_small, small.train);
        attach_covariance(fit_large, large.train);
        double ws = 0.0, wl = 0.0;
        for (const auto& p : large.holdout) {
            const auto a = predict_ci(fit_small, p.x), b = predict_ci(fit_large, p.x);
            ws += a.hi - a.lo;
            wl += b.hi - b.lo;
        }
        const auto k = static_cast<double>(large.holdout.size());
        n.mean_width_small += ws / k;
        n.mean_width_large += wl / k;
        ++n.trials;
    }
    if (n.trials) {
        n.mean_width_small /= n.trials;
        n.mean_width_large /= n.trials;
    }
    return n;
}

struct FormWins {
    int saturated_wins = 0;
    int trials = 0;
};

/// Seeds on which the saturated form has strictly lower holdout RMSE than
/// the no-floor form, for data with an irreducible error of `floor`.
inline FormWins saturated_wins(int seeds, double floor = 0.12, double sigma = 0.005) {
    auto truth = clip_params();
    truth.E = floor;
    const auto design = log_grid(1e9, 1e13, 40);
    FormWins w;
    for (int s = 0; s < seeds; ++s) {
        const auto pts = synth_generate(truth, ScalingForm::saturated, design, sigma, 9000 + s);
        const auto sat = validate_threshold(pts, 2.5e11, ScalingForm::saturated);
        const auto simple = validate_threshold(pts, 2.5e11, ScalingForm::simple);
        ++w.trials;
        if (sat.report.rmse_holdout < simple.report.rmse_holdout) ++w.saturated_wins;
    }
    return w;
}

/// Median holdout RMSE of saturated fits on noisy data, one per seed.
inline double median_holdout_rmse(const ScalingParams& truth, int seeds, double sigma = 0.005) {
    const auto design = log_grid(1e9, 1e14, 40);
    std::vector<double> rmse;
    for (int s = 0; s < seeds; ++s) {
        const auto pts = synth_generate(truth, ScalingForm::saturated, design, sigma, 200 + s);
        rmse.push_back(validate_threshold(pts, 1e13, ScalingForm::saturated).report.rmse_holdout);
    }
    std::sort(rmse.begin(), rmse.end());
    const auto m = rmse.size() / 2;
    return rmse.size() % 2 ? rmse[m] : 0.5 * (rmse[m - 1] + rmse[m]);
}

/// Largest absolute gap between a noiseless generator and the curve fitted
/// to it, over the generator points.
inline double noiseless_recovery_gap(const ScalingParams& truth, double lo, double hi, std::size_t n = 40) {
    const auto pts = synth_generate(truth, ScalingForm::saturated, log_grid(lo, hi, n), 0.0, 0);
    const auto fit = fit_saturated(pts, ScalingForm::saturated);
    if (!fit.converged) return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (const auto& p : pts)
        gap = std::max(gap, std::abs(evaluate(fit.params, ScalingForm::saturated, p.x) - p.error));
    return gap;
}

}  // namespace experiments
