#pragma once

#include "scalelaw/inference.hpp"
#include "scalelaw/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scalelaw {

// --- crossover -------------------------------------------------------------

struct CrossoverOptions {
    double x_tolerance = 1e-6;     // relative bracket width at termination
    double value_tolerance = 1e-9; // |L_a - L_b| at the returned point
    int scan_points = 1024;        // log-spaced samples used to locate sign changes
};

struct Crossover {
    std::optional<double> x;  // smallest crossing in the range
    int sign_changes = 0;
    bool multiple() const { return sign_changes > 1; }
};

/// Root of L_a - L_b on [lo, hi] by bisection in log x.
Crossover find_crossover(const FitResult& fit_a, const FitResult& fit_b, double lo, double hi,
                         const CrossoverOptions& options = {});

// --- scalability -----------------------------------------------------------

struct DerivativeRow {
    double x = 0.0;
    double slope_a = 0.0;  // |dL/dx|
    double slope_b = 0.0;
};

enum class Verdict { a, b, tie };

struct ScalabilityTable {
    std::vector<DerivativeRow> rows;
    double average_a = 0.0;
    double average_b = 0.0;
    Verdict stronger = Verdict::tie;  // larger average |dL/dx|
};

ScalabilityTable scalability_table(const FitResult& fit_a, const FitResult& fit_b,
                                   std::span<const double> probes);

// --- predictions -----------------------------------------------------------

struct ModelCandidate {
    std::string model_id;
    double gflops_per_sample = 0.0;
};

struct PredictionRow {
    std::string label;
    double target_compute = 0.0;
    ModelCandidate candidate;
    double implied_samples = 0.0;
    double error = 0.0;
    double accuracy = 0.0;
    std::optional<PredictionInterval> interval;  // on the error scale
};

std::vector<PredictionRow> predict_table(const FitResult& fit, std::span<const double> targets,
                                         std::span<const ModelCandidate> candidates,
                                         double alpha = 0.05, const std::string& label = "");

// --- comparison report ----------------------------------------------------

struct ScaleWinner {
    double x = 0.0;
    std::string label;  // lower predicted error; "tie" when equal
};

struct ComparisonReport {
    std::string label_a;
    std::string label_b;
    FitResult fit_a;
    FitResult fit_b;
    double range_lo = 0.0;
    double range_hi = 0.0;
    Crossover crossover;
    ScalabilityTable scalability;
    std::vector<ScaleWinner> winner_by_scale;
    std::vector<PredictionRow> predictions;
};

/// Crossover on [lo, hi], derivative table and per-probe winners, plus
/// predictions for both fits at `targets` (no candidates: implied samples
/// are left at zero).
ComparisonReport compare_fits(const FitResult& fit_a, const std::string& label_a,
                              const FitResult& fit_b, const std::string& label_b,
                              std::span<const double> probes, double lo, double hi,
                              std::span<const double> targets = {}, double alpha = 0.05,
                              const CrossoverOptions& options = {});

// --- compute-optimal dataset size -----------------------------------------

struct DoptRow {
    double compute = 0.0;
    double d_opt = 0.0;
    double d_opt_lo = 0.0;  // confidence band of the loglog regression mean
    double d_opt_hi = 0.0;
    double error = 0.0;
    std::optional<PredictionInterval> error_interval;  // from the samples-axis fit only
};

struct DoptChain {
    LogLogFit dopt_fit;
    std::vector<DoptRow> rows;
};

DoptChain compute_optimal_chain(std::span<const Observation> dopt_points,
                                const FitResult& error_fit_on_samples,
                                std::span<const double> targets, double alpha = 0.05);

/// (C, D_opt) pairs: per log-spaced compute bin, the samples seen of the
/// minimal-error record. `samples` is indexed like `compute_points`.
std::vector<Observation> dopt_pairs(std::span<const Observation> compute_points,
                                    std::span<const double> samples, std::size_t n_bins);

// --- form selection ---------------------------------------------------------

struct FormScore {
    ScalingForm form = ScalingForm::saturated;
    double rmse_holdout = 0.0;
    ValidationRun run;
};

/// Fit each form below the threshold and rank by holdout RMSE (stable,
/// ascending).
std::vector<FormScore> select_form(std::span<const FrontierPoint> points, double c_threshold,
                                   std::span<const ScalingForm> forms, const FitConfig& config = {},
                                   double alpha = 0.05);

// --- synthetic data --------------------------------------------------------

/// error_i = L(x_i) + N(0, sigma^2), clamped to [0, 1].
std::vector<FrontierPoint> synth_generate(const ScalingParams& true_params, ScalingForm form,
                                          std::span<const double> design, double noise_sigma,
                                          std::uint64_t seed);

/// n log-spaced values over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace scalelaw
