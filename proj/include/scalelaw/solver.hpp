#pragma once

#include "scalelaw/frontier.hpp"
#include "scalelaw/powerlaw.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace scalelaw {

// ---------------------------------------------------------------------------
// Generic Levenberg-Marquardt
// ---------------------------------------------------------------------------

struct LeastSquaresProblem {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residuals;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

struct LmOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-10;
    double step_tolerance = 1e-10;
    double initial_damping = 1e-3;
};

enum class LmStop { gradient, step, max_iterations, damping_exhausted };

struct LmSummary {
    Eigen::VectorXd solution;
    double rss = 0.0;
    double initial_rss = 0.0;
    bool converged = false;
    int iterations = 0;  // accepted steps
    LmStop stop = LmStop::max_iterations;
    std::vector<double> rss_history;  // rss after each accepted step, starting with init
};

/// Minimize ||r(theta)||^2 by damped Gauss-Newton steps with Marquardt's
/// diagonal scaling. Each iteration first tries a tenth of the last accepted
/// damping, which grows tenfold per rejected step. Throws InputError if r(init) is not finite.
LmSummary lm_minimize(const LeastSquaresProblem& problem, const Eigen::VectorXd& init,
                      const LmOptions& options = {});

// ---------------------------------------------------------------------------
// Scaling-law fits
// ---------------------------------------------------------------------------

struct ParamBounds {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
};

struct FitConfig {
    int max_iterations = 500;
    double gradient_tolerance = 1e-10;
    double step_tolerance = 1e-10;
    double initial_damping = 1e-3;
    // Starting points; empty selects the default grid built from the data.
    std::vector<ScalingParams> multistart_grid;
    // Per natural parameter; empty selects A >= 0, B >= 0, 0 <= alpha <= 2,
    // 0 <= E <= min observed error.
    std::vector<ParamBounds> bounds;
    std::uint64_t seed = 0;
    // Extra starts made by jittering grid members with the seeded generator.
    int random_starts = 0;
    bool parallel = false;
};

void validate_config(const FitConfig& config);

struct StartOutcome {
    ScalingParams init;
    double rss = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct FitResult {
    ScalingParams params;
    ScalingForm form = ScalingForm::saturated;
    double rss = 0.0;
    std::size_t n = 0;
    int p = 0;
    std::optional<Eigen::MatrixXd> covariance;  // filled by the inference layer
    int covariance_rank = 0;
    bool rank_deficient = false;
    bool converged = false;
    std::size_t start_index = 0;
    std::vector<double> residuals;  // prediction minus observation, per point
    std::vector<StartOutcome> starts;
};

/// Default multistart grid: alpha in {0.1, 0.25, 0.5}, E in {0, min error / 2},
/// B in {0, min x / 100}, with A chosen so the curve passes through the
/// median point. The simple form drops the E dimension.
std::vector<ScalingParams> default_multistart_grid(std::span<const FrontierPoint> points,
                                                   ScalingForm form);

/// Least-squares fit of a saturated or simple law on the error-rate scale.
/// Every start is run; the lowest-rss converged start wins (ties to the
/// lower start index).
FitResult fit_saturated(std::span<const FrontierPoint> points, ScalingForm form,
                        const FitConfig& config = {});

struct LogLogFit {
    ScalingParams params;        // loglog form: D0, a
    double intercept = 0.0;      // log D0
    double slope = 0.0;          // a
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // of (intercept, slope)
    double residual_variance = 0.0;
    std::size_t n = 0;

    double intercept_se() const { return std::sqrt(covariance(0, 0)); }
    double slope_se() const { return std::sqrt(covariance(1, 1)); }
};

/// Ordinary least squares of log y on log x.
LogLogFit fit_loglog(std::span<const Observation> points, Axis axis = Axis::compute);

}  // namespace scalelaw
