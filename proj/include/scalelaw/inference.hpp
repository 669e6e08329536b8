#pragma once

#include "scalelaw/frontier.hpp"
#include "scalelaw/solver.hpp"
#include "scalelaw/tdist.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace scalelaw {

struct CovarianceEstimate {
    Eigen::MatrixXd matrix;
    int rank = 0;
    bool rank_deficient = false;
    double residual_variance = 0.0;  // rss / (n - p)
};

/// s^2 (J^T J)^+ from an n x p Jacobian, via the SVD of J. Singular values
/// below max(n, p) * eps * s_max are treated as zero.
CovarianceEstimate covariance_from_jacobian(const Eigen::MatrixXd& jacobian, double rss);

/// Gauss-Newton covariance of the natural parameters at the fitted optimum.
CovarianceEstimate param_covariance(const FitResult& fit, std::span<const FrontierPoint> points);

/// Compute the covariance and store it (with its rank report) in `fit`.
void attach_covariance(FitResult& fit, std::span<const FrontierPoint> points);

struct PredictionInterval {
    double x = 0.0;
    double y_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double sigma = 0.0;
    double alpha = 0.05;
    double df = 0.0;
};

/// Delta-method interval: y_hat +- t(alpha/2, n - p) * sqrt(g^T Cov g).
PredictionInterval predict_ci(const FitResult& fit, double x, double alpha = 0.05);

struct ThresholdSplit {
    std::vector<FrontierPoint> train;    // x < threshold
    std::vector<FrontierPoint> holdout;  // x >= threshold
    bool train_empty() const { return train.empty(); }
    bool holdout_empty() const { return holdout.empty(); }
};

ThresholdSplit threshold_split(std::span<const FrontierPoint> points, double c_threshold);

struct ValidationRow {
    double x = 0.0;
    double observed = 0.0;
    double predicted = 0.0;
    std::optional<PredictionInterval> interval;  // present when the fit has a covariance
};

struct ValidationReport {
    double c_threshold = std::numeric_limits<double>::quiet_NaN();
    std::size_t train_count = 0;
    std::size_t holdout_count = 0;
    double rmse_holdout = 0.0;
    std::vector<ValidationRow> rows;
};

ValidationReport holdout_rmse(const FitResult& fit, std::span<const FrontierPoint> holdout,
                              double c_threshold = std::numeric_limits<double>::quiet_NaN(),
                              double alpha = 0.05);

/// Split at `c_threshold`, fit `form` on the train side with covariance, and
/// score the holdout side.
struct ValidationRun {
    FitResult fit;
    ValidationReport report;
};

ValidationRun validate_threshold(std::span<const FrontierPoint> points, double c_threshold,
                                 ScalingForm form, const FitConfig& config = {},
                                 double alpha = 0.05);

}  // namespace scalelaw
