#include "scalelaw/inference.hpp"

#include "scalelaw/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace scalelaw {

CovarianceEstimate covariance_from_jacobian(const Eigen::MatrixXd& jacobian, double rss) {
    const auto n = jacobian.rows();
    const auto p = jacobian.cols();
    if (n <= p)
        throw InputError(fmt::format("covariance needs more points than parameters (n={}, p={})", n, p));
    if (!jacobian.allFinite()) throw NumericalError("Jacobian is not finite");
    if (!(rss >= 0.0) || !std::isfinite(rss)) throw NumericalError("rss is not finite");

    CovarianceEstimate est;
    est.residual_variance = rss / static_cast<double>(n - p);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double tol = static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon() *
                       (s.size() ? s(0) : 0.0);
    Eigen::VectorXd inv_sq = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > tol) {
            inv_sq(i) = 1.0 / (s(i) * s(i));
            ++est.rank;
        }
    }
    est.rank_deficient = est.rank < p;
    const Eigen::MatrixXd& V = svd.matrixV();
    est.matrix = est.residual_variance * V * inv_sq.asDiagonal() * V.transpose();
    est.matrix = 0.5 * (est.matrix + est.matrix.transpose()).eval();
    return est;
}

CovarianceEstimate param_covariance(const FitResult& fit, std::span<const FrontierPoint> points) {
    if (!fit.converged) throw NumericalError("covariance requested for a fit that did not converge");
    if (points.size() != fit.n)
        throw InputError(fmt::format("fit used {} points but {} were supplied", fit.n, points.size()));
    Eigen::MatrixXd J(static_cast<Eigen::Index>(points.size()), fit.p);
    double rss = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        J.row(static_cast<Eigen::Index>(i)) =
            parameter_gradient(fit.params, fit.form, points[i].x).transpose();
        const double r = evaluate(fit.params, fit.form, points[i].x) - points[i].error;
        rss += r * r;
    }
    return covariance_from_jacobian(J, rss);
}

void attach_covariance(FitResult& fit, std::span<const FrontierPoint> points) {
    auto est = param_covariance(fit, points);
    fit.covariance = std::move(est.matrix);
    fit.covariance_rank = est.rank;
    fit.rank_deficient = est.rank_deficient;
}

PredictionInterval predict_ci(const FitResult& fit, double x, double alpha) {
    if (!fit.covariance) throw InputError("prediction interval needs a fit with a covariance");
    if (!(x > 0.0)) throw InputError(fmt::format("x must be > 0 (got {})", x));
    const double df = static_cast<double>(fit.n) - static_cast<double>(fit.p);
    if (df < 1.0) throw InputError("prediction interval needs n - p >= 1");

    PredictionInterval pi;
    pi.x = x;
    pi.alpha = alpha;
    pi.df = df;
    pi.y_hat = evaluate(fit.params, fit.form, x);
    const Eigen::VectorXd g = parameter_gradient(fit.params, fit.form, x);
    const double variance = g.dot(*fit.covariance * g);
    pi.sigma = std::sqrt(std::max(variance, 0.0));
    const double half = t_quantile(alpha, df) * pi.sigma;
    pi.lo = pi.y_hat - half;
    pi.hi = pi.y_hat + half;
    return pi;
}

ThresholdSplit threshold_split(std::span<const FrontierPoint> points, double c_threshold) {
    if (!(c_threshold > 0.0)) throw InputError("threshold must be > 0");
    ThresholdSplit split;
    for (const auto& p : points) (p.x < c_threshold ? split.train : split.holdout).push_back(p);
    return split;
}

ValidationReport holdout_rmse(const FitResult& fit, std::span<const FrontierPoint> holdout,
                              double c_threshold, double alpha) {
    if (holdout.empty()) throw InputError("holdout set is empty");
    ValidationReport report;
    report.c_threshold = c_threshold;
    report.train_count = fit.n;
    report.holdout_count = holdout.size();
    double sum_sq = 0.0;
    for (const auto& p : holdout) {
        ValidationRow row;
        row.x = p.x;
        row.observed = p.error;
        row.predicted = evaluate(fit.params, fit.form, p.x);
        if (fit.covariance) row.interval = predict_ci(fit, p.x, alpha);
        const double r = row.predicted - row.observed;
        sum_sq += r * r;
        report.rows.push_back(row);
    }
    report.rmse_holdout = std::sqrt(sum_sq / static_cast<double>(holdout.size()));
    return report;
}

ValidationRun validate_threshold(std::span<const FrontierPoint> points, double c_threshold,
                                 ScalingForm form, const FitConfig& config, double alpha) {
    const auto split = threshold_split(points, c_threshold);
    if (split.train_empty() || split.holdout_empty())
        throw InputError(fmt::format("threshold {} leaves {} train and {} holdout points", c_threshold,
                                     split.train.size(), split.holdout.size()));
    ValidationRun run;
    run.fit = fit_saturated(split.train, form, config);
    if (run.fit.converged && run.fit.n > static_cast<std::size_t>(run.fit.p))
        attach_covariance(run.fit, split.train);
    run.report = holdout_rmse(run.fit, split.holdout, c_threshold, alpha);
    return run;
}

}  // namespace scalelaw
