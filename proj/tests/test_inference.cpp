#include <doctest.h>

#include "support.hpp"

#include "scalelaw/error.hpp"
#include "scalelaw/inference.hpp"
#include "scalelaw/tdist.hpp"

using namespace scalelaw;
using testing::as_fit;
using testing::clip_params;
using testing::exact_points;
using testing::mammut_params;
using testing::rel;

namespace {

const auto kSat = ScalingForm::saturated;

FitResult fitted(const std::vector<FrontierPoint>& pts, ScalingForm form = kSat) {
    auto fit = fit_saturated(pts, form);
    REQUIRE(fit.converged);
    attach_covariance(fit, pts);
    return fit;
}

}  // namespace

TEST_CASE("perfect fit yields a zero covariance and a degenerate interval") {
    const auto pts = exact_points(clip_params(), kSat, log_grid(1e9, 1e13, 12));
    auto fit = as_fit(clip_params());
    fit.n = pts.size();
    const auto est = param_covariance(fit, pts);
    CHECK(est.matrix.isZero(0.0));
    CHECK(est.residual_variance == 0.0);
    fit.covariance = est.matrix;
    const auto pi = predict_ci(fit, 2e12);
    CHECK(pi.lo == pi.y_hat);
    CHECK(pi.hi == pi.y_hat);
    CHECK(pi.df == 8);
}

TEST_CASE("one-parameter linear model matches the OLS variance") {
    Eigen::MatrixXd J(3, 1);
    J << 1, 2, 3;
    const Eigen::Vector3d y(1, 2, 3.1);
    const double sxx = 14.0;
    const double theta = (1 * 1 + 2 * 2 + 3 * 3.1) / sxx;
    const double rss = (y - theta * Eigen::Vector3d(1, 2, 3)).squaredNorm();
    const double oracle = rss / 2.0 / sxx;
    const auto est = covariance_from_jacobian(J, rss);
    CHECK(std::abs(est.matrix(0, 0) - oracle) < 1e-12);
    CHECK(est.rank == 1);
    CHECK_FALSE(est.rank_deficient);
}

TEST_CASE("two-parameter covariance matches the normal-equations inverse") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> noise(0, 0.1);
    Eigen::MatrixXd J(20, 2);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) {
        J(i, 0) = 1.0;
        J(i, 1) = i * 0.5;
        y(i) = 2.0 + 0.3 * J(i, 1) + noise(gen);
    }
    const Eigen::MatrixXd XtX = J.transpose() * J;
    const Eigen::VectorXd beta = XtX.ldlt().solve(J.transpose() * y);
    const double rss = (y - J * beta).squaredNorm();
    const Eigen::MatrixXd oracle = rss / 18.0 * XtX.inverse();
    const auto est = covariance_from_jacobian(J, rss);
    CHECK((est.matrix - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unidentifiable shift is flagged as rank deficient") {
    auto truth = clip_params();
    truth.B = 0.0;
    auto pts = exact_points(truth, kSat, log_grid(1e15, 1e20, 30));
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i].error += (i % 2 ? 1e-4 : -1e-4);
    auto fit = as_fit(truth);
    fit.n = pts.size();
    attach_covariance(fit, pts);
    CHECK(fit.rank_deficient);
    CHECK(fit.covariance_rank == 3);
    REQUIRE(fit.covariance);
    CHECK(fit.covariance->allFinite());
    const auto pi = predict_ci(fit, 1e18);
    CHECK(pi.lo <= pi.y_hat);
    CHECK(pi.hi >= pi.y_hat);
}

TEST_CASE("covariance preconditions") {
    const auto pts = exact_points(clip_params(), kSat, log_grid(1e9, 1e13, 4));
    auto fit = as_fit(clip_params());
    fit.n = 4;
    CHECK_THROWS_AS(param_covariance(fit, pts), InputError);
    fit.n = 5;
    CHECK_THROWS_AS(param_covariance(fit, pts), InputError);
    fit.converged = false;
    CHECK_THROWS_AS(param_covariance(fit, pts), NumericalError);
    CHECK_THROWS_AS(predict_ci(as_fit(clip_params()), 1e10), InputError);
}

TEST_CASE("prediction interval is y_hat plus or minus t times sigma") {
    const auto pts = synth_generate(mammut_params(), kSat, log_grid(1e9, 1e13, 40), 0.005, 1);
    const auto fit = fitted(pts);
    const auto pi = predict_ci(fit, 2.59e12, 0.05);
    const Eigen::VectorXd g = parameter_gradient(fit.params, kSat, 2.59e12);
    const double sigma = std::sqrt(g.dot(*fit.covariance * g));
    CHECK(pi.sigma == rel(sigma, 1e-14));
    CHECK(pi.hi - pi.y_hat == rel(t_quantile(0.05, 36) * sigma, 1e-12));
    CHECK(pi.y_hat - pi.lo == rel(t_quantile(0.05, 36) * sigma, 1e-12));
    CHECK(pi.df == 36);
    CHECK_THROWS_AS(predict_ci(fit, 0.0), InputError);
}

TEST_CASE("doubling the covariance scales half-widths by sqrt 2") {
    const auto pts = synth_generate(clip_params(), kSat, log_grid(1e9, 1e13, 30), 0.005, 2);
    auto fit = fitted(pts);
    auto doubled = fit;
    *doubled.covariance *= 2.0;
    for (double x : {1e9, 3e10, 1e12, 5e13}) {
        const auto a = predict_ci(fit, x), b = predict_ci(doubled, x);
        CHECK(a.hi - a.lo >= 0.0);
        CHECK(b.hi - b.y_hat == rel(std::sqrt(2.0) * (a.hi - a.y_hat), 1e-12));
    }
}

TEST_CASE("threshold split follows the strict-below rule") {
    const std::vector<FrontierPoint> pts{{2.59e11, 0.3, 0}, {4.07e11, 0.25, 1}, {1e10, 0.5, 2}};
    const auto split = threshold_split(pts, 2.5e11);
    REQUIRE(split.train.size() == 1);
    CHECK(split.train[0].x == 1e10);
    REQUIRE(split.holdout.size() == 2);
    CHECK(split.holdout[0].x == 2.59e11);
    CHECK(split.holdout[1].x == 4.07e11);

    const auto edge = threshold_split(std::vector<FrontierPoint>{{5.0, 0.1, 0}}, 5.0);
    CHECK(edge.train_empty());
    CHECK(edge.holdout.size() == 1);

    const auto empty = threshold_split(std::vector<FrontierPoint>{}, 5.0);
    CHECK(empty.train.empty());
    CHECK(empty.holdout.empty());
}

TEST_CASE("holdout rmse definitions") {
    const auto fit = as_fit(clip_params());
    const auto on_curve = exact_points(clip_params(), kSat, {1e12, 2e12});
    CHECK(holdout_rmse(fit, on_curve).rmse_holdout == 0.0);

    auto off = exact_points(clip_params(), kSat, {1e12});
    off[0].error += 0.01;
    const auto report = holdout_rmse(fit, off, 5e11);
    CHECK(report.rmse_holdout == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(report.c_threshold == 5e11);
    REQUIRE(report.rows.size() == 1);
    CHECK_FALSE(report.rows[0].interval.has_value());
    CHECK_THROWS_AS(holdout_rmse(fit, std::vector<FrontierPoint>{}), InputError);
}

TEST_CASE("saturated form beats the no-floor form when E is nonzero") {
    auto truth = clip_params();
    truth.E = 0.1;
    const auto pts = synth_generate(truth, kSat, log_grid(1e9, 1e13, 40), 0.002, 4);
    const auto sat = validate_threshold(pts, 2.5e11, kSat);
    const auto simple = validate_threshold(pts, 2.5e11, ScalingForm::simple);
    CHECK(sat.report.rmse_holdout < simple.report.rmse_holdout);
    CHECK(sat.report.train_count + sat.report.holdout_count == 40);
    CHECK(sat.report.rows.front().interval.has_value());
}

TEST_CASE("degenerate splits are rejected by validate_threshold") {
    const auto pts = exact_points(clip_params(), kSat, log_grid(1e9, 1e13, 10));
    CHECK_THROWS_AS(validate_threshold(pts, 1e8, kSat), InputError);
    CHECK_THROWS_AS(validate_threshold(pts, 1e14, kSat), InputError);
}

TEST_CASE("property: threshold split partitions in order") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> lx(6, 13);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<FrontierPoint> pts;
        for (std::size_t i = 0; i < 30; ++i) pts.push_back({std::pow(10.0, lx(gen)), 0.5, i});
        const double t = std::pow(10.0, lx(gen));
        const auto s = threshold_split(pts, t);
        CHECK(s.train.size() + s.holdout.size() == pts.size());
        for (const auto& p : s.train) CHECK(p.x < t);
        for (const auto& p : s.holdout) CHECK(p.x >= t);
        for (std::size_t i = 1; i < s.train.size(); ++i) CHECK(s.train[i - 1].source_index < s.train[i].source_index);
        for (std::size_t i = 1; i < s.holdout.size(); ++i)
            CHECK(s.holdout[i - 1].source_index < s.holdout[i].source_index);
    }
}
