#include "scalelaw/solver.hpp"

#include "scalelaw/error.hpp"
#include "scalelaw/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace scalelaw {

namespace {

constexpr double kMaxDamping = 1e16;
constexpr double kMinDamping = 1e-15;

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

LmSummary lm_minimize(const LeastSquaresProblem& problem, const Eigen::VectorXd& init,
                      const LmOptions& options) {
    LmSummary out;
    Eigen::VectorXd theta = init;
    Eigen::VectorXd r = problem.residuals(theta);
    if (!all_finite(theta) || !all_finite(r))
        throw InputError("residuals are not finite at the initial point");

    double rss = r.squaredNorm();
    out.initial_rss = rss;
    out.rss_history.push_back(rss);
    double damping = options.initial_damping;
    const auto dim = theta.size();

    auto finish = [&](LmStop stop) {
        out.solution = theta;
        out.rss = rss;
        out.stop = stop;
        out.converged = stop == LmStop::gradient || stop == LmStop::step;
        return out;
    };

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const Eigen::MatrixXd J = problem.jacobian(theta);
        if (!J.allFinite()) return finish(LmStop::damping_exhausted);
        const Eigen::VectorXd gradient = J.transpose() * r;
        if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance)
            return finish(LmStop::gradient);

        const Eigen::MatrixXd normal = J.transpose() * J;
        Eigen::VectorXd scale = normal.diagonal();
        const double floor = std::max(scale.maxCoeff() * 1e-14, std::numeric_limits<double>::min());
        scale = scale.cwiseMax(floor);

        // Each iteration first tries a tenth of the last accepted damping.
        damping = std::max(damping / 10.0, kMinDamping);
        while (true) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += damping * scale;
            const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
            const double step_limit =
                options.step_tolerance * (theta.norm() + options.step_tolerance);
            if (all_finite(step)) {
                const Eigen::VectorXd trial = theta + step;
                const Eigen::VectorXd r_trial = problem.residuals(trial);
                const double rss_trial = r_trial.squaredNorm();
                if (all_finite(r_trial) && rss_trial < rss) {
                    theta = trial;
                    r = r_trial;
                    rss = rss_trial;
                    ++out.iterations;
                    out.rss_history.push_back(rss);
                    if (step.norm() <= step_limit) return finish(LmStop::step);
                    break;
                }
                if (step.norm() <= step_limit) return finish(LmStop::step);
            }
            damping *= 10.0;
            if (damping > kMaxDamping || dim == 0) return finish(LmStop::damping_exhausted);
        }
    }
    return finish(LmStop::max_iterations);
}

void validate_config(const FitConfig& config) {
    if (config.max_iterations < 1) throw InputError("max_iterations must be >= 1");
    if (!(config.gradient_tolerance > 0.0) || !(config.step_tolerance > 0.0))
        throw InputError("tolerances must be > 0");
    if (!(config.initial_damping > 0.0)) throw InputError("initial_damping must be > 0");
    if (config.random_starts < 0) throw InputError("random_starts must be >= 0");
    for (const auto& b : config.bounds) {
        if (!(b.lo <= b.hi)) throw InputError("parameter bounds need lo <= hi");
    }
}

namespace {

// Maps an unconstrained coordinate onto one bounded natural parameter.
struct BoundTransform {
    ParamBounds bounds;

    bool lower() const { return std::isfinite(bounds.lo); }
    bool upper() const { return std::isfinite(bounds.hi); }

    double to_natural(double t) const {
        if (lower() && upper()) return bounds.lo + (bounds.hi - bounds.lo) / (1.0 + std::exp(-t));
        if (lower()) return bounds.lo + std::exp(t);
        if (upper()) return bounds.hi - std::exp(t);
        return t;
    }

    double slope(double t) const {
        if (lower() && upper()) {
            const double s = 1.0 / (1.0 + std::exp(-t));
            return (bounds.hi - bounds.lo) * s * (1.0 - s);
        }
        if (lower()) return std::exp(t);
        if (upper()) return -std::exp(t);
        return 1.0;
    }

    double to_internal(double v) const {
        constexpr double kGap = 1e-12;
        if (lower() && upper()) {
            const double width = bounds.hi - bounds.lo;
            if (width <= 0.0) return 0.0;
            const double f = std::clamp((v - bounds.lo) / width, 1e-9, 1.0 - 1e-9);
            return std::log(f / (1.0 - f));
        }
        if (lower()) return std::log(std::max(v - bounds.lo, kGap));
        if (upper()) return std::log(std::max(bounds.hi - v, kGap));
        return v;
    }
};

struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    double min_x = 0.0;
    double min_error = 0.0;
};

FitData prepare(std::span<const FrontierPoint> points, ScalingForm form) {
    if (form == ScalingForm::loglog)
        throw InputError("fit_saturated handles the saturated and simple forms; use fit_loglog");
    const auto p = static_cast<std::size_t>(parameter_count(form));
    if (points.size() < p)
        throw InputError(fmt::format("{} law needs at least {} points, got {}", to_string(form), p,
                                     points.size()));
    FitData d;
    for (const auto& pt : points) {
        if (!(pt.x > 0.0) || !std::isfinite(pt.x)) throw InputError("fit points need x > 0");
        if (!(pt.error >= 0.0 && pt.error <= 1.0))
            throw InputError("fit points need error in [0, 1]");
        d.x.push_back(pt.x);
        d.y.push_back(pt.error);
    }
    const auto [lo, hi] = std::minmax_element(d.x.begin(), d.x.end());
    if (*lo == *hi) throw InputError("all x values are identical; the fit is rank deficient");
    d.min_x = *lo;
    d.min_error = *std::min_element(d.y.begin(), d.y.end());
    return d;
}

std::vector<ParamBounds> default_bounds(ScalingForm form, double min_error) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<ParamBounds> b = {{0.0, inf}, {0.0, inf}, {0.0, 2.0}};
    if (form == ScalingForm::saturated) b.push_back({0.0, min_error});
    return b;
}

double amplitude_through(double x, double y, double B, double alpha, double E) {
    return std::max(y - E, 1e-6) * std::pow(x + B, alpha);
}

struct StartRun {
    Eigen::VectorXd theta;  // natural parameters
    LmSummary summary;
};

StartRun run_start(const FitData& data, ScalingForm form, const std::vector<BoundTransform>& tf,
                   const ScalingParams& init, const LmOptions& options) {
    const Axis axis = init.axis;
    const auto n = static_cast<Eigen::Index>(data.x.size());
    const auto p = static_cast<Eigen::Index>(tf.size());

    auto natural = [&](const Eigen::VectorXd& t) {
        Eigen::VectorXd v(p);
        for (Eigen::Index i = 0; i < p; ++i) v(i) = tf[i].to_natural(t(i));
        return v;
    };

    LeastSquaresProblem problem;
    problem.residuals = [&](const Eigen::VectorXd& t) {
        const ScalingParams params = from_vector(natural(t), form, axis);
        Eigen::VectorXd r(n);
        if (!check_shape(params, form).empty()) {
            r.setConstant(std::numeric_limits<double>::quiet_NaN());
            return r;
        }
        for (Eigen::Index i = 0; i < n; ++i)
            r(i) = evaluate(params, form, data.x[i]) - data.y[i];
        return r;
    };
    problem.jacobian = [&](const Eigen::VectorXd& t) {
        const ScalingParams params = from_vector(natural(t), form, axis);
        Eigen::MatrixXd J(n, p);
        if (!check_shape(params, form).empty()) {
            J.setConstant(std::numeric_limits<double>::quiet_NaN());
            return J;
        }
        for (Eigen::Index i = 0; i < n; ++i)
            J.row(i) = parameter_gradient(params, form, data.x[i]).transpose();
        for (Eigen::Index j = 0; j < p; ++j) J.col(j) *= tf[j].slope(t(j));
        return J;
    };

    const Eigen::VectorXd v0 = to_vector(init, form);
    Eigen::VectorXd t0(p);
    for (Eigen::Index i = 0; i < p; ++i) t0(i) = tf[i].to_internal(v0(i));

    StartRun run;
    run.summary = lm_minimize(problem, t0, options);
    run.theta = natural(run.summary.solution);

    // The transform flattens out near a bound, so a parameter driven close
    // to one can stall there. Polishing in natural coordinates, rejecting
    // steps that leave the box, lets it move back inside.
    auto in_box = [&](const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < p; ++i)
            if (!(v(i) >= tf[i].bounds.lo && v(i) <= tf[i].bounds.hi)) return false;
        return check_shape(from_vector(v, form, axis), form).empty();
    };
    if (!run.summary.converged || !in_box(run.theta)) return run;
    LeastSquaresProblem polish;
    polish.residuals = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd r(n);
        if (!in_box(v)) {
            r.setConstant(std::numeric_limits<double>::quiet_NaN());
            return r;
        }
        const ScalingParams params = from_vector(v, form, axis);
        for (Eigen::Index i = 0; i < n; ++i) r(i) = evaluate(params, form, data.x[i]) - data.y[i];
        return r;
    };
    polish.jacobian = [&](const Eigen::VectorXd& v) {
        const ScalingParams params = from_vector(v, form, axis);
        Eigen::MatrixXd J(n, p);
        for (Eigen::Index i = 0; i < n; ++i) J.row(i) = parameter_gradient(params, form, data.x[i]).transpose();
        return J;
    };
    const LmSummary polished = lm_minimize(polish, run.theta, options);
    if (polished.converged && polished.rss <= run.summary.rss) {
        const int iterations = run.summary.iterations + polished.iterations;
        run.summary = polished;
        run.summary.iterations = iterations;
        run.theta = polished.solution;
    }
    return run;
}

}  // namespace

std::vector<ScalingParams> default_multistart_grid(std::span<const FrontierPoint> points,
                                                   ScalingForm form) {
    const FitData data = prepare(points, form);
    std::vector<std::size_t> order(data.x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return data.x[a] < data.x[b]; });
    const std::size_t mid = order[order.size() / 2];
    const double x_med = data.x[mid];
    const double y_med = data.y[mid];
    const Axis axis = points.front().axis;

    std::vector<double> floors = {0.0};
    if (form == ScalingForm::saturated) floors.push_back(data.min_error / 2.0);

    std::vector<ScalingParams> grid;
    for (double alpha : {0.1, 0.25, 0.5}) {
        for (double E : floors) {
            for (double B : {0.0, data.min_x / 100.0}) {
                ScalingParams s;
                s.axis = axis;
                s.alpha = alpha;
                s.E = E;
                s.B = B;
                s.A = amplitude_through(x_med, y_med, B, alpha, E);
                grid.push_back(s);
            }
        }
    }
    return grid;
}

FitResult fit_saturated(std::span<const FrontierPoint> points, ScalingForm form,
                        const FitConfig& config) {
    validate_config(config);
    const FitData data = prepare(points, form);
    const int p = parameter_count(form);

    const auto bounds = config.bounds.empty() ? default_bounds(form, data.min_error) : config.bounds;
    if (static_cast<int>(bounds.size()) != p)
        throw InputError(fmt::format("{} law needs {} parameter bounds, got {}", to_string(form), p,
                                     bounds.size()));
    std::vector<BoundTransform> tf;
    for (const auto& b : bounds) tf.push_back({b});

    std::vector<ScalingParams> starts =
        config.multistart_grid.empty() ? default_multistart_grid(points, form) : config.multistart_grid;
    const Axis axis = points.front().axis;
    for (auto& s : starts) s.axis = axis;

    if (config.random_starts > 0) {
        Rng rng(config.seed);
        const std::size_t base = starts.size();
        std::vector<std::size_t> order(data.x.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return data.x[a] < data.x[b]; });
        const double x_med = data.x[order[order.size() / 2]];
        const double y_med = data.y[order[order.size() / 2]];
        for (int k = 0; k < config.random_starts; ++k) {
            ScalingParams s = starts[static_cast<std::size_t>(k) % base];
            s.alpha = std::clamp(s.alpha * std::exp(0.5 * rng.normal()), 1e-3, 1.9);
            if (form == ScalingForm::saturated) s.E = rng.uniform() * data.min_error;
            s.A = amplitude_through(x_med, y_med, s.B, s.alpha, s.E);
            starts.push_back(s);
        }
    }

    const LmOptions options{config.max_iterations, config.gradient_tolerance, config.step_tolerance,
                            config.initial_damping};

    std::vector<StartRun> runs(starts.size());
    if (config.parallel) {
        std::vector<std::future<StartRun>> jobs;
        for (const auto& s : starts)
            jobs.push_back(std::async(std::launch::async, [&, s] { return run_start(data, form, tf, s, options); }));
        for (std::size_t i = 0; i < jobs.size(); ++i) runs[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < starts.size(); ++i) runs[i] = run_start(data, form, tf, starts[i], options);
    }

    FitResult result;
    result.form = form;
    result.n = data.x.size();
    result.p = p;
    std::optional<std::size_t> winner;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& s = runs[i].summary;
        result.starts.push_back({starts[i], s.rss, s.converged, s.iterations});
        if (!std::isfinite(s.rss)) continue;
        if (!winner) {
            winner = i;
            continue;
        }
        const auto& w = runs[*winner].summary;
        // Converged starts outrank non-converged ones; then lowest rss.
        if ((s.converged && !w.converged) || (s.converged == w.converged && s.rss < w.rss))
            winner = i;
    }
    if (!winner) throw NumericalError("no multistart produced a finite fit");

    const StartRun& best = runs[*winner];
    result.params = from_vector(best.theta, form, axis);
    result.rss = best.summary.rss;
    result.converged = best.summary.converged;
    result.start_index = *winner;
    for (std::size_t i = 0; i < data.x.size(); ++i)
        result.residuals.push_back(evaluate(result.params, form, data.x[i]) - data.y[i]);
    return result;
}

LogLogFit fit_loglog(std::span<const Observation> points, Axis axis) {
    if (points.size() < 2) throw InputError("loglog fit needs at least 2 points");
    const auto n = static_cast<double>(points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& pt : points) {
        if (!(pt.x > 0.0) || !(pt.error > 0.0))
            throw InputError("loglog fit needs strictly positive coordinates");
        mean_x += std::log(pt.x);
        mean_y += std::log(pt.error);
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& pt : points) {
        const double dx = std::log(pt.x) - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(pt.error) - mean_y);
    }
    if (!(sxx > 0.0)) throw InputError("loglog fit needs at least 2 distinct x values");

    LogLogFit fit;
    fit.n = points.size();
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.params.D0 = std::exp(fit.intercept);
    fit.params.a = fit.slope;
    fit.params.axis = axis;

    if (points.size() > 2) {
        double rss = 0.0;
        for (const auto& pt : points) {
            const double e = std::log(pt.error) - (fit.intercept + fit.slope * std::log(pt.x));
            rss += e * e;
        }
        fit.residual_variance = rss / (n - 2.0);
        const double var_slope = fit.residual_variance / sxx;
        fit.covariance << fit.residual_variance / n + mean_x * mean_x * var_slope,
            -mean_x * var_slope, -mean_x * var_slope, var_slope;
    }
    return fit;
}

}  // namespace scalelaw
