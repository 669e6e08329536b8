#include "scalelaw/powerlaw.hpp"

#include "scalelaw/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace scalelaw {

std::string_view to_string(ScalingForm form) {
    switch (form) {
        case ScalingForm::saturated: return "saturated";
        case ScalingForm::simple: return "simple";
        case ScalingForm::loglog: return "loglog";
    }
    return "saturated";
}

ScalingForm parse_form(std::string_view text) {
    if (text == "saturated") return ScalingForm::saturated;
    if (text == "simple") return ScalingForm::simple;
    if (text == "loglog") return ScalingForm::loglog;
    throw InputError(fmt::format("unknown form '{}' (expected saturated, simple or loglog)", text));
}

int parameter_count(ScalingForm form) {
    switch (form) {
        case ScalingForm::saturated: return 4;
        case ScalingForm::simple: return 3;
        case ScalingForm::loglog: return 2;
    }
    return 0;
}

ScalingParams from_published(double A, double B, double printed_alpha, double E, Axis axis) {
    ScalingParams p;
    p.A = A;
    p.B = B;
    p.alpha = -printed_alpha;
    p.E = E;
    p.axis = axis;
    return p;
}

namespace {

void require_evaluable(const ScalingParams& p, ScalingForm form, double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw InputError(fmt::format("x must be finite and > 0 (got {})", x));
    if (form == ScalingForm::loglog) {
        if (!(p.D0 > 0.0)) throw InputError("loglog law requires D0 > 0");
        return;
    }
    const auto violations = check_shape(p, form);
    if (!violations.empty())
        throw InputError(fmt::format("invalid {} parameters: {}", to_string(form), violations.front()));
}

}  // namespace

double evaluate(const ScalingParams& p, ScalingForm form, double x) {
    require_evaluable(p, form, x);
    if (form == ScalingForm::loglog) return std::exp(std::log(p.D0) + p.a * std::log(x));
    const double power = std::exp(std::log(p.A) - p.alpha * std::log(x + p.B));
    return form == ScalingForm::saturated ? power + p.E : power;
}

double derivative(const ScalingParams& p, ScalingForm form, double x) {
    require_evaluable(p, form, x);
    if (form == ScalingForm::loglog) return p.a * std::exp(std::log(p.D0) + (p.a - 1.0) * std::log(x));
    return -p.alpha * std::exp(std::log(p.A) - (p.alpha + 1.0) * std::log(x + p.B));
}

Eigen::VectorXd parameter_gradient(const ScalingParams& p, ScalingForm form, double x) {
    require_evaluable(p, form, x);
    Eigen::VectorXd g(parameter_count(form));
    if (form == ScalingForm::loglog) {
        const double y = std::exp(std::log(p.D0) + p.a * std::log(x));
        g << y / p.D0, y * std::log(x);
        return g;
    }
    const double log_shifted = std::log(x + p.B);
    const double power = std::exp(std::log(p.A) - p.alpha * log_shifted);  // A (x+B)^-alpha
    g(0) = power / p.A;
    g(1) = -p.alpha * power / (x + p.B);
    g(2) = -power * log_shifted;
    if (form == ScalingForm::saturated) g(3) = 1.0;
    return g;
}

Eigen::VectorXd to_vector(const ScalingParams& p, ScalingForm form) {
    Eigen::VectorXd v(parameter_count(form));
    switch (form) {
        case ScalingForm::saturated: v << p.A, p.B, p.alpha, p.E; break;
        case ScalingForm::simple: v << p.A, p.B, p.alpha; break;
        case ScalingForm::loglog: v << p.D0, p.a; break;
    }
    return v;
}

ScalingParams from_vector(const Eigen::VectorXd& theta, ScalingForm form, Axis axis) {
    if (theta.size() != parameter_count(form))
        throw InputError(fmt::format("{} law takes {} parameters, got {}", to_string(form),
                                     parameter_count(form), theta.size()));
    ScalingParams p;
    p.axis = axis;
    if (form == ScalingForm::loglog) {
        p.D0 = theta(0);
        p.a = theta(1);
        return p;
    }
    p.A = theta(0);
    p.B = theta(1);
    p.alpha = theta(2);
    if (form == ScalingForm::saturated) p.E = theta(3);
    return p;
}

std::vector<std::string> parameter_names(ScalingForm form) {
    switch (form) {
        case ScalingForm::saturated: return {"A", "B", "alpha", "E"};
        case ScalingForm::simple: return {"A", "B", "alpha"};
        case ScalingForm::loglog: return {"D0", "a"};
    }
    return {};
}

std::vector<std::string> check_shape(const ScalingParams& p, ScalingForm form) {
    std::vector<std::string> out;
    if (form == ScalingForm::loglog) {
        if (!(p.D0 > 0.0)) out.emplace_back("D0 not positive");
        if (!std::isfinite(p.a)) out.emplace_back("exponent not finite");
        return out;
    }
    if (!(p.A > 0.0) || !std::isfinite(p.A)) out.emplace_back("strict positivity violated");
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) out.emplace_back("monotonic decrease violated");
    if (!(p.B >= 0.0) || !std::isfinite(p.B)) out.emplace_back("shift negative");
    if (form == ScalingForm::saturated && (!(p.E >= 0.0) || !std::isfinite(p.E)))
        out.emplace_back("irreducible error negative");
    return out;
}

}  // namespace scalelaw
