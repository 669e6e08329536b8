#pragma once

#include "scalelaw/axis.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace scalelaw {

/// Functional families:
///   saturated  A * (x + B)^(-alpha) + E
///   simple     A * (x + B)^(-alpha)
///   loglog     D0 * x^a
enum class ScalingForm { saturated, simple, loglog };

std::string_view to_string(ScalingForm form);
ScalingForm parse_form(std::string_view text);

/// Number of free parameters of `form` (4, 3, 2).
int parameter_count(ScalingForm form);

/// Coefficients of a scaling law. `alpha` is stored positive; the exponent
/// carries the minus sign. Fields not used by a form are ignored.
struct ScalingParams {
    double A = 0.0;
    double B = 0.0;
    double alpha = 0.0;
    double E = 0.0;
    double D0 = 0.0;
    double a = 0.0;
    Axis axis = Axis::compute;

    friend bool operator==(const ScalingParams&, const ScalingParams&) = default;
};

/// Saturated-law coefficients as printed in published tables, which list the
/// exponent with its negative sign.
ScalingParams from_published(double A, double B, double printed_alpha, double E,
                             Axis axis = Axis::compute);

double evaluate(const ScalingParams& params, ScalingForm form, double x);

/// Closed-form dL/dx.
double derivative(const ScalingParams& params, ScalingForm form, double x);

/// Gradient of `evaluate` with respect to the natural parameters, in the
/// order of `to_vector`.
Eigen::VectorXd parameter_gradient(const ScalingParams& params, ScalingForm form, double x);

/// Natural parameter vector: saturated (A, B, alpha, E), simple (A, B, alpha),
/// loglog (D0, a).
Eigen::VectorXd to_vector(const ScalingParams& params, ScalingForm form);
ScalingParams from_vector(const Eigen::VectorXd& theta, ScalingForm form, Axis axis);

std::vector<std::string> parameter_names(ScalingForm form);

/// One message per violated shape constraint; empty when the law is
/// positive, decreasing and bounded below by a non-negative floor.
std::vector<std::string> check_shape(const ScalingParams& params, ScalingForm form);

}  // namespace scalelaw
