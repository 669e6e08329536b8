#pragma once

namespace scalelaw {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// x such that I_x(a, b) = p.
double inverse_incomplete_beta(double p, double a, double b);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-sided critical value: P(|T_df| > t) = alpha_two_sided.
double t_quantile(double alpha_two_sided, double df);

}  // namespace scalelaw
