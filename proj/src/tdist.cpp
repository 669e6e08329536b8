#include "scalelaw/tdist.hpp"

#include "scalelaw/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace scalelaw {

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 100000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("incomplete beta needs x in [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double inverse_incomplete_beta(double p, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("inverse incomplete beta needs a, b > 0");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("inverse incomplete beta needs p in [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    // Starting guess from the leading terms of the series at both ends.
    double x = 0.0;
    if (a >= 1.0 && b >= 1.0) {
        const double pp = p < 0.5 ? p : 1.0 - p;
        const double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) z = -z;
        const double al = (z * z - 3.0) / 6.0;
        const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
        const double w = z * std::sqrt(al + h) / h -
                         (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) * (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
        x = a / (a + b * std::exp(2.0 * w));
    } else {
        const double lna = std::log(a / (a + b));
        const double lnb = std::log(b / (a + b));
        const double t = std::exp(a * lna) / a;
        const double u = std::exp(b * lnb) / b;
        const double w = t + u;
        x = p < t / w ? std::pow(a * w * p, 1.0 / a) : 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }

    // Newton on I_x - p, falling back to bisection whenever a step leaves the
    // bracket that is maintained around the root.
    double lo = 0.0;
    double hi = 1.0;
    const double lbeta = log_beta(a, b);
    if (!(x > 0.0 && x < 1.0)) x = 0.5;
    for (int iter = 0; iter < 300; ++iter) {
        const double f = incomplete_beta(a, b, x) - p;
        if (f == 0.0) return x;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
        const double density = std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lbeta);
        double next = x - f / density;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next) ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            return next;
        x = next;
    }
    return x;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw InputError("degrees of freedom must be > 0");
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return t >= 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double alpha_two_sided, double df) {
    if (!(alpha_two_sided > 0.0 && alpha_two_sided < 1.0))
        throw InputError(fmt::format("alpha must lie in (0, 1), got {}", alpha_two_sided));
    if (!(df >= 1.0)) throw InputError(fmt::format("degrees of freedom must be >= 1, got {}", df));
    // With y = t^2 / (df + t^2), P(|T| <= t) = I_y(1/2, df/2) and
    // P(|T| > t) = I_{1-y}(df/2, 1/2). Inverting the smaller probability keeps precision.
    if (alpha_two_sided < 0.5) {
        const double z = inverse_incomplete_beta(alpha_two_sided, 0.5 * df, 0.5);
        return std::sqrt(df * (1.0 - z) / z);
    }
    const double y = inverse_incomplete_beta(1.0 - alpha_two_sided, 0.5, 0.5 * df);
    return std::sqrt(df * y / (1.0 - y));
}

}  // namespace scalelaw
