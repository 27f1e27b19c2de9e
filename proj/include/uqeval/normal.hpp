#pragma once

#include <cmath>

#include "uqeval/core.hpp"

namespace uqeval {

/// Inverse CDF of the standard normal on (0,1).
///
/// Acklam's rational approximation (relative error < 1.15e-9), polished
/// with one Halley step against std::erfc. Absolute error after the
/// polish is below 1e-12 over the full open interval.
/// https://web.archive.org/web/20151030215612/http://home.online.no/~pjacklam/notes/invnorm/
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        raise(errc::out_of_range, "normal_quantile: p must lie in (0,1)");

    static constexpr double a[6] = {
        -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {
        -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[6] = {
        -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[4] = {
        7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step on Phi(x) - p = 0.
    const double sqrt2 = std::sqrt(2.0);
    const double sqrt_2pi = std::sqrt(8.0 * std::atan(1.0));
    const double e = 0.5 * std::erfc(-x / sqrt2) - p;
    const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

/// Z-score for a two-sided confidence level: the upper (1 - alpha/2)
/// quantile of the standard normal. z_score(0.2) ~ 1.2816 (80% interval).
inline double z_score(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        raise(errc::out_of_range, "z_score: alpha must lie in (0,1)");
    return normal_quantile(1.0 - 0.5 * alpha);
}

} // namespace uqeval
