#include "ghostproj/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ghostproj {

namespace {

// Rational approximation (Acklam-style central/tail split) for the
// standard normal quantile; used as the seed for erf_inv.
double norm_quantile_approx(double p)
{
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double erfc_inv(double y)
{
    if (!(y > 0.0) || !(y >= 0.0 && y <= 2.0))
        throw std::domain_error("erfc_inv: argument must lie in (0, 2)");
    if (y == 1.0)
        return 0.0;
    // erfc(x) = 2 * Phi(-x*sqrt(2)) => x = -quantile(y/2)/sqrt(2)
    double x = -norm_quantile_approx(0.5 * y) / std::sqrt(2.0);
    // Two Newton refinements against std::erfc; derivative -2/sqrt(pi) e^{-x^2}.
    for (int i = 0; i < 2; ++i) {
        const double err = std::erfc(x) - y;
        x += err / (2.0 / std::sqrt(M_PI) * std::exp(-x * x));
    }
    return x;
}

double erf_inv(double x)
{
    if (!(x > -1.0 && x < 1.0))
        throw std::domain_error("erf_inv: argument must lie in (-1, 1)");
    if (x < 0.0)
        return -erf_inv(-x);
    return erfc_inv(1.0 - x);
}

double kept_fraction(double x)
{
    return 0.5 * std::erfc(x);
}

} // namespace ghostproj
