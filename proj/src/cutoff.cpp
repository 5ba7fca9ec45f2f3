#include "ghostproj/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace ghostproj {

double cutoff_a(double n, double lambda, long nm, double mask_mean, double mask_variance,
                double image_second_moment)
{
    if (lambda <= 0.0)
        throw std::invalid_argument("cutoff_a: lambda must be > 0");
    return (n / lambda) * mask_mean /
           std::sqrt(2.0 * M_PI * static_cast<double>(nm) * mask_variance *
                     image_second_moment);
}

double optimal_x_residual(double a, double x)
{
    return -std::sqrt(M_PI) * x * (a + 2.0 * std::exp(x * x)) * std::erfc(x) +
           a * std::exp(-x * x) + 1.0;
}

double solve_optimal_x(double a)
{
    if (!(a >= 1e-6 && a <= 1e6))
        throw std::invalid_argument("solve_optimal_x: a outside [1e-6, 1e6]");

    double lo = 0.0, hi = 6.0;
    double f_lo = optimal_x_residual(a, lo);
    double f_hi = optimal_x_residual(a, hi);
    if (f_lo * f_hi > 0.0)
        throw std::runtime_error("solve_optimal_x: no sign change in bracket [0, 6]");

    // Bisection to a tight interval, then Newton with a fallback to the
    // midpoint whenever a step leaves the bracket.
    for (int i = 0; i < 60 && hi - lo > 1e-8; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = optimal_x_residual(a, mid);
        if (f_lo * f_mid <= 0.0) {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 50; ++i) {
        const double f = optimal_x_residual(a, x);
        if (std::fabs(f) < 1e-12)
            break;
        const double h = 1e-7;
        const double df =
            (optimal_x_residual(a, x + h) - optimal_x_residual(a, x - h)) / (2.0 * h);
        double step = df != 0.0 ? f / df : 0.0;
        double next = x - step;
        if (!(next > lo && next < hi) || step == 0.0)
            next = 0.5 * (lo + hi);
        if (optimal_x_residual(a, lo) * optimal_x_residual(a, next) <= 0.0)
            hi = next;
        else
            lo = next;
        x = next;
    }
    if (std::fabs(optimal_x_residual(a, x)) > 1e-10)
        throw std::runtime_error("solve_optimal_x: residual tolerance not reached");
    return x;
}

double approx_optimal_x(double a)
{
    if (a <= 0.0)
        throw std::invalid_argument("approx_optimal_x: a must be > 0");
    constexpr double c1 = 0.6510, c2 = 0.5310, c3 = 1.5188, c4 = 1.3682, c5 = 1.2847;
    const double u = std::log10(a);
    const auto sigmoid = [&](double v) { return 1.0 / (1.0 + c4 * std::exp(c5 * v)); };
    const double sqrt2x = c1 * sigmoid(u) + (c2 * u + c3) * sigmoid(-u);
    return sqrt2x / std::sqrt(2.0);
}

std::vector<CutoffSweepRow> cutoff_sweep(double a_lo, double a_hi, int points)
{
    if (points < 2 || a_lo <= 0.0 || a_hi <= a_lo)
        throw std::invalid_argument("cutoff_sweep: bad sweep parameters");
    std::vector<CutoffSweepRow> rows;
    rows.reserve(points);
    const double log_lo = std::log10(a_lo);
    const double step = (std::log10(a_hi) - log_lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        CutoffSweepRow r;
        r.a = std::pow(10.0, log_lo + i * step);
        r.x_solved = solve_optimal_x(r.a);
        r.x_approx = approx_optimal_x(r.a);
        rows.push_back(r);
    }
    return rows;
}

} // namespace ghostproj
