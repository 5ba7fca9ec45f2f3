#include "ghostproj/rng.hpp"

#include <cmath>

namespace ghostproj {

double CounterStream::next_gaussian() noexcept
{
    // Box-Muller; guard the log against an exact zero deviate.
    double u1 = next_u01();
    const double u2 = next_u01();
    if (u1 <= 0.0)
        u1 = 0x1.0p-54;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

namespace {

// log(k!) for the PTRD acceptance test.
double log_factorial(double k) noexcept
{
    return std::lgamma(k + 1.0);
}

} // namespace

std::uint64_t CounterStream::next_poisson(double mean) noexcept
{
    if (mean <= 0.0)
        return 0;

    if (mean < 10.0) {
        // Inversion by sequential search.
        const double l = std::exp(-mean);
        double p = 1.0;
        std::uint64_t k = 0;
        do {
            p *= next_u01();
            ++k;
        } while (p > l);
        return k - 1;
    }

    // PTRD transformed rejection (Hormann, 1993).
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        double u = next_u01() - 0.5;
        const double v = next_u01();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        const double log_mean = std::log(mean);
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = -mean + k * log_mean - log_factorial(k);
        if (lhs <= rhs)
            return static_cast<std::uint64_t>(k);
    }
}

} // namespace ghostproj
