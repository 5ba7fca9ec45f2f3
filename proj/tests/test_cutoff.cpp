#include <doctest.h>

#include <cmath>

#include "ghostproj/cutoff.hpp"

using namespace ghostproj;

TEST_CASE("a evaluates the scaled basis-to-photon ratio")
{
    // N = 100,000 binary masks, lambda = 1000, 40x40, E[I^2] = 0.5 -> a = 1.41.
    const double a = cutoff_a(100000.0, 1000.0, 1600, 0.5, 0.25, 0.5);
    CHECK(a == doctest::Approx(100.0 * 0.5 / std::sqrt(2.0 * M_PI * 1600.0 * 0.25 * 0.5))
                   .epsilon(1e-12));
    CHECK(a == doctest::Approx(1.41).epsilon(0.005));
}

TEST_CASE("the solved cutoff zeroes the optimality condition")
{
    for (double a : {1e-3, 1e-2, 0.1, 1.0, 1.41, 10.0, 100.0, 1e3}) {
        const double x = solve_optimal_x(a);
        CHECK(std::abs(optimal_x_residual(a, x)) < 1e-10);
        CHECK(x >= 0.0);
    }
}

TEST_CASE("solver limits match the paper landmarks")
{
    // a -> 0: photon-rich regime, the noiseless optimum sqrt(2)X -> 0.612.
    CHECK(std::sqrt(2.0) * solve_optimal_x(1e-6) == doctest::Approx(0.612).epsilon(2e-3));
    // a = 100: basis-rich regime.
    CHECK(std::sqrt(2.0) * solve_optimal_x(100.0) == doctest::Approx(2.4).epsilon(0.05));
    // Monotone in a: more masks per photon push the cutoff up.
    CHECK(solve_optimal_x(10.0) > solve_optimal_x(0.1));
}

TEST_CASE("fitted approximation stays close to the solver")
{
    double worst = 0.0;
    for (const auto& row : cutoff_sweep(1e-3, 1e3, 200))
        worst = std::max(worst,
                         std::abs(std::sqrt(2.0) * (row.x_solved - row.x_approx)));
    CHECK(worst < 0.15);
}

TEST_CASE("sweep covers the requested range log-uniformly")
{
    const auto rows = cutoff_sweep(1e-2, 1e2, 5);
    REQUIRE(rows.size() == 5);
    CHECK(rows.front().a == doctest::Approx(1e-2));
    CHECK(rows.back().a == doctest::Approx(1e2));
    CHECK(rows[2].a == doctest::Approx(1.0).epsilon(1e-9));
}
