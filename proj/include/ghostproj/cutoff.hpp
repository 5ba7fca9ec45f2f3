#pragma once

#include <vector>

namespace ghostproj {

/// Scaled basis-to-photon ratio: a = (N/lambda) E[R] / sqrt(2 pi nm Var[R] E[I^2]).
double cutoff_a(double n, double lambda, long nm, double mask_mean, double mask_variance,
                double image_second_moment);

/// Solve -sqrt(pi) X (a + 2 e^{X^2}) erfc(X) + a e^{-X^2} + 1 = 0 for the
/// Poisson-optimal standardized cutoff X. Bisection bracket [0, 6] with
/// Newton refinement; |residual| < 1e-10.
double solve_optimal_x(double a);

/// Residual of the transcendental optimality condition at X.
double optimal_x_residual(double a, double x);

/// Fitted sigmoid approximation of solve_optimal_x (constants taken
/// verbatim from the fit; not refitted here).
double approx_optimal_x(double a);

struct CutoffSweepRow {
    double a = 0.0;
    double x_solved = 0.0;
    double x_approx = 0.0;
};

/// Log-spaced sweep over a in [a_lo, a_hi] with `points` samples.
std::vector<CutoffSweepRow> cutoff_sweep(double a_lo, double a_hi, int points);

} // namespace ghostproj
