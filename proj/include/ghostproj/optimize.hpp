#pragma once

#include <Eigen/Dense>

#include "ghostproj/basis.hpp"
#include "ghostproj/image.hpp"
#include "ghostproj/schemes.hpp"

namespace ghostproj {

/// Least-squares weight problem: design columns are vectorized masks with
/// their column mean subtracted (the pedestal absorbed), target is the
/// vectorized zero-centered image.
struct WeightProblem {
    Eigen::MatrixXd design;      // nm x N, zero-mean columns
    Eigen::VectorXd column_mean; // per-column subtracted means (pedestal bookkeeping)
    Eigen::VectorXd target;      // zero-mean image vector
    int rows = 0;
    int cols = 0;

    long nm() const noexcept { return static_cast<long>(rows) * cols; }
};

/// Materializes the basis into the design matrix. The image is centered
/// automatically if needed. Throws if the basis exceeds its memory cap.
WeightProblem build_design(const RandomBasis& basis, const Image& image);

/// Low-level Lawson-Hanson active-set NNLS: argmin ||A w - b|| s.t. w >= 0.
/// KKT tolerance is tol_scale * ||A^T b||_inf; max_iter < 0 means 10 * cols.
/// Throws if the iteration cap is exceeded.
Eigen::VectorXd nnls_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           double tol_scale = 1e-10, int max_iter = -1);

struct NnlsResult {
    ExposurePlan plan;          // dense weights over all N masks
    double residual_norm = 0.0; // ||M w - I||
    double snr = 0.0;           // sqrt(E[I^2] / Var[M w - I])
    double kkt_tolerance = 0.0;
    long active_count = 0; // strictly positive weights
};

NnlsResult nnls(const WeightProblem& problem);

struct GaResult {
    ExposurePlan plan;
    double snr = 0.0;       // sqrt(lambda^2 E[I^2] / mean Var[P_ij])
    double objective = 0.0; // spatially averaged Var[P_ij]
    double pedestal = 0.0;  // column_mean . w
    int iterations = 0;
};

/// Projected gradient descent on the spatial average of the Poisson
/// variance map Var[P_ij] = lambda^2 (Mw - I)^2 + lambda (w-weighted mask
/// sum), i.e. ascent of the Poisson-aware SNR. Armijo backtracking line
/// search; negative weights clipped to zero; stops when the relative SNR
/// improvement over 50 iterations falls below 1e-6.
GaResult gradient_ascent_poisson(const WeightProblem& problem, double lambda,
                                 const ExposurePlan& w0, int max_iter = 20000);

/// Max relative error between the analytic GA gradient and central finite
/// differences at w (only components with meaningful magnitude are
/// compared). Used to certify the gradient implementation.
double ga_gradient_max_rel_error(const WeightProblem& problem, double lambda,
                                 const ExposurePlan& w, double step = 1e-6);

} // namespace ghostproj
