#include "ghostproj/nonneg.hpp"

#include <cmath>
#include <stdexcept>

#include "ghostproj/optimize.hpp"

namespace ghostproj {

NonNegBasis construct(int n)
{
    if (n < 1)
        throw std::invalid_argument("construct: dimension must be >= 1");
    if (n > 32)
        throw std::invalid_argument("construct: dimension capped at 32");

    Eigen::MatrixXd b(2, 1);
    b << 1.0, -1.0;
    const double root3 = std::sqrt(3.0);
    for (int d = 1; d < n; ++d) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(d + 2, d + 1);
        next.topLeftCorner(d + 1, d) = b;
        // Split the last vector across +-sqrt(3) in the new column.
        next.row(d + 1) = next.row(d);
        next(d, d) = root3;
        next(d + 1, d) = -root3;
        b = std::move(next);
    }

    NonNegBasis out;
    out.dimension = n;
    out.vectors = std::move(b);
    return out;
}

Eigen::RowVectorXd zero_transform(int n)
{
    if (n < 1)
        throw std::invalid_argument("zero_transform: dimension must be >= 1");
    // The split construction doubles the annihilator each induction step:
    // if T_n kills B_n then (2 T_n[1..n], 1, 1) kills B_{n+1}, because the
    // last column cancels across the +-sqrt(3) pair and the kernel of B_n is
    // one-dimensional. Hence T_n = (2^{n-1}, ..., 4, 2, 1, 1).
    Eigen::RowVectorXd t(n + 1);
    for (int i = 0; i < n; ++i)
        t[i] = std::ldexp(1.0, n - 1 - i);
    t[n] = 1.0;
    return t;
}

Eigen::VectorXd verify_nonneg_representation(const NonNegBasis& basis,
                                             const Eigen::VectorXd& v)
{
    if (v.size() != basis.dimension)
        throw std::invalid_argument("verify_nonneg_representation: dimension mismatch");
    const Eigen::MatrixXd a = basis.vectors.transpose(); // n x (n+1)
    const Eigen::VectorXd w = nnls_solve(a, v, 1e-14);
    const double resid = (a * w - v).norm();
    if (resid > 1e-8 * (1.0 + v.norm()))
        throw std::runtime_error(
            "verify_nonneg_representation: representation not found (residual " +
            std::to_string(resid) + "); this falsifies the construction");
    return w;
}

} // namespace ghostproj
