#pragma once

#include <Eigen/Dense>

namespace ghostproj {

/// (n+1) vectors in n dimensions arranged so every vector has a
/// non-negative-coefficient representation. Rows of `vectors` are the
/// basis vectors, built by the split recursion from {(1), (-1)}.
struct NonNegBasis {
    int dimension = 0;
    Eigen::MatrixXd vectors; // (n+1) x n
};

/// Recursive construction: append a zero column to every vector, then
/// split the last vector into two copies with +sqrt(3) and -sqrt(3) in the
/// new column. n in [1, 32].
NonNegBasis construct(int n);

/// T_n = (n, n-1, ..., 3, 2, 1, 1): the positive row vector annihilating
/// the n-dimensional construction, T_n B = 0.
Eigen::RowVectorXd zero_transform(int n);

/// Find w >= 0 with B^T w = v via NNLS; throws if the residual exceeds
/// 1e-8 (1 + |v|), which would falsify the construction.
Eigen::VectorXd verify_nonneg_representation(const NonNegBasis& basis,
                                             const Eigen::VectorXd& v);

} // namespace ghostproj
