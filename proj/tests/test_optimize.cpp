#include <doctest.h>

#include <cmath>

#include "ghostproj/optimize.hpp"

using namespace ghostproj;

namespace {

BasisSpec spec(int rows, int cols, std::uint64_t count, std::uint64_t seed = 17)
{
    BasisSpec s;
    s.rows = rows;
    s.cols = cols;
    s.count = count;
    s.distribution = Distribution::uniform01;
    s.master_seed = seed;
    return s;
}

} // namespace

TEST_CASE("nnls_solve matches hand-checkable systems")
{
    // Identity design: solution is the positive part of b.
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd b(3);
    b << 1.0, -2.0, 0.5;
    const Eigen::VectorXd w = nnls_solve(eye, b);
    CHECK(w(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w(2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("nnls_solve recovers a known non-negative solution")
{
    Eigen::MatrixXd a(20, 6);
    // Deterministic full-column-rank design; the i*j cross term keeps the
    // columns out of any common low-dimensional trigonometric span.
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 6; ++j)
            a(i, j) = std::sin(1.0 + 0.37 * (i + 1) * (j + 1)) + 1.2;
    Eigen::VectorXd truth(6);
    truth << 0.3, 0.0, 1.7, 0.0, 0.2, 0.9;
    const Eigen::VectorXd b = a * truth;
    const Eigen::VectorXd w = nnls_solve(a, b);
    CHECK((a * w - b).norm() < 1e-10);
    for (int j = 0; j < 6; ++j)
        CHECK(w(j) == doctest::Approx(truth(j)).epsilon(1e-8));
}

TEST_CASE("nnls kkt conditions hold at the solution")
{
    Eigen::MatrixXd a(30, 12);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 12; ++j)
            a(i, j) = std::cos(0.3 + 0.11 * i * (j + 1));
    Eigen::VectorXd b(30);
    for (int i = 0; i < 30; ++i)
        b(i) = std::sin(0.7 * i);
    const Eigen::VectorXd w = nnls_solve(a, b);
    const Eigen::VectorXd grad = a.transpose() * (b - a * w);
    const double tol = 1e-8 * grad.cwiseAbs().maxCoeff() + 1e-10;
    for (int j = 0; j < 12; ++j) {
        CHECK(w(j) >= 0.0);
        if (w(j) > 1e-12)
            CHECK(std::abs(grad(j)) < 1e-6); // active: stationarity
        else
            CHECK(grad(j) < tol + 1e-6); // inactive: no ascent direction
    }
}

TEST_CASE("design matrix columns are centered and pedestal tracked")
{
    RandomBasis basis(spec(10, 10, 120));
    const Image img = phantom(10, 10, "zero-centered");
    const WeightProblem problem = build_design(basis, img);
    CHECK(problem.design.rows() == 100);
    CHECK(problem.design.cols() == 120);
    for (int k = 0; k < 120; ++k) {
        CHECK(std::abs(problem.design.col(k).mean()) < 1e-12);
        CHECK(problem.column_mean(k) == doctest::Approx(0.5).epsilon(0.25));
    }
    CHECK(std::abs(problem.target.mean()) < 1e-12);
}

TEST_CASE("overcomplete nnls reconstructs almost exactly")
{
    RandomBasis basis(spec(10, 10, 200)); // N = 2nm
    const Image img = phantom(10, 10, "zero-centered");
    const NnlsResult res = nnls(build_design(basis, img));
    CHECK(res.snr > 1e6);
    CHECK(res.active_count > 50);
    CHECK(res.active_count <= 200);
    res.plan.validate();
    CHECK(res.plan.weights.size() == 200);
}

TEST_CASE("ga analytic gradient matches finite differences")
{
    RandomBasis basis(spec(8, 8, 100));
    const Image img = phantom(8, 8, "zero-centered");
    const WeightProblem problem = build_design(basis, img);
    const NnlsResult res = nnls(problem);
    CHECK(ga_gradient_max_rel_error(problem, 5000.0, res.plan) < 1e-5);
}

TEST_CASE("gradient ascent lowers the poisson-aware objective")
{
    RandomBasis basis(spec(10, 10, 300));
    const Image img = phantom(10, 10, "zero-centered");
    const WeightProblem problem = build_design(basis, img);
    const NnlsResult res = nnls(problem);
    const double lambda = 5000.0;

    const GaResult ga = gradient_ascent_poisson(problem, lambda, res.plan);
    // Objective at the NNLS start: lambda^2 mean residual^2 + lambda pedestal.
    Eigen::VectorXd w0 = Eigen::VectorXd::Zero(300);
    for (int k = 0; k < 300; ++k)
        w0(k) = res.plan.weights[static_cast<std::size_t>(k)];
    const Eigen::VectorXd r0 = problem.design * w0 - problem.target;
    const double f0 =
        lambda * lambda * r0.squaredNorm() / 100.0 + lambda * problem.column_mean.dot(w0);
    CHECK(ga.objective < f0);
    CHECK(ga.pedestal < res.plan.pedestal_predicted);
    for (double w : ga.plan.weights)
        CHECK(w >= 0.0);
    CHECK(ga.snr == doctest::Approx(lambda * std::sqrt(img.second_moment() / ga.objective))
                        .epsilon(1e-9));
}
