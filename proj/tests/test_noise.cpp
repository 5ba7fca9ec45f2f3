#include <doctest.h>

#include <cmath>

#include "ghostproj/noise.hpp"

using namespace ghostproj;

namespace {

BasisSpec spec20(std::uint64_t count)
{
    BasisSpec s;
    s.rows = 20;
    s.cols = 20;
    s.count = count;
    s.distribution = Distribution::uniform01;
    s.master_seed = 31;
    return s;
}

} // namespace

TEST_CASE("poisson realization has the right mean and variance")
{
    RandomBasis basis(spec20(200));
    ExposurePlan plan;
    plan.weights.assign(200, 0.02);
    const double lambda = 500.0;
    NoiseModel model{lambda, 0.0, 77};

    const Projection noisy = realize(plan, basis, model);
    const Image noiseless = accumulate_projection(basis, plan);

    // Each pixel is a sum of independent Poissons: total mean = variance =
    // lambda * (noiseless intensity).
    double mean_obs = 0.0, mean_exp = 0.0;
    for (long q = 0; q < 400; ++q) {
        mean_obs += noisy.values.values()[q];
        mean_exp += lambda * noiseless.values()[q];
    }
    mean_obs /= 400.0;
    mean_exp /= 400.0;
    // Residual variance across pixels ~ mean_exp; se(mean) = sqrt(var/400).
    CHECK(std::abs(mean_obs - mean_exp) < 4.0 * std::sqrt(mean_exp / 400.0));

    double var = 0.0;
    for (long q = 0; q < 400; ++q) {
        const double r = noisy.values.values()[q] - lambda * noiseless.values()[q];
        var += r * r;
    }
    var /= 400.0;
    CHECK(var == doctest::Approx(mean_exp).epsilon(0.25));
}

TEST_CASE("lambda zero returns exact intensities")
{
    RandomBasis basis(spec20(50));
    ExposurePlan plan;
    plan.weights.assign(50, 0.1);
    NoiseModel model{0.0, 0.0, 1};
    const Projection p = realize(plan, basis, model);
    const Image exact = accumulate_projection(basis, plan);
    CHECK(p.values.values() == exact.values());
}

TEST_CASE("exposure jitter perturbs weights and reports truncation")
{
    RandomBasis basis(spec20(500));
    ExposurePlan plan;
    plan.weights.assign(500, 1e-4); // w/sigma < 4: heavy truncation expected
    NoiseModel model{0.0, 1e-3, 5};
    std::uint64_t flagged = 0;
    const Projection p = realize(plan, basis, model, &flagged);
    CHECK(flagged == 500);
    for (double v : p.values.values())
        CHECK(v >= 0.0);

    // Comfortable weights: no flags, small relative deviation.
    plan.weights.assign(500, 0.1);
    flagged = 0;
    const Projection q = realize(plan, basis, model, &flagged);
    CHECK(flagged == 0);
    const Image exact = accumulate_projection(basis, plan);
    double rms = 0.0;
    for (long i = 0; i < 400; ++i) {
        const double r = q.values.values()[i] - exact.values()[i];
        rms += r * r;
    }
    // Var per pixel ~ N sigma_w^2 E[R^2].
    CHECK(std::sqrt(rms / 400.0) ==
          doctest::Approx(std::sqrt(500.0 * 1e-6 / 3.0)).epsilon(0.2));
}

TEST_CASE("filtered-poisson predictor recovers its asymptotes")
{
    const DistributionMoments m = moments(spec20(10));
    const Image img = phantom(20, 20, "moments:0.5:0.5");
    const CorrelationStats st = correlation_stats(m, img);
    const double cutoff = st.expected + std::sqrt(2.0 * st.variance) * 0.433;

    const auto p = predict_snr_filtered_poisson(m, st, cutoff, 1000.0, 50000.0);
    CHECK(p.snr > 0.0);
    CHECK(p.snr < p.basis_rich_limit);
    CHECK(p.snr < p.photon_rich_limit);

    // Photon-rich limit: lambda enormous -> noise-free filtered SNR.
    const auto rich = predict_snr_filtered_poisson(m, st, cutoff, 1e12, 50000.0);
    CHECK(rich.snr == doctest::Approx(rich.photon_rich_limit).epsilon(1e-3));

    // Basis-rich limit: N' enormous -> sqrt(lambda gamma E[I^2]/E[R]).
    const auto big = predict_snr_filtered_poisson(m, st, cutoff, 1000.0, 1e12);
    CHECK(big.snr == doctest::Approx(big.basis_rich_limit).epsilon(1e-3));
}

TEST_CASE("numeric-plan predictor recovers the pure-noise formulas")
{
    ExposurePlan plan;
    plan.weights.assign(1000, 0.05);
    const DistributionMoments m = moments(spec20(10));
    const double e2 = 0.5;

    // sigma_w = 0: pure Poisson, SNR = sqrt(lambda E[I^2] / pedestal).
    const auto poisson = predict_snr_numeric(plan, m, e2, 2000.0, 0.0);
    const double pedestal = 1000.0 * 0.05 * 0.5;
    CHECK(poisson.pedestal == doctest::Approx(pedestal).epsilon(1e-12));
    CHECK(poisson.snr ==
          doctest::Approx(std::sqrt(2000.0 * e2 / pedestal)).epsilon(1e-12));
    CHECK(poisson.snr == doctest::Approx(poisson.poisson_only).epsilon(1e-12));

    // lambda = 0: pure exposure noise, SNR = sqrt(E[I^2]/(N' sigma^2 Var[R])).
    const auto exposure = predict_snr_numeric(plan, m, e2, 0.0, 1e-3);
    CHECK(exposure.snr ==
          doctest::Approx(std::sqrt(e2 / (1000.0 * 1e-6 * m.variance))).epsilon(1e-12));
    CHECK(exposure.snr == doctest::Approx(exposure.exposure_only).epsilon(1e-12));

    // Combined: harmonic mix of the two variances.
    const auto both = predict_snr_numeric(plan, m, e2, 2000.0, 1e-3);
    const double expected = std::sqrt(
        2000.0 * e2 / (1000.0 * 1e-6 * 2000.0 * m.variance + pedestal));
    CHECK(both.snr == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("imperfect-reconstruction variance map and direct baseline")
{
    RandomBasis basis(spec20(100));
    const Image img = phantom(20, 20, "zero-centered");
    ExposurePlan plan;
    plan.weights.assign(100, 0.01);
    const Image map = variance_map_imperfect_poisson(plan, basis, img, 100.0);
    for (double v : map.values())
        CHECK(v >= 0.0);

    const Image obj = phantom(20, 20);
    const DirectBaseline base = direct_projection_baseline(obj, 400.0);
    CHECK(base.global == doctest::Approx(std::sqrt(400.0 * obj.mean())).epsilon(1e-12));
    CHECK(base.zero_centered_bound == doctest::Approx(20.0).epsilon(1e-12));
    for (long q = 0; q < 400; ++q)
        CHECK(base.pixel_snr.values()[q] ==
              doctest::Approx(std::sqrt(400.0 * obj.values()[q])).epsilon(1e-12));

    CHECK_THROWS(direct_projection_baseline(phantom(20, 20, "zero-centered"), 100.0));
}
