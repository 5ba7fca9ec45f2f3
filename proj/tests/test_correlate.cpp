#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ghostproj/correlate.hpp"

using namespace ghostproj;

namespace {

BasisSpec spec40(std::uint64_t count, Distribution d = Distribution::uniform01)
{
    BasisSpec s;
    s.rows = 40;
    s.cols = 40;
    s.count = count;
    s.distribution = d;
    s.master_seed = 21;
    return s;
}

} // namespace

TEST_CASE("correlation stats implement the closed forms")
{
    const Image img = phantom(40, 40, "moments:0.5:0.376759");
    const DistributionMoments m = moments(spec40(10));
    const CorrelationStats st = correlation_stats(m, img);
    CHECK(st.expected ==
          doctest::Approx(0.5 * 0.5 / std::sqrt((1.0 / 3.0) * 0.376759)).epsilon(1e-12));
    CHECK(st.variance == doctest::Approx((1.0 / 12.0) / (1600.0 / 3.0)).epsilon(1e-12));

    // Zero-centered image annihilates the expected correlation.
    const Image zc = phantom(40, 40, "zero-centered");
    CHECK(correlation_stats(m, zc).expected == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS(correlation_stats(m, Image(4, 4, 0.0)));
}

TEST_CASE("pseudo-correlation sample mean matches the model")
{
    const std::uint64_t n = 200000;
    RandomBasis basis(spec40(n));
    const Image img = phantom(40, 40, "zero-centered");
    const CorrelationStats st = correlation_stats(basis.moments(), img);
    const auto c = pseudo_correlation(basis, img);
    REQUIRE(c.size() == n);
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / n;
    const double se = std::sqrt(st.variance / static_cast<double>(n));
    CHECK(std::abs(mean - st.expected) < 3.0 * se);

    double var = 0.0;
    for (double v : c)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    CHECK(var == doctest::Approx(st.variance).epsilon(0.02));
}

TEST_CASE("filter keeps exactly the at-or-above-cutoff masks, ties included")
{
    const Image img = phantom(40, 40);
    const CorrelationStats st = correlation_stats(moments(spec40(10)), img);
    const std::vector<double> c = {0.1, 0.5, 0.5, 0.3, 0.9, 0.49999};
    const FilterSelection sel = filter_basis(c, st, 0.5);
    CHECK(sel.kept_indices == std::vector<std::uint64_t>{1, 2, 4});
    CHECK(sel.n_kept == 3);
    CHECK(sel.kept_mean_empirical == doctest::Approx((0.5 + 0.5 + 0.9) / 3.0));
    CHECK(sel.kept_fraction ==
          doctest::Approx(std::erfc(sel.x) / 2.0).epsilon(1e-12));

    CHECK_THROWS(filter_basis(c, st, 1.0)); // nothing survives
}

TEST_CASE("analytic filtered mean matches a monte-carlo tail mean")
{
    const std::uint64_t n = 200000;
    RandomBasis basis(spec40(n));
    const Image img = phantom(40, 40, "moments:0.5:0.376759");
    const CorrelationStats st = correlation_stats(basis.moments(), img);
    const auto c = pseudo_correlation(basis, img);
    const double cutoff = st.expected + std::sqrt(2.0 * st.variance) * 0.433;
    const FilterSelection sel = filter_basis(c, st, cutoff);
    CHECK(sel.kept_mean_analytic ==
          doctest::Approx(expected_filtered_correlation(st, cutoff)).epsilon(1e-12));
    CHECK(sel.kept_mean_empirical ==
          doctest::Approx(sel.kept_mean_analytic).epsilon(0.002));
    // gamma definitions differ only through which E[C'] they use.
    const double units = std::sqrt(st.mask_second_moment / st.image_second_moment);
    CHECK(sel.gamma ==
          doctest::Approx((sel.kept_mean_empirical - st.expected) * units).epsilon(1e-12));
    CHECK(sel.gamma_analytic ==
          doctest::Approx((sel.kept_mean_analytic - st.expected) * units).epsilon(1e-12));
}

TEST_CASE("extreme cutoffs are rejected by the analytic tail mean")
{
    const Image img = phantom(40, 40);
    const CorrelationStats st = correlation_stats(moments(spec40(10)), img);
    const double cutoff = st.expected + std::sqrt(2.0 * st.variance) * 7.0;
    CHECK_THROWS(expected_filtered_correlation(st, cutoff));
}

TEST_CASE("first-order true correlation tracks the exact one")
{
    RandomBasis basis(spec40(2000));
    const Image img = phantom(40, 40, "moments:0.5:0.376759");
    const auto res = true_correlation(basis, img);
    REQUIRE(res.exact.size() == 2000);
    REQUIRE(res.taylor.size() == 2000);
    double worst = 0.0;
    for (std::size_t k = 0; k < res.exact.size(); ++k)
        worst = std::max(worst, std::abs(res.exact[k] - res.taylor[k]));
    // Relative mask-norm fluctuations are O(1/sqrt(nm)): the expansion is
    // accurate to second order in them.
    CHECK(worst < 5e-3);
}

TEST_CASE("true-correlation mean correction has the closed form")
{
    const DistributionMoments m = moments(spec40(10));
    const Image img = phantom(40, 40, "moments:0.5:0.376759");
    // uniform01: E[R^3] = 1/4.
    const double corr = true_correlation_mean_correction(m, 0.25, img);
    const double expected = -0.5 * (0.25 - (1.0 / 3.0) * 0.5) /
                            (2.0 * 1600.0 *
                             std::sqrt(0.376759 * std::pow(1.0 / 3.0, 3)));
    CHECK(corr == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("color pseudo-correlation reduces to monochrome at c=1")
{
    RandomBasis basis(spec40(100));
    const Image img = phantom(40, 40, "moments:0.5:0.376759");
    const ColorImage color({img});
    const auto mono = pseudo_correlation(basis, img);
    const auto poly = color_pseudo_correlation({&basis}, color);
    REQUIRE(mono.size() == poly.size());
    for (std::size_t k = 0; k < mono.size(); ++k)
        CHECK(poly[k] == doctest::Approx(mono[k]).epsilon(1e-12));
}
